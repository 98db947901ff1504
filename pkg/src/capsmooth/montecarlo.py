"""Monte Carlo verification of the tail and expectation bounds.

Sampling is organized in fixed-size batches, each driven by its own
counter-based generator Philox(key=(seed, batch_index)).  Batches are
reduced in index order with integer counts and compensated float sums,
so results are bit-identical for a given seed regardless of how many
worker threads execute the batches.  Wall-clock time is kept on the
report object but never serialized.

Empirical survival probabilities carry two-sided 95% Wilson score
intervals; an experiment flags a violation only when the Wilson lower
end exceeds the theorem bound at a covered threshold, so a flagged
violation is statistically meaningful rather than sampling noise.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bounds
from .condnum import ConicProblem
from .distributions import AdversarialLaw
from .geometry import proj_distance

__all__ = [
    "BATCH_SIZE",
    "WILSON_Z",
    "wilson_interval",
    "ExperimentConfig",
    "TailRow",
    "TailReport",
    "ExpectationReport",
    "KSResult",
    "estimate_tail",
    "estimate_expectation",
    "ks_radial_test",
]

BATCH_SIZE = 16384
# two-sided 95% normal quantile
WILSON_Z = 1.959963984540054
# one-sample Kolmogorov-Smirnov threshold at significance 0.01
KS_COEFF = 1.63


def wilson_interval(successes, trials, z=WILSON_Z):
    """Two-sided Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not (0 <= successes <= trials):
        raise ValueError("successes must lie in [0, trials]")
    nt = float(trials)
    p = successes / nt
    z2 = z * z
    denom = 1.0 + z2 / nt
    center = (p + z2 / (2.0 * nt)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / nt
                                   + z2 / (4.0 * nt * nt))
    # at the extremes the exact endpoints are 0 and 1; separate
    # roundings of center and half can land one ulp inside
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


@dataclass
class ExperimentConfig:
    """What to run: a problem, a law, sample count, thresholds, seed.

    scale "linear" tests P(C >= t); scale "log" tests P(ln C > t).
    None picks "log" when the law has a pole (beta > 0), else "linear".
    t_grid may be None for expectation experiments.
    """
    problem: ConicProblem
    law: AdversarialLaw
    samples: int
    seed: int
    t_grid: Optional[Sequence[float]] = None
    workers: int = 1
    scale: Optional[str] = None
    center: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.problem.n != self.law.cap.n:
            raise ValueError("problem dimension %d does not match law "
                             "dimension %d" % (self.problem.n,
                                               self.law.cap.n))
        # center is carried by the law's cap; an explicit value is only
        # an echo and must agree with it
        if self.center is None:
            self.center = law_center = self.law.cap.center
        else:
            self.center = np.asarray(self.center, dtype=float)
            law_center = self.law.cap.center
            if self.center.shape != law_center.shape or \
                    proj_distance(self.center, law_center) > 1e-9:
                raise ValueError("center does not match the law's cap center")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError("samples must be a positive integer")
        self.samples = int(self.samples)
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        self.seed = int(self.seed)
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValueError("workers must be a positive integer")
        self.workers = int(self.workers)
        if self.scale is None:
            self.scale = "log" if self.law.beta > 0.0 else "linear"
        if self.scale not in ("linear", "log"):
            raise ValueError("scale must be 'linear' or 'log'")
        if self.t_grid is not None:
            grid = [float(t) for t in self.t_grid]
            if len(grid) == 0:
                raise ValueError("t_grid must not be empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("t_grid must be strictly increasing")
            self.t_grid = grid

    def echo(self):
        """Scalars identifying the run; excludes execution details
        (worker count, timing) so serialized reports are reproducible."""
        law = self.law
        return {
            "problem": self.problem.name,
            "n": self.problem.n,
            "degree": self.problem.degree,
            "sigma": law.cap.sigma,
            "beta": law.beta,
            "H": law.H,
            "profile": law.profile.kind,
            "center": [float(c) for c in law.cap.center],
            "samples": self.samples,
            "seed": self.seed,
            "scale": self.scale,
        }


def _batch_rng(seed, index):
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _batch_sizes(total):
    full, rest = divmod(total, BATCH_SIZE)
    sizes = [BATCH_SIZE] * full
    if rest:
        sizes.append(rest)
    return sizes


def _run_batches(job, total, workers):
    """Run job(index, count) over all batches; results in index order."""
    sizes = _batch_sizes(total)
    if workers == 1:
        return [job(i, c) for i, c in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(len(sizes)), sizes))


def _float_cell(x):
    if x != x:
        return "nan"
    return "%.17g" % x


def _bool_cell(b):
    return "true" if b else "false"


@dataclass
class TailRow:
    t: float
    count: int
    survival: float
    wilson_lower: float
    wilson_upper: float
    bound: float
    bound_applicable: bool
    violation: bool


@dataclass
class TailReport:
    config: dict
    scale: str
    rows: list
    n_samples: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def has_violation(self):
        return any(r.violation for r in self.rows)

    def to_csv(self):
        lines = ["t,count,survival,wilson_lower,wilson_upper,bound,"
                 "bound_applicable,violation"]
        for r in self.rows:
            lines.append(",".join([
                _float_cell(r.t), str(r.count), _float_cell(r.survival),
                _float_cell(r.wilson_lower), _float_cell(r.wilson_upper),
                _float_cell(r.bound), _bool_cell(r.bound_applicable),
                _bool_cell(r.violation),
            ]))
        return "\n".join(lines) + "\n"

    def to_json_dict(self):
        return {
            "schema": "capsmooth-report-v1",
            "kind": "tail",
            "config": self.config,
            "rows": [{
                "t": r.t, "count": r.count, "survival": r.survival,
                "wilson_lower": r.wilson_lower,
                "wilson_upper": r.wilson_upper,
                "bound": None if r.bound != r.bound else r.bound,
                "bound_applicable": r.bound_applicable,
                "violation": r.violation,
            } for r in self.rows],
        }


@dataclass
class ExpectationReport:
    config: dict
    mean_ln_c: float
    stderr: float
    n_samples: int
    n_effective: int
    n_redrawn: int
    bound: float
    margin: float
    wall_time: float = field(default=0.0, compare=False)

    @property
    def has_violation(self):
        return self.margin < 0.0

    def to_csv(self):
        header = ("n_samples,n_effective,n_redrawn,mean_ln_c,stderr,"
                  "bound,margin")
        row = ",".join([
            str(self.n_samples), str(self.n_effective),
            str(self.n_redrawn), _float_cell(self.mean_ln_c),
            _float_cell(self.stderr), _float_cell(self.bound),
            _float_cell(self.margin),
        ])
        return header + "\n" + row + "\n"

    def to_json_dict(self):
        return {
            "schema": "capsmooth-report-v1",
            "kind": "expectation",
            "config": self.config,
            "mean_ln_c": self.mean_ln_c,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "n_effective": self.n_effective,
            "n_redrawn": self.n_redrawn,
            "bound": self.bound,
            "margin": self.margin,
        }


@dataclass
class KSResult:
    statistic: float
    threshold: float
    n_samples: int
    passed: bool


def _tail_bound_column(config, t_grid):
    """Theorem bound and applicability per threshold, or nan when the
    threshold is below the theorem's range (or no theorem applies)."""
    law = config.law
    prob = config.problem
    n, d, sigma = prob.n, prob.degree, law.cap.sigma
    out = []
    if config.scale == "linear":
        if law.beta == 0.0:
            thr = bounds.t0(n, d, sigma)
            for t in t_grid:
                if t >= thr:
                    out.append(bounds.uniform_tail_bound(n, d, sigma, t))
                else:
                    out.append(math.nan)
        else:
            out = [math.nan] * len(t_grid)
        return out
    if law.beta == 0.0:
        thr = bounds.t0_log(n, d, sigma)
        for t in t_grid:
            if t >= thr:
                out.append(bounds.uniform_log_tail_bound(n, d, sigma, t))
            else:
                out.append(math.nan)
    else:
        alpha = 1.0 - law.beta / n
        delta = bounds.delta_eps(n, law.beta, sigma, law.H, 0.5 * alpha)
        thr = bounds.t_eps(n, d, sigma, delta)
        for t in t_grid:
            if t >= thr:
                out.append(bounds.boosted_tail_bound(n, d, sigma, law.beta,
                                                     t))
            else:
                out.append(math.nan)
    return out


def estimate_tail(config):
    """Estimate survival probabilities on the threshold grid and compare
    against the applicable theorem bound.  Returns a TailReport."""
    if config.t_grid is None:
        raise ValueError("tail estimation needs a t_grid")
    t_grid = np.asarray(config.t_grid, dtype=float)
    law = config.law
    batch_eval = config.problem.evaluate_batch
    log_scale = config.scale == "log"
    start = time.monotonic()

    def job(index, count):
        rng = _batch_rng(config.seed, index)
        z = law.sample(rng, size=count)
        c = batch_eval(z)
        if log_scale:
            with np.errstate(divide="ignore"):
                vals = np.log(c)
            return np.array([int(np.count_nonzero(vals >= t))
                             for t in t_grid])
        return np.array([int(np.count_nonzero(c >= t)) for t in t_grid])

    per_batch = _run_batches(job, config.samples, config.workers)
    counts = np.sum(np.asarray(per_batch, dtype=np.int64), axis=0)

    bound_col = _tail_bound_column(config, t_grid)
    rows = []
    for t, k, b in zip(t_grid, counts, bound_col):
        lo, hi = wilson_interval(int(k), config.samples)
        applicable = b == b
        rows.append(TailRow(
            t=float(t), count=int(k),
            survival=int(k) / config.samples,
            wilson_lower=lo, wilson_upper=hi,
            bound=b, bound_applicable=applicable,
            violation=bool(applicable and lo > b),
        ))
    return TailReport(config=config.echo(), scale=config.scale, rows=rows,
                      n_samples=config.samples,
                      wall_time=time.monotonic() - start)


def estimate_expectation(config):
    """Estimate E[ln C] and compare against the expectation bound.

    Samples where C is infinite (the draw landed on the ill-posed cone
    to machine precision) are redrawn from the same batch stream and
    counted; they have probability zero in exact arithmetic.
    """
    law = config.law
    prob = config.problem
    batch_eval = prob.evaluate_batch
    start = time.monotonic()

    def job(index, count):
        rng = _batch_rng(config.seed, index)
        z = law.sample(rng, size=count)
        c = batch_eval(z)
        redrawn = 0
        bad = ~np.isfinite(c)
        while np.any(bad):
            k = int(np.count_nonzero(bad))
            redrawn += k
            z_new = law.sample(rng, size=k)
            c[bad] = batch_eval(np.atleast_2d(z_new))
            bad = ~np.isfinite(c)
        vals = np.log(c)
        return (math.fsum(vals), math.fsum(np.square(vals)), count, redrawn)

    per_batch = _run_batches(job, config.samples, config.workers)
    total = math.fsum(b[0] for b in per_batch)
    total_sq = math.fsum(b[1] for b in per_batch)
    n = sum(b[2] for b in per_batch)
    redrawn = sum(b[3] for b in per_batch)

    mean = total / n
    var = max(0.0, (total_sq - n * mean * mean) / max(1, n - 1))
    stderr = math.sqrt(var / n)

    n_, d, sigma = prob.n, prob.degree, law.cap.sigma
    if law.beta == 0.0:
        bound = bounds.uniform_expectation_bound(n_, d, sigma)
    else:
        bound = bounds.adversarial_expectation_bound(n_, d, sigma, law.beta,
                                                     law.H)
    margin = bound - (mean + 3.0 * stderr)
    return ExpectationReport(
        config=config.echo(), mean_ln_c=mean, stderr=stderr,
        n_samples=config.samples, n_effective=n, n_redrawn=redrawn,
        bound=bound, margin=margin, wall_time=time.monotonic() - start)


def ks_radial_test(law, n_samples, seed, reference=None):
    """One-sample KS test of sampled radii against a radial CDF.

    The reference defaults to the sampling law itself; passing a
    different law gives a negative control.  The pass threshold is
    1.63 / sqrt(N), the asymptotic 1% critical value.
    """
    n_samples = int(n_samples)
    if n_samples < 1000:
        raise ValueError("need at least 1000 samples for the asymptotic "
                         "critical value")
    ref = law if reference is None else reference
    center = law.cap.center

    def job(index, count):
        rng = _batch_rng(seed, index)
        z = law.sample(rng, size=count)
        return proj_distance(z, center)

    radii = np.concatenate(_run_batches(job, n_samples, 1))
    radii.sort()
    f = ref.radial_cdf(np.minimum(radii, ref.cap.sigma))
    i = np.arange(1, n_samples + 1, dtype=float)
    d_plus = float(np.max(i / n_samples - f))
    d_minus = float(np.max(f - (i - 1.0) / n_samples))
    stat = max(d_plus, d_minus)
    thr = KS_COEFF / math.sqrt(n_samples)
    return KSResult(statistic=stat, threshold=thr, n_samples=n_samples,
                    passed=bool(stat <= thr))
