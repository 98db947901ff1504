"""Tail and expectation bounds for conic condition numbers on caps.

For a problem of degree d in projective dimension n and the uniform law
on a cap of radius sigma, the tail bound is

    P(C >= t) <= 13 d n / (sigma t)          for t >= t0 = (2d+1) n / sigma,

with the equivalent exponential form P(ln C > t) <= (13 d n / sigma) e^(-t)
for t >= ln((1+2d) n / sigma), and the expectation bound

    E[ln C] <= 2 ln n + 2 ln d + 2 ln(1/sigma) + 5.

For a pole law with exponent beta and radial sup H, the uniform tail is
boosted through a smoothness exponent alpha = 1 - beta/n: for
t >= t_eps := ln(13 d n / (sigma delta_eps)),

    P(ln C > t) <= ((13 d n / sigma) e^(-t))^((1 - beta/n) / 2),

where delta_eps is the uniform mass of the sub-cap of radius rho_eps
and eps is fixed to half of alpha.  The expectation bound becomes

    E[ln C] <= 2 ln n + ln d + ln(1/sigma) + ln(13 pi / 2)
               + (1/alpha) ln(2 e H^2 n / ln(pi n / 2)).

Everything here is a plain formula evaluator or a deterministic
checker; nothing samples.  Evaluators raise on arguments outside their
stated domain rather than clamping.
"""

import math
from dataclasses import dataclass

from scipy import integrate, optimize

from .volumes import log_cap_integral

__all__ = [
    "t0",
    "t0_log",
    "uniform_tail_bound",
    "uniform_log_tail_bound",
    "uniform_expectation_bound",
    "smoothness_alpha",
    "smoothness_ratio",
    "rho_eps",
    "delta_eps",
    "t_eps",
    "boosted_tail_bound",
    "adversarial_expectation_bound",
    "adversarial_expectation_bound_proof_chain",
    "expectation_bound_gap",
    "boosting_check",
    "small_calc_check",
    "ball_maximizer_check",
    "BoostParams",
    "DeltaSandwichRow",
    "delta_eps_sandwich",
    "t_eps_exceeds_t0",
    "default_grid",
]

DEFAULT_N = (2, 3, 4, 8, 16, 32)
DEFAULT_BETA_FRACTIONS = (0.0, 0.25, 0.5, 0.75)
DEFAULT_H = (1.0, 2.0, 10.0)
DEFAULT_SIGMA = (0.1, 0.5, 1.0)
DEFAULT_EPS_FRACTIONS = (0.25, 0.5, 0.75)


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer, got %r" % (n,))
    return int(n)


def _check_d(d):
    if int(d) != d or d < 1:
        raise ValueError("degree d must be a positive integer, got %r" % (d,))
    return int(d)


def _check_sigma(sigma):
    sigma = float(sigma)
    if not (0.0 < sigma <= 1.0):
        raise ValueError("sigma must lie in (0, 1], got %r" % (sigma,))
    return sigma


def _check_beta(n, beta):
    beta = float(beta)
    if not (0.0 <= beta < n):
        raise ValueError("beta must lie in [0, n), got %r" % (beta,))
    return beta


def _check_H(H):
    H = float(H)
    if not (H >= 1.0):
        raise ValueError("H must be >= 1, got %r" % (H,))
    return H


def _check_eps(n, beta, eps):
    eps = float(eps)
    alpha = 1.0 - beta / n
    if not (0.0 < eps < alpha):
        raise ValueError("eps must lie in (0, 1 - beta/n) = (0, %g), got %r"
                         % (alpha, eps))
    return eps


def t0(n, d, sigma):
    """Smallest t covered by the linear-scale uniform tail bound."""
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    return (2.0 * d + 1.0) * n / sigma


def t0_log(n, d, sigma):
    """Smallest t covered by the exponential-form uniform tail bound."""
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    return math.log((1.0 + 2.0 * d) * n / sigma)


def uniform_tail_bound(n, d, sigma, t):
    """13 d n / (sigma t); valid for t >= t0(n, d, sigma)."""
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    t = float(t)
    if t < t0(n, d, sigma):
        raise ValueError("tail bound requires t >= t0 = %g, got t = %g"
                         % (t0(n, d, sigma), t))
    return 13.0 * d * n / (sigma * t)


def uniform_log_tail_bound(n, d, sigma, t):
    """(13 d n / sigma) e^(-t); valid for t >= t0_log(n, d, sigma)."""
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    t = float(t)
    if t < t0_log(n, d, sigma):
        raise ValueError("log tail bound requires t >= %g, got t = %g"
                         % (t0_log(n, d, sigma), t))
    return math.exp(math.log(13.0 * d * n / sigma) - t)


def uniform_expectation_bound(n, d, sigma):
    """Upper bound on E[ln C] under the uniform cap law."""
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    return (2.0 * math.log(n) + 2.0 * math.log(d)
            + 2.0 * math.log(1.0 / sigma) + 5.0)


def smoothness_alpha(n, beta):
    """Smoothness exponent alpha = 1 - beta/n of the pole law."""
    n = _check_n(n)
    beta = _check_beta(n, beta)
    return 1.0 - beta / n


def smoothness_ratio(law, rho):
    """log mu(B(a, rho)) / log nu(B(a, rho)) for the law against uniform.

    Tends to alpha = 1 - beta/n as rho -> 0.  Requires 0 < rho < sigma
    so both logs are negative.
    """
    sigma = law.cap.sigma
    rho = float(rho)
    if not (0.0 < rho < sigma):
        raise ValueError("rho must lie strictly inside (0, sigma)")
    num = law.log_radial_cdf(rho)
    den = log_cap_integral(law.cap.n, rho) - log_cap_integral(law.cap.n,
                                                              sigma)
    if num >= 0.0 or den >= 0.0:
        raise ValueError("rho too close to sigma for a meaningful ratio")
    return num / den


def _q(n):
    return 2.0 / (math.pi * n)


def rho_eps(n, beta, sigma, H, eps):
    """Radius below which the pole mass is provably alpha-smooth.

    rho_eps = sigma * ((1/H) sqrt(1 - q^lam))^(1/(eps n)) * q^(lam/2)
    with q = 2/(pi n) and lam = (1 - beta/n - eps)/(eps n).  Always lies
    strictly between 0 and sigma.
    """
    n = _check_n(n)
    beta = _check_beta(n, beta)
    sigma = _check_sigma(sigma)
    H = _check_H(H)
    eps = _check_eps(n, beta, eps)
    q = _q(n)
    lam = (1.0 - beta / n - eps) / (eps * n)
    # 1 - q^lam via expm1 keeps precision when q^lam is close to 1
    one_minus = -math.expm1(lam * math.log(q))
    log_first = (math.log(1.0 / H) + 0.5 * math.log(one_minus)) / (eps * n)
    log_second = 0.5 * lam * math.log(q)
    return sigma * math.exp(log_first + log_second)


def delta_eps(n, beta, sigma, H, eps):
    """Uniform mass of the sub-cap of radius rho_eps: I_n(rho)/I_n(sigma)."""
    rho = rho_eps(n, beta, sigma, H, eps)
    return math.exp(log_cap_integral(n, rho) - log_cap_integral(n, sigma))


def t_eps(n, d, sigma, delta_e):
    """Threshold ln(13 d n / (sigma delta_e)) of the boosted tail bound."""
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    delta_e = float(delta_e)
    if not (0.0 < delta_e < 1.0):
        raise ValueError("delta_e must lie in (0, 1), got %r" % (delta_e,))
    return math.log(13.0 * d * n / sigma) - math.log(delta_e)


def boosted_tail_bound(n, d, sigma, beta, t):
    """((13 d n / sigma) e^(-t))^(alpha/2) with alpha = 1 - beta/n.

    Valid for t >= t_eps at eps = alpha/2 (the choice made once and for
    all in the tail theorem).  t_eps grows with the profile sup H, so the
    guard here uses H = 1, the smallest admissible threshold; callers
    with H > 1 must check their own t_eps.
    """
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    beta = _check_beta(n, beta)
    t = float(t)
    alpha = 1.0 - beta / n
    thr = t_eps(n, d, sigma, delta_eps(n, beta, sigma, 1.0, 0.5 * alpha))
    if t < thr:
        raise ValueError("boosted tail bound requires t >= t_eps = %g, "
                         "got t = %g" % (thr, t))
    return math.exp(0.5 * alpha * (math.log(13.0 * d * n / sigma) - t))


def adversarial_expectation_bound(n, d, sigma, beta, H):
    """Stated upper bound on E[ln C] under the pole law."""
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    beta = _check_beta(n, beta)
    H = _check_H(H)
    alpha = 1.0 - beta / n
    lead = (2.0 * math.log(n) + math.log(d) + math.log(1.0 / sigma)
            + math.log(13.0 * math.pi / 2.0))
    inner = 2.0 * math.e * H * H * n / math.log(math.pi * n / 2.0)
    return lead + math.log(inner) / alpha


def adversarial_expectation_bound_proof_chain(n, d, sigma, beta, H):
    """Sharper intermediate form of the expectation bound.

    Same leading terms, but the final simplification is not applied:
    the alpha-dependent term is kept as
    (2/alpha) (ln(H / sqrt(1 - q^(1/n))) + sqrt(1 - q^(1/n)) / H).
    """
    n = _check_n(n)
    d = _check_d(d)
    sigma = _check_sigma(sigma)
    beta = _check_beta(n, beta)
    H = _check_H(H)
    alpha = 1.0 - beta / n
    q = _q(n)
    root = math.sqrt(-math.expm1(math.log(q) / n))
    lead = (2.0 * math.log(n) + math.log(d) + math.log(1.0 / sigma)
            + math.log(13.0 * math.pi / 2.0))
    return lead + (2.0 / alpha) * (math.log(H / root) + root / H)


def expectation_bound_gap(n, d, sigma):
    """Pole-law bound at beta = 0, H = 1 minus the uniform bound.

    The two theorems overlap there but were derived separately, so the
    gap quantifies the slack of the boosted route; it is reported, not
    asserted to have a sign.
    """
    return (adversarial_expectation_bound(n, d, sigma, 0.0, 1.0)
            - uniform_expectation_bound(n, d, sigma))


def boosting_check(n, beta, sigma, H, eps, rho, slack=1e-12):
    """Core smoothness inequality behind the tail boosting, in log space.

    Checks  H * I_m(rho) / I_m(sigma) <= (I_n(rho) / I_n(sigma))^(1-beta/n-eps)
    with m = n - beta, for 0 < rho <= rho_eps.  Returns True when the
    inequality holds within an additive log-space slack.
    """
    n = _check_n(n)
    beta = _check_beta(n, beta)
    sigma = _check_sigma(sigma)
    H = _check_H(H)
    eps = _check_eps(n, beta, eps)
    rho = float(rho)
    rmax = rho_eps(n, beta, sigma, H, eps)
    if not (0.0 < rho <= rmax * (1.0 + 1e-12)):
        raise ValueError("rho must lie in (0, rho_eps], rho_eps = %g" % rmax)
    m = n - beta
    lhs = (math.log(H) + log_cap_integral(m, rho)
           - log_cap_integral(m, sigma))
    rhs = (1.0 - beta / n - eps) * (log_cap_integral(n, rho)
                                    - log_cap_integral(n, sigma))
    return lhs <= rhs + slack * max(1.0, abs(rhs))


def small_calc_check(n):
    """Check (1 - q^(1/n))^(-1/2) <= sqrt(2n / ln(pi n / 2)), q = 2/(pi n).

    Equivalent to 1 - q^(1/n) >= ln(pi n / 2) / (2 n); evaluated in the
    stable expm1 form.
    """
    n = _check_n(n)
    q = _q(n)
    one_minus = -math.expm1(math.log(q) / n)
    return one_minus >= math.log(math.pi * n / 2.0) / (2.0 * n)


@dataclass
class DeltaSandwichRow:
    n: int
    beta: float
    sigma: float
    H: float
    value: float
    lower: float
    upper: float
    lower_ok: bool
    upper_ok: bool


def delta_eps_sandwich(n, beta, sigma, H, slack=1e-12):
    """delta_eps at eps = alpha/2 against its closed-form sandwich.

    The sandwich is   q * X^(2/alpha) <= delta_eps <= X^(2/alpha)
    with q = 2/(pi n) and X = (1/H) sqrt(1 - q^(1/n)); both sides are
    sigma-free.  Compared in log space with additive slack.  Nothing is
    asserted: the lower bound genuinely fails for sigma = 1 at small n,
    and callers decide how to treat that.
    """
    n = _check_n(n)
    beta = _check_beta(n, beta)
    sigma = _check_sigma(sigma)
    H = _check_H(H)
    alpha = 1.0 - beta / n
    eps = 0.5 * alpha
    rho = rho_eps(n, beta, sigma, H, eps)
    log_value = log_cap_integral(n, rho) - log_cap_integral(n, sigma)
    q = _q(n)
    log_x = math.log(1.0 / H) + 0.5 * math.log(-math.expm1(math.log(q) / n))
    log_upper = (2.0 / alpha) * log_x
    log_lower = math.log(q) + log_upper
    tol_lo = slack * max(1.0, abs(log_lower))
    tol_hi = slack * max(1.0, abs(log_upper))
    return DeltaSandwichRow(
        n=n, beta=beta, sigma=sigma, H=H,
        value=math.exp(log_value),
        lower=math.exp(log_lower),
        upper=math.exp(log_upper),
        lower_ok=bool(log_value >= log_lower - tol_lo),
        upper_ok=bool(log_value <= log_upper + tol_hi),
    )


def t_eps_exceeds_t0(n, d, sigma, beta, H):
    """True when the boosted threshold exceeds the exponential-form t0."""
    alpha = smoothness_alpha(n, beta)
    delta = delta_eps(n, beta, sigma, H, 0.5 * alpha)
    return t_eps(n, d, sigma, delta) > t0_log(n, d, sigma)


@dataclass(frozen=True)
class BoostParams:
    """One point of the boosting parameter grid."""
    n: int
    beta: float
    sigma: float
    H: float
    eps: float

    def __post_init__(self):
        _check_n(self.n)
        _check_beta(self.n, self.beta)
        _check_sigma(self.sigma)
        _check_H(self.H)
        _check_eps(self.n, self.beta, self.eps)

    @property
    def alpha(self):
        return 1.0 - self.beta / self.n

    def rho(self):
        return rho_eps(self.n, self.beta, self.sigma, self.H, self.eps)

    def delta(self):
        return delta_eps(self.n, self.beta, self.sigma, self.H, self.eps)


def default_grid():
    """The default boosting parameter grid, as a list of BoostParams."""
    grid = []
    for n in DEFAULT_N:
        for bf in DEFAULT_BETA_FRACTIONS:
            beta = bf * n
            alpha = 1.0 - bf
            for H in DEFAULT_H:
                for sigma in DEFAULT_SIGMA:
                    for ef in DEFAULT_EPS_FRACTIONS:
                        grid.append(BoostParams(n=n, beta=beta, sigma=sigma,
                                                H=H, eps=ef * alpha))
    return grid


def ball_maximizer_check(law, shells, slack=1e-12):
    """Among unions of radial shells of fixed uniform mass, the centered
    ball carries the most law mass.

    shells is an iterable of disjoint (lo, hi) intervals inside
    [0, sigma].  All measures are computed by adaptive quadrature in the
    angle variable (independent of the closed-form CDF machinery); the
    matching ball radius solves nu(B(rho)) = nu(S) by root finding.
    Returns True when mu(S) <= mu(B(rho)) + slack.
    """
    sigma = law.cap.sigma
    n = law.cap.n
    m = n - law.beta
    h = law.profile

    pairs = [(float(lo), float(hi)) for lo, hi in shells]
    for lo, hi in pairs:
        if not (0.0 <= lo < hi <= sigma):
            raise ValueError("shell (%g, %g) not inside [0, sigma]" % (lo, hi))
    ordered = sorted(pairs)
    for (_, hi_prev), (lo_next, _) in zip(ordered, ordered[1:]):
        if lo_next < hi_prev:
            raise ValueError("shells overlap")

    def nu_w(theta):
        return math.sin(theta) ** (n - 1)

    def mu_w(theta):
        s = math.sin(theta)
        return float(h(s)) * s ** (m - 1.0)

    def integral(w, lo, hi):
        val, _ = integrate.quad(w, math.asin(lo), math.asin(hi),
                                epsabs=1e-14, epsrel=1e-12, limit=200)
        return val

    nu_total = integral(nu_w, 0.0, sigma)
    mu_total = integral(mu_w, 0.0, sigma)
    nu_s = sum(integral(nu_w, lo, hi) for lo, hi in pairs) / nu_total
    mu_s = sum(integral(mu_w, lo, hi) for lo, hi in pairs) / mu_total

    if nu_s >= 1.0:
        return mu_s <= 1.0 + slack

    def gap(rho):
        return integral(nu_w, 0.0, rho) / nu_total - nu_s

    rho_star = optimize.brentq(gap, 0.0, sigma, xtol=1e-15, rtol=8.9e-16)
    mu_ball = integral(mu_w, 0.0, rho_star) / mu_total
    return bool(mu_s <= mu_ball + slack)
