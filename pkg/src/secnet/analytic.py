"""Closed-form connection/secrecy-outage expressions and threshold inversions.

All functions are pure in (scalar inputs, NetworkConfig) and safe for
concurrent evaluation.  Approximations return the raw formula value, which
can fall below 0 outside the large-probability regime; clamping is left to
presentation layers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .config import NetworkConfig
from .errors import BracketError, QuadratureError
from .mathcore import (
    c_alpha_n,
    k_alpha_n,
    partitions,
    upsilon,
    xi_coefficient,
    xi_coefficient_limit,
    exp_derivative,
)

# Angular quadrature: the integrands are smooth 2pi-periodic functions of
# theta, so a midpoint rule converges spectrally.  Nodes cover (0, pi) and
# symmetry in cos(theta) supplies the other half circle.
_N_THETA = 256


@lru_cache(maxsize=8)
def _cos_theta_nodes(n: int = _N_THETA) -> np.ndarray:
    theta = (np.arange(n) + 0.5) * (math.pi / n)
    return np.cos(theta)

# Adaptive Gauss-Kronrod tolerances for the radial axis.
_QUAD_EPSABS = 1e-10
_QUAD_EPSREL = 1e-8


def _quad(func, lo, hi, **kw):
    """scipy.integrate.quad wrapper that converts non-convergence into errors."""
    out = integrate.quad(
        func, lo, hi, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL,
        limit=200, full_output=1, **kw,
    )
    value, abserr = out[0], out[1]
    if len(out) > 3:
        raise QuadratureError(
            f"radial quadrature failed on [{lo}, {hi}]: {out[3]}",
            achieved_tolerance=abserr,
        )
    return value, abserr


@dataclass(frozen=True)
class LambdaCoefficients:
    """Interference coefficients multiplying beta^delta in the closed forms.

    lambda_f_lower_coeff drives the tight (lower-bound) connection series,
    lambda_f_upper_coeff the optimistic one (single-antenna jamming only),
    lambda_h_coeff the underlay-tier connection approximation.
    """

    lambda_f_lower_coeff: float
    lambda_f_upper_coeff: float | None
    lambda_h_coeff: float

    @classmethod
    def from_config(cls, cfg: NetworkConfig) -> "LambdaCoefficients":
        d = cfg.delta
        c2 = c_alpha_n(cfg.alpha, 2)
        if cfg.multi_antenna:
            cj = c_alpha_n(cfg.alpha, cfg.n_j + 1)
            lower = (
                c2 * cfg.p_hf**d * cfg.lambda_h
                + c2 * cfg.lambda_f
                + cj * (cfg.p_tf / cfg.n_j) ** d * cfg.lambda_f
            ) * cfg.d_f**2
            hd = (
                c2 * cfg.lambda_h
                + c2 * cfg.p_fh**d * cfg.lambda_f
                + cj * (cfg.p_th / cfg.n_j) ** d * cfg.lambda_f
            ) * cfg.d_h**2
            return cls(lower, None, hd)
        lower = c2 * cfg.d_f**2 * (
            cfg.p_hf**d * cfg.lambda_h + (1.0 + cfg.p_tf**d) * cfg.lambda_f
        )
        upper = c2 * cfg.d_f**2 * (
            cfg.p_hf**d * cfg.lambda_h
            + 0.5 * (1.0 + d) * (1.0 + cfg.p_tf**d) * cfg.lambda_f
        )
        hd = c2 * (
            cfg.lambda_h + (cfg.p_fh**d + cfg.p_th**d) * cfg.lambda_f
        ) * cfg.d_h**2
        return cls(lower, upper, hd)


def _require_single_antenna(cfg: NetworkConfig, what: str) -> None:
    if cfg.multi_antenna:
        raise ValueError(f"{what} is defined for single-antenna jamming (n_t = 1) only")


# ---------------------------------------------------------------------------
# Interference Laplace exponent and the exact connection probability
# ---------------------------------------------------------------------------

def _eta_h_derivative(s: float, cfg: NetworkConfig, order: int) -> float:
    """order-th s-derivative of the underlay-tier exponent -lambda_h C (p_h s)^d."""
    d = cfg.delta
    coeff = -cfg.lambda_h * c_alpha_n(cfg.alpha, 2) * cfg.p_h**d
    fall = 1.0
    for i in range(order):
        fall *= d - i
    return coeff * fall * s ** (d - order)

def _eta_f_integrand(r: float, s: float, cfg: NetworkConfig, order: int) -> float:
    """Radial integrand of the FD-tier exponent derivative at distance r.

    Distances to an interfering pair's data and jamming antennas are tied
    through the pair geometry: d(r, theta)^2 = r^2 + d_f^2 - 2 r d_f cos(theta).
    The order-th derivative of 1/((1+xs)(1+ys)) is evaluated through the
    Leibniz form (-1)^m m! u v sum_k t_x^k t_y^(m-k) with t = x/(1+xs),
    which stays finite and cancellation-free for any x, y >= 0.
    """
    if r == 0.0:
        return 0.0
    cos_t = _cos_theta_nodes()
    d2 = r * r + cfg.d_f**2 - 2.0 * r * cfg.d_f * cos_t
    d_alpha = np.maximum(d2, 0.0) ** (cfg.alpha / 2.0)
    r_alpha = r**cfg.alpha
    u = r_alpha / (r_alpha + cfg.p_f * s)
    v = d_alpha / (d_alpha + cfg.p_t * s)
    if order == 0:
        mean = float(np.mean(1.0 - u * v))
        return -2.0 * math.pi * r * mean
    t_x = cfg.p_f / (r_alpha + cfg.p_f * s)
    t_y = cfg.p_t / (d_alpha + cfg.p_t * s)
    acc = np.zeros_like(t_y)
    for k in range(order + 1):
        acc += t_x**k * t_y ** (order - k)
    sign = -1.0 if order % 2 else 1.0
    mean = float(np.mean(u * v * acc))
    return 2.0 * math.pi * r * sign * math.factorial(order) * mean


def _algebraic_tail(f, start: float, alpha: float) -> float:
    """Integral of f over [start, inf) for integrands decaying like r^(1-alpha).

    The substitution r = start * u^(-1/(alpha-2)) maps the tail onto (0, 1]
    and turns the algebraic decay into an integrand with a finite limit at
    u = 0, which the adaptive rule resolves without endpoint trouble.
    """
    power = 1.0 / (alpha - 2.0)

    def transformed(u: float) -> float:
        if u == 0.0:
            return 0.0
        r = start * u**-power
        return f(r) * start * power * u ** (-power - 1.0)

    value, _ = _quad(transformed, 0.0, 1.0)
    return value


def _eta_f_derivative(s: float, cfg: NetworkConfig, order: int) -> float:
    if cfg.lambda_f == 0.0 or s == 0.0:
        return 0.0
    scale = max(
        4.0 * cfg.d_f,
        4.0 * (cfg.p_f * s) ** (1.0 / cfg.alpha),
        4.0 * (cfg.p_t * s) ** (1.0 / cfg.alpha),
    )
    f = lambda r: _eta_f_integrand(r, s, cfg, order)
    total = 0.0
    for lo, hi in ((0.0, cfg.d_f), (cfg.d_f, scale)):
        value, _ = _quad(f, lo, hi)
        total += value
    total += _algebraic_tail(f, scale, cfg.alpha)
    return cfg.lambda_f * total


def laplace_exponent_if(s: float, cfg: NetworkConfig, order: int = 0) -> float:
    """order-th s-derivative of the total interference log-Laplace exponent.

    The exponent eta(s) is the sum of the closed-form underlay-tier part and
    the pair-correlated FD-tier double integral; order 0 returns eta(s)
    itself (0 at s = 0), higher orders differentiate under the integral sign.
    """
    _require_single_antenna(cfg, "the interference Laplace exponent")
    if s < 0:
        raise ValueError(f"transform variable must be >= 0, got {s}")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    if s == 0.0:
        if order == 0:
            return 0.0
        raise ValueError("exponent derivatives diverge at s = 0")
    eta_h = _eta_h_derivative(s, cfg, order) if cfg.lambda_h > 0 else 0.0
    return eta_h + _eta_f_derivative(s, cfg, order)


def connection_probability_exact(beta_t: float, cfg: NetworkConfig) -> float:
    """Exact connection probability of the typical FD receiver.

    Assembles sum_{m=0}^{n_f-3} ((-1)^m / m!) s^m (d/ds)^m exp(eta(s)) at
    s = d_f^alpha beta_t / p_f from the exponent derivatives via complete
    Bell polynomials.
    """
    _require_single_antenna(cfg, "the exact connection probability")
    if beta_t <= 0.0:
        return 1.0
    if cfg.lambda_h == 0.0 and cfg.lambda_f == 0.0:
        return 1.0
    s = cfg.d_f**cfg.alpha * beta_t / cfg.p_f
    top = cfg.n_f - 3
    derivs = [laplace_exponent_if(s, cfg, order=m) for m in range(top + 1)]
    total = 0.0
    for m in range(top + 1):
        sign = -1.0 if m % 2 else 1.0
        total += sign / math.factorial(m) * s**m * exp_derivative(derivs[: m + 1])
    return total


# ---------------------------------------------------------------------------
# Closed-form bounds and large-probability approximations
# ---------------------------------------------------------------------------

def _bound_series(coeff: float, beta: float, delta_value: float, top: int) -> float:
    """exp(-coeff*beta^d) * (1 + sum_{m=1}^{top} (1/m!) sum_n (d*coeff*beta^d)^n Y_{m,n})."""
    load = coeff * beta**delta_value
    series = 1.0
    for m in range(1, top + 1):
        inner = 0.0
        for n in range(1, m + 1):
            inner += (delta_value * load) ** n * upsilon(m, n, delta_value)
        series += inner / math.factorial(m)
    return math.exp(-load) * series


def connection_probability_bound(
    beta_t: float, cfg: NetworkConfig, side: str = "lower"
) -> float:
    """Closed-form connection-probability bound of the typical FD receiver.

    Single-antenna jamming admits both sides (they share one series with
    different interference coefficients); multi-antenna jamming has a lower
    bound only, with the series truncated at n_f - n_t - 1.
    """
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    lam = LambdaCoefficients.from_config(cfg)
    if cfg.multi_antenna:
        if side == "upper":
            raise ValueError("no upper bound exists for multi-antenna jamming")
        coeff = lam.lambda_f_lower_coeff
        top = cfg.n_f - cfg.n_t - 1
    else:
        coeff = lam.lambda_f_lower_coeff if side == "lower" else lam.lambda_f_upper_coeff
        top = cfg.n_f - 3
    if beta_t <= 0.0 or coeff == 0.0:
        return 1.0
    return _bound_series(coeff, beta_t, cfg.delta, top)


def fd_connection_approx(
    beta_t: float, cfg: NetworkConfig, side: str = "lower"
) -> float:
    """Large-probability-regime linearization 1 - coeff * beta^d * K of the bound.

    `side` picks the single-antenna coefficient; multi-antenna jamming has a
    single coefficient and ignores it.  The raw value is returned even when
    it drops below 0 outside the regime of validity.
    """
    lam = LambdaCoefficients.from_config(cfg)
    if cfg.multi_antenna:
        coeff = lam.lambda_f_lower_coeff
        order = cfg.n_f - cfg.n_t
    else:
        coeff = lam.lambda_f_lower_coeff if side == "lower" else lam.lambda_f_upper_coeff
        order = cfg.n_f - 2
    return 1.0 - coeff * beta_t**cfg.delta * k_alpha_n(cfg.alpha, order)


def hd_connection_approx(beta_c: float, cfg: NetworkConfig) -> float:
    """Large-probability-regime connection approximation for an underlay receiver."""
    lam = LambdaCoefficients.from_config(cfg)
    return 1.0 - lam.lambda_h_coeff * beta_c**cfg.delta * k_alpha_n(cfg.alpha, cfg.n_h)


# ---------------------------------------------------------------------------
# Secrecy outage probability
# ---------------------------------------------------------------------------

def _angular_outage_factor(r: float, i: int, ratio: float, cfg: NetworkConfig) -> float:
    """Angle-averaged w^i/(1+w) with w = ratio * (r/d(r,theta))^alpha, times 2*pi."""
    cos_t = _cos_theta_nodes()
    d2 = r * r + cfg.d_f**2 - 2.0 * r * cfg.d_f * cos_t
    d_alpha = np.maximum(d2, 0.0) ** (cfg.alpha / 2.0)
    r_term = ratio * r**cfg.alpha
    if i == 0:
        vals = d_alpha / (d_alpha + r_term)
    else:
        vals = r_term / (d_alpha + r_term)
    return 2.0 * math.pi * float(np.mean(vals))


def secrecy_outage_exact(beta_e: float, cfg: NetworkConfig) -> float:
    """Exact secrecy outage probability under worst-case multiuser eavesdropping.

    Nested quadrature of the eavesdropper-position integral: angle-averaged
    capture factors against the radial Gaussian kernel exp(-A r^2) with
    A = C_{alpha,2} lambda_f (p_tf beta_e)^delta, truncated where the kernel
    envelope falls below 1e-12 (with a per-moment margin for the r^{2k}
    weights).
    """
    _require_single_antenna(cfg, "the exact secrecy outage probability")
    if cfg.lambda_e == 0.0:
        return 0.0
    if cfg.lambda_f == 0.0:
        return 1.0
    d = cfg.delta
    ratio = cfg.p_tf * beta_e
    big_a = c_alpha_n(cfg.alpha, 2) * cfg.lambda_f * ratio**d

    def moment(k: int, i: int) -> float:
        t_cut = math.log(1e12) + k + 2.0 * k * math.log(2.0 + k)
        r_max = math.sqrt(t_cut / big_a)
        f = lambda r: (
            _angular_outage_factor(r, i, ratio, cfg)
            * r ** (2 * k + 1)
            * math.exp(-big_a * r * r)
        )
        total = 0.0
        # split at the pair distance (integrand kink) unless the Gaussian
        # cutoff lands even closer in
        pieces = (0.0, cfg.d_f, r_max) if cfg.d_f < r_max else (0.0, r_max)
        for lo, hi in zip(pieces[:-1], pieces[1:]):
            value, _ = _quad(f, lo, hi)
            total += value
        return total

    total = 0.0
    for n in range(cfg.n_e):
        for i in range(min(n, 1) + 1):
            k = n - i
            total += big_a**k / math.factorial(k) * moment(k, i)
    return -math.expm1(-cfg.lambda_e * total)


def secrecy_outage_approx(
    beta_e: float, cfg: NetworkConfig, variant: str = "small_df"
) -> float:
    """Closed-form secrecy outage approximations.

    "small_df" is the short-pair-distance limit of the exact expression;
    "large_ne" additionally sends the eavesdropper antenna count to
    infinity, giving the upper envelope used by the threshold inversion.
    Valid for single-antenna jamming or a single jamming stream.
    """
    if variant not in ("small_df", "large_ne"):
        raise ValueError(f"unknown variant {variant!r}")
    if cfg.multi_antenna and cfg.n_j != 1:
        raise ValueError("approximation requires n_t = 1 or n_j = 1")
    if cfg.lambda_e == 0.0:
        return 0.0
    if cfg.lambda_f == 0.0:
        return 1.0
    d = cfg.delta
    denom = c_alpha_n(cfg.alpha, 2) * cfg.lambda_f * cfg.p_tf**d * beta_e**d
    if variant == "large_ne":
        factor = float(cfg.n_e)
    else:
        factor = cfg.n_e - 1 + 1.0 / (1.0 + cfg.p_tf * beta_e)
    return -math.expm1(-math.pi * cfg.lambda_e * factor / denom)


def _partition_row_sum(k: int, n_j: int, delta_value: float, limit: bool) -> float:
    """sum_j (-1)^{parts} parts! Xi_{j,k} over the partition table of k."""
    table = partitions(k)
    total = 0.0
    for j in range(table.row_count):
        parts = table.part_count(j)
        if limit:
            xi = xi_coefficient_limit(j, k, delta_value)
        else:
            xi = xi_coefficient(j, k, n_j, delta_value)
        total += (-1.0) ** parts * math.factorial(parts) * xi
    return total


def secrecy_outage_ma(beta_e: float, cfg: NetworkConfig) -> float:
    """Closed-form secrecy outage with n_j-stream jamming (short-pair-distance form).

    Only the stream count enters, so a single stream reproduces the
    small-distance approximation exactly.  Uses the integer-partition tables
    up to n_e - 1.
    """
    if cfg.lambda_e == 0.0:
        return 0.0
    if cfg.lambda_f == 0.0:
        return 1.0
    d = cfg.delta
    x = cfg.p_tf * beta_e / cfg.n_j
    pre = math.pi * cfg.lambda_e / (c_alpha_n(cfg.alpha, cfg.n_j + 1) * cfg.lambda_f)
    shared = x**-d / (1.0 + x) ** cfg.n_j
    total = 0.0
    for n in range(cfg.n_e):
        for i in range(min(n, cfg.n_j) + 1):
            total += (
                math.comb(cfg.n_j, i)
                * x**i
                * shared
                * _partition_row_sum(n - i, cfg.n_j, d, limit=False)
            )
    return -math.expm1(-pre * total)


def secrecy_outage_ma_limit(beta_e: float, cfg: NetworkConfig) -> float:
    """Stream-count -> infinity limit of the multi-stream secrecy outage."""
    if cfg.lambda_e == 0.0:
        return 0.0
    if cfg.lambda_f == 0.0:
        return 1.0
    d = cfg.delta
    x = cfg.p_tf * beta_e
    pre = cfg.lambda_e / (math.gamma(1.0 - d) * cfg.lambda_f)
    total = 0.0
    for n in range(cfg.n_e):
        for i in range(n + 1):
            total += (
                math.exp(-x)
                * x ** (i - d)
                / math.factorial(i)
                * _partition_row_sum(n - i, 1, d, limit=True)
            )
    return -math.expm1(-pre * total)


# ---------------------------------------------------------------------------
# Threshold inversions
# ---------------------------------------------------------------------------

def threshold_beta_t(sigma: float, cfg: NetworkConfig) -> float:
    """SIR threshold meeting a connection-probability target sigma.

    Inverts the large-probability approximation, so it is accurate for
    sigma close to 1 (not enforced).
    """
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie in (0,1), got {sigma}")
    lam = LambdaCoefficients.from_config(cfg)
    coeff = lam.lambda_f_lower_coeff
    order = cfg.n_f - cfg.n_t if cfg.multi_antenna else cfg.n_f - 2
    denom = coeff * k_alpha_n(cfg.alpha, order)
    if denom == 0.0:
        return math.inf
    return ((1.0 - sigma) / denom) ** (cfg.alpha / 2.0)


def threshold_beta_e(epsilon: float, cfg: NetworkConfig) -> float:
    """SIR threshold meeting a secrecy-outage target epsilon.

    Single jamming stream: closed-form inversion of the many-antenna outage
    envelope.  n_j >= 2: bisection of the monotone-decreasing multi-stream
    outage, bracket expanded geometrically, resolved to 1e-10 relative.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")
    if cfg.n_j == 1:
        ell = math.log(1.0 / (1.0 - epsilon))
        arg = math.pi * cfg.lambda_e * cfg.n_e / (
            c_alpha_n(cfg.alpha, 2) * cfg.lambda_f * ell
        )
        return arg ** (cfg.alpha / 2.0) / cfg.p_tf

    outage = lambda beta: secrecy_outage_ma(beta, cfg)
    lo = hi = 1.0
    for _ in range(200):
        if outage(lo) >= epsilon:
            break
        lo /= 8.0
    else:
        raise BracketError("secrecy outage never reaches the target from below")
    for _ in range(200):
        if outage(hi) <= epsilon:
            break
        hi *= 8.0
    else:
        raise BracketError("secrecy outage never falls below the target")
    while hi - lo > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if outage(mid) >= epsilon:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
