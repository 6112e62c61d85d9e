"""FD-tier density optimization for network-wide secrecy throughput.

The single-stream problem is quasi-concave: the optimal density is the root
of a stationarity equation, found by bisection inside [lambda_lower, +inf)
and clamped by the underlay-tier throughput ceiling.  Multi-stream jamming
(n_j >= 2) has no closed threshold inversion, so the maximizer falls back to
a log-spaced exhaustive search refined by golden section.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import threshold_beta_e, threshold_beta_t
from .config import NetworkConfig
from .errors import BracketError, InfeasibleTargetError, NumericError
from .mathcore import c_alpha_n, k_alpha_n

_GRID_POINTS = 512
_GRID_SPAN = 1e-6  # search grid starts at lambda_upper * span
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class QoSTargets:
    """Connection, secrecy-outage, and underlay-throughput targets.

    sigma / sigma_c are the FD / HD connection probabilities, epsilon the
    secrecy-outage ceiling, t_c the HD network-wide throughput floor in
    bits/s/Hz per unit area.
    """

    sigma: float = 0.9
    sigma_c: float = 0.9
    epsilon: float = 0.1
    t_c: float = 1e-3

    def __post_init__(self):
        for name in ("sigma", "sigma_c", "epsilon"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0,1)")
        if self.t_c < 0.0:
            raise ValueError("t_c must be >= 0")

    def beta_c_star(self, cfg: NetworkConfig) -> float:
        """Underlay SIR threshold implied by the throughput floor t_c."""
        if self.t_c == 0.0:
            return 0.0
        if cfg.lambda_h == 0.0:
            raise InfeasibleTargetError(
                "a positive underlay throughput floor requires lambda_h > 0"
            )
        return 2.0 ** (self.t_c / (cfg.lambda_h * self.sigma_c)) - 1.0


@dataclass(frozen=True)
class ThroughputSolution:
    """Solver output; lambda_f_star is None when no density yields T_s > 0."""

    feasible: bool
    lambda_f_star: float | None
    t_s_star: float
    rate_triple: tuple[float, float, float] | None


@dataclass(frozen=True)
class OptimizerConstants:
    """Constants of the reduced objective F(l) = l * ln(f1(l)/f2(l)).

    f1(l) = 1 + x (1 + y l)^(-alpha/2) carries the connection threshold,
    f2(l) = 1 + z l^(-alpha/2) the secrecy threshold; z (and hence
    lambda_lower) exists only for single-stream jamming.  Values are for
    the mode of the config they were built from.
    """

    x: float
    y: float
    z: float | None
    lambda_lower: float | None
    lambda_upper: float

    @classmethod
    def from_config(cls, targets: QoSTargets, cfg: NetworkConfig) -> "OptimizerConstants":
        d = cfg.delta
        c2 = c_alpha_n(cfg.alpha, 2)
        if cfg.lambda_h <= 0.0:
            raise InfeasibleTargetError("the density optimization requires lambda_h > 0")
        if cfg.multi_antenna:
            k_conn = k_alpha_n(cfg.alpha, cfg.n_f - cfg.n_t)
            cj = c_alpha_n(cfg.alpha, cfg.n_j + 1)
            y = (c2 + cj * (cfg.p_tf / cfg.n_j) ** d) / (c2 * cfg.p_hf**d * cfg.lambda_h)
        else:
            k_conn = k_alpha_n(cfg.alpha, cfg.n_f - 2)
            y = (1.0 + cfg.p_tf**d) / (cfg.p_hf**d * cfg.lambda_h)
        x = (
            (1.0 - targets.sigma)
            / (c2 * cfg.d_f**2 * k_conn * cfg.p_hf**d * cfg.lambda_h)
        ) ** (cfg.alpha / 2.0)

        z = lam_lo = None
        if cfg.n_j == 1:
            ell = math.log(1.0 / (1.0 - targets.epsilon))
            z = (math.pi * cfg.lambda_e * cfg.n_e / (c2 * ell)) ** (
                cfg.alpha / 2.0
            ) / cfg.p_tf
            if z == 0.0:
                lam_lo = 0.0
            else:
                margin = (x / z) ** d - y
                lam_lo = 1.0 / margin if margin > 0.0 else math.inf

        lam_up = _lambda_upper(targets, cfg)
        return cls(x=x, y=y, z=z, lambda_lower=lam_lo, lambda_upper=lam_up)


def _lambda_upper(targets: QoSTargets, cfg: NetworkConfig) -> float:
    """Largest FD density the underlay tier tolerates at (sigma_c, t_c)."""
    beta_c = targets.beta_c_star(cfg)
    if beta_c == 0.0:
        return math.inf
    d = cfg.delta
    c2 = c_alpha_n(cfg.alpha, 2)
    k_h = k_alpha_n(cfg.alpha, cfg.n_h)
    budget = (1.0 - targets.sigma_c) / (cfg.d_h**2 * k_h) * beta_c**-d
    if cfg.multi_antenna:
        cj = c_alpha_n(cfg.alpha, cfg.n_j + 1)
        upper = (budget - c2 * cfg.lambda_h) / (
            c2 * cfg.p_fh**d + cj * (cfg.p_th / cfg.n_j) ** d
        )
    else:
        upper = (budget / c2 - cfg.lambda_h) / (cfg.p_th**d + cfg.p_fh**d)
    if upper <= 0.0:
        raise InfeasibleTargetError(
            "underlay tier cannot tolerate any FD deployment at the requested floor"
        )
    return upper


def feasibility(targets: QoSTargets, cfg: NetworkConfig) -> bool:
    """Whether (sigma, epsilon) admit any density with positive secrecy throughput.

    Closed form for single-stream jamming:
    (1-sigma) ln(1/(1-epsilon)) must exceed
    pi lambda_e n_e d_f^2 K (1 + p_tf^-delta).
    """
    if cfg.n_j != 1:
        raise ValueError("closed-form feasibility requires a single jamming stream")
    d = cfg.delta
    order = cfg.n_f - cfg.n_t if cfg.multi_antenna else cfg.n_f - 2
    lhs = (1.0 - targets.sigma) * math.log(1.0 / (1.0 - targets.epsilon))
    rhs = (
        math.pi
        * cfg.lambda_e
        * cfg.n_e
        * cfg.d_f**2
        * k_alpha_n(cfg.alpha, order)
        * (1.0 + cfg.p_tf**-d)
    )
    return lhs > rhs


def lambda_bounds(targets: QoSTargets, cfg: NetworkConfig) -> tuple[float, float]:
    """(lambda_lower, lambda_upper) of the feasible density window.

    lambda_lower is infinite when the targets are infeasible; raises
    InfeasibleTargetError when the underlay tier rules out any deployment.
    """
    consts = OptimizerConstants.from_config(targets, cfg)
    lower = consts.lambda_lower if consts.lambda_lower is not None else 0.0
    return lower, consts.lambda_upper


def _f1(lam: float, consts: OptimizerConstants, alpha: float) -> float:
    return 1.0 + consts.x * (1.0 + consts.y * lam) ** (-alpha / 2.0)


def _f2(lam: float, consts: OptimizerConstants, alpha: float) -> float:
    return 1.0 + consts.z * lam ** (-alpha / 2.0)


def density_objective(lam: float, consts: OptimizerConstants, alpha: float) -> float:
    """Reduced objective F(l) = l ln(f1/f2); T_s = sigma/ln2 * max(F, 0)."""
    return lam * math.log(_f1(lam, consts, alpha) / _f2(lam, consts, alpha))


def stationarity_lhs(lam: float, consts: OptimizerConstants, alpha: float) -> float:
    """First-order condition of the reduced objective (positive below the optimum).

    ln(f1/f2) + (alpha/2) [f1 (f2 - 1) - l (f1 - f2) y] / (f1 f2 (1 + l y)).
    """
    f1 = _f1(lam, consts, alpha)
    f2 = _f2(lam, consts, alpha)
    correction = (
        0.5
        * alpha
        * (f1 * (f2 - 1.0) - lam * (f1 - f2) * consts.y)
        / (f1 * f2 * (1.0 + lam * consts.y))
    )
    return math.log(f1 / f2) + correction


def stationarity_root(consts: OptimizerConstants, alpha: float) -> float:
    """Unique interior root of the stationarity equation, by bisection.

    The bracket opens just above lambda_lower (where the condition is
    positive) and doubles until the sign flips; resolved to 1e-10 relative.
    """
    lam_lo = consts.lambda_lower
    lo = lam_lo * (1.0 + 1e-9) if lam_lo > 0.0 else 1e-18
    if stationarity_lhs(lo, consts, alpha) <= 0.0:
        raise NumericError("stationarity condition not positive at the bracket edge")
    hi = max(2.0 * lam_lo, 2.0 * lo)
    for _ in range(60):
        if stationarity_lhs(hi, consts, alpha) < 0.0:
            break
        hi *= 2.0
    else:
        raise NumericError("no sign change found while expanding the bracket")
    while hi - lo > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if stationarity_lhs(mid, consts, alpha) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_INFEASIBLE = ThroughputSolution(
    feasible=False, lambda_f_star=None, t_s_star=0.0, rate_triple=None
)


def throughput(lambda_f: float, targets: QoSTargets, cfg: NetworkConfig) -> float:
    """Network-wide secrecy throughput at one FD-tier density.

    lambda_f sigma [log2(1+beta_t*) - log2(1+beta_e*)]^+ with the
    mode-appropriate threshold inversions; 0 when the secrecy rate collapses
    or the outage target is unreachable at this density.
    """
    if lambda_f <= 0.0:
        raise ValueError("lambda_f must be > 0")
    at = cfg.replace(lambda_f=lambda_f)
    beta_t = threshold_beta_t(targets.sigma, at)
    try:
        beta_e = threshold_beta_e(targets.epsilon, at)
    except BracketError:
        return 0.0
    rate = math.log2(1.0 + beta_t) - math.log2(1.0 + beta_e)
    return lambda_f * targets.sigma * max(rate, 0.0)


def _solution_at(lam: float, targets: QoSTargets, cfg: NetworkConfig) -> ThroughputSolution:
    at = cfg.replace(lambda_f=lam)
    beta_t = threshold_beta_t(targets.sigma, at)
    beta_e = threshold_beta_e(targets.epsilon, at)
    r_t = math.log2(1.0 + beta_t)
    r_e = math.log2(1.0 + beta_e)
    r_s = max(r_t - r_e, 0.0)
    return ThroughputSolution(
        feasible=True,
        lambda_f_star=lam,
        t_s_star=lam * targets.sigma * r_s,
        rate_triple=(r_t, r_e, r_s),
    )


def _solve_single_stream(targets: QoSTargets, cfg: NetworkConfig) -> ThroughputSolution:
    try:
        consts = OptimizerConstants.from_config(targets, cfg)
    except InfeasibleTargetError:
        return _INFEASIBLE
    if not math.isfinite(consts.lambda_lower) or consts.lambda_lower > consts.lambda_upper:
        return _INFEASIBLE
    lam_star = stationarity_root(consts, cfg.alpha)
    return _solution_at(min(lam_star, consts.lambda_upper), targets, cfg)


def _solve_multi_stream(targets: QoSTargets, cfg: NetworkConfig) -> ThroughputSolution:
    try:
        lam_up = _lambda_upper(targets, cfg)
    except InfeasibleTargetError:
        return _INFEASIBLE
    if not math.isfinite(lam_up):
        # no underlay ceiling: search within a generous window above lambda_h
        lam_up = max(cfg.lambda_h, cfg.lambda_e, 1e-6) * 1e4
    grid = np.geomspace(lam_up * _GRID_SPAN, lam_up, _GRID_POINTS)
    values = np.array([throughput(lam, targets, cfg) for lam in grid])
    best = int(np.argmax(values))
    if values[best] <= 0.0:
        return _INFEASIBLE

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = throughput(c, targets, cfg), throughput(d, targets, cfg)
    while b - a > 1e-6 * b:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = throughput(c, targets, cfg)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = throughput(d, targets, cfg)
    lam_star = min(0.5 * (a + b), lam_up)
    return _solution_at(lam_star, targets, cfg)


def solve_optimal_density(targets: QoSTargets, cfg: NetworkConfig) -> ThroughputSolution:
    """Maximize network-wide secrecy throughput over the FD-tier density.

    Single jamming stream: bisection of the stationarity equation, clamped
    to the underlay ceiling.  n_j >= 2: log-spaced exhaustive search over
    (0, lambda_upper] with golden-section refinement.
    """
    if cfg.n_j == 1:
        return _solve_single_stream(targets, cfg)
    return _solve_multi_stream(targets, cfg)
