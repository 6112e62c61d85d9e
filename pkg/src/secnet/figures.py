"""Experiment presets and record generation for the CLI report paths.

A "point" bundles the network configuration, the QoS targets, and the three
SIR thresholds.  Figure presets 2-9 reproduce the standard parameter sets of
this model family as data tables (one row per sweep point, one column per
curve quantity); sweep ranges that the presets leave open are documented
defaults here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic, montecarlo, optimizer
from .config import NetworkConfig, dbm_to_linear
from .errors import ConfigError

#: Baseline parameter set (probability figures): path-loss 3.5, all powers
#: 0 dBm, four-antenna receivers, both tier densities 1e-3, unit pair
#: distances, unit SIR thresholds.
BASE_DEFAULTS: dict = {
    "alpha": 3.5,
    "lambda_h": 1e-3,
    "lambda_f": 1e-3,
    "lambda_e": 1e-3,
    "p_h_dbm": 0.0,
    "p_f_dbm": 0.0,
    "p_t_dbm": 0.0,
    "n_f": 4,
    "n_h": 4,
    "n_e": 4,
    "n_t": 1,
    "n_j": 1,
    "d_f": 1.0,
    "d_h": 1.0,
    "beta_t": 1.0,
    "beta_c": 1.0,
    "beta_e": 1.0,
    "sigma": 0.9,
    "sigma_c": 0.9,
    "epsilon": 0.1,
    "t_c": 1e-3,
}

_CONFIG_KEYS = {
    "alpha", "lambda_h", "lambda_f", "lambda_e",
    "n_f", "n_h", "n_e", "n_t", "n_j", "d_f", "d_h",
}
_POWER_DBM_KEYS = {"p_h_dbm": "p_h", "p_f_dbm": "p_f", "p_t_dbm": "p_t"}
_POWER_LINEAR_KEYS = {"p_h", "p_f", "p_t"}
_TARGET_KEYS = {"sigma", "sigma_c", "epsilon", "t_c"}
_THRESHOLD_KEYS = {"beta_t", "beta_c", "beta_e"}
_INT_KEYS = {"n_f", "n_h", "n_e", "n_t", "n_j"}

KNOWN_KEYS = (
    _CONFIG_KEYS | set(_POWER_DBM_KEYS) | _POWER_LINEAR_KEYS
    | _TARGET_KEYS | _THRESHOLD_KEYS
)

SWEEPABLE_KEYS = frozenset(KNOWN_KEYS)


@dataclass(frozen=True)
class ExperimentPoint:
    cfg: NetworkConfig
    targets: optimizer.QoSTargets
    beta_t: float
    beta_c: float
    beta_e: float


def build_point(params: dict) -> ExperimentPoint:
    """Merge user parameters over the defaults and build typed objects."""
    merged = dict(BASE_DEFAULTS)
    for key, value in params.items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown parameter {key!r}")
        merged[key] = value
        if key in _POWER_LINEAR_KEYS:
            # a direct linear power overrides the dBm default
            merged.pop(f"{key}_dbm", None)

    cfg_kwargs = {}
    for key in _CONFIG_KEYS:
        value = merged[key]
        cfg_kwargs[key] = int(value) if key in _INT_KEYS else float(value)
    for dbm_key, lin_key in _POWER_DBM_KEYS.items():
        if dbm_key in merged:
            cfg_kwargs[lin_key] = dbm_to_linear(float(merged[dbm_key]))
    for lin_key in _POWER_LINEAR_KEYS:
        if lin_key in merged:
            cfg_kwargs[lin_key] = float(merged[lin_key])

    try:
        cfg = NetworkConfig(**cfg_kwargs)
        targets = optimizer.QoSTargets(
            sigma=float(merged["sigma"]),
            sigma_c=float(merged["sigma_c"]),
            epsilon=float(merged["epsilon"]),
            t_c=float(merged["t_c"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentPoint(
        cfg=cfg,
        targets=targets,
        beta_t=float(merged["beta_t"]),
        beta_c=float(merged["beta_c"]),
        beta_e=float(merged["beta_e"]),
    )


@dataclass
class FigureData:
    """Rows plus the metadata the plotting layer needs to draw them."""

    name: str
    xkey: str
    xlog: bool
    series_key: str | None
    value_keys: list[str]
    rows: list[dict]
    kind: str = "curves"  # or "grid"
    ylabel: str = ""
    extra_keys: list[str] = field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        cols = []
        if self.series_key:
            cols.append(self.series_key)
        cols.extend(self.extra_keys)
        cols.append(self.xkey)
        cols.extend(self.value_keys)
        return cols


def _mc_settings(trials: int, seed: int, point_index: int, workers: int) -> montecarlo.SimSettings:
    # stable per-point child seed so row order never affects the stream
    return montecarlo.SimSettings(
        trials=trials, seed=seed * 1_000_003 + point_index, workers=workers
    )


def analytic_record(point: ExperimentPoint) -> dict:
    """All closed-form metrics applicable to the point's jamming mode."""
    cfg = point.cfg
    row: dict = {}
    if cfg.multi_antenna:
        row["p_conn_lower"] = analytic.connection_probability_bound(point.beta_t, cfg)
        row["p_conn_approx"] = analytic.fd_connection_approx(point.beta_t, cfg)
        row["p_hd_approx"] = analytic.hd_connection_approx(point.beta_c, cfg)
        row["p_so_ma"] = analytic.secrecy_outage_ma(point.beta_e, cfg)
        row["p_so_ma_limit"] = analytic.secrecy_outage_ma_limit(point.beta_e, cfg)
    else:
        row["p_conn_exact"] = analytic.connection_probability_exact(point.beta_t, cfg)
        row["p_conn_lower"] = analytic.connection_probability_bound(point.beta_t, cfg, "lower")
        row["p_conn_upper"] = analytic.connection_probability_bound(point.beta_t, cfg, "upper")
        row["p_conn_approx"] = analytic.fd_connection_approx(point.beta_t, cfg)
        row["p_hd_approx"] = analytic.hd_connection_approx(point.beta_c, cfg)
        row["p_so_exact"] = analytic.secrecy_outage_exact(point.beta_e, cfg)
        row["p_so_small_df"] = analytic.secrecy_outage_approx(point.beta_e, cfg, "small_df")
        row["p_so_large_ne"] = analytic.secrecy_outage_approx(point.beta_e, cfg, "large_ne")
    return row


def simulate_record(point: ExperimentPoint, sim: montecarlo.SimSettings) -> dict:
    fd = montecarlo.estimate_fd_connection(point.beta_t, point.cfg, sim)
    hd = montecarlo.estimate_hd_connection(point.beta_c, point.cfg, sim)
    so = montecarlo.estimate_secrecy_outage(point.beta_e, point.cfg, sim)
    return {
        "p_conn_fd_mc": fd.value, "p_conn_fd_ci": fd.half_width,
        "p_conn_hd_mc": hd.value, "p_conn_hd_ci": hd.half_width,
        "p_so_mc": so.value, "p_so_ci": so.half_width,
        "trials": sim.trials,
    }


def optimize_record(point: ExperimentPoint) -> dict:
    sol = optimizer.solve_optimal_density(point.targets, point.cfg)
    row = {
        "feasible": int(sol.feasible),
        "lambda_f_star": sol.lambda_f_star if sol.feasible else "",
        "t_s_star": sol.t_s_star,
    }
    if point.cfg.n_j == 1:
        lo, hi = _bounds_or_blank(point)
        row["lambda_lower"], row["lambda_upper"] = lo, hi
    if sol.rate_triple:
        row["r_t"], row["r_e"], row["r_s"] = sol.rate_triple
    else:
        row["r_t"] = row["r_e"] = row["r_s"] = ""
    return row


def _bounds_or_blank(point: ExperimentPoint):
    try:
        lo, hi = optimizer.lambda_bounds(point.targets, point.cfg)
        return (lo if math.isfinite(lo) else "", hi if math.isfinite(hi) else "")
    except Exception:
        return "", ""


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

def _figure_2(trials, seed, points, workers):
    rows = []
    idx = 0
    lam_grid = np.geomspace(1e-4, 1e-2, points)
    for n_f in (3, 4, 6):
        for lam in lam_grid:
            point = build_point({"p_t_dbm": 0.0, "n_t": 1, "n_f": n_f, "lambda_f": lam})
            row = {"n_f": n_f, "lambda_f": lam}
            row["p_conn_lower"] = analytic.connection_probability_bound(1.0, point.cfg, "lower")
            row["p_conn_upper"] = analytic.connection_probability_bound(1.0, point.cfg, "upper")
            row["p_conn_exact"] = analytic.connection_probability_exact(1.0, point.cfg)
            if trials:
                est = montecarlo.estimate_fd_connection(
                    1.0, point.cfg, _mc_settings(trials, seed, idx, workers)
                )
                row["p_conn_mc"], row["mc_half_width"] = est.value, est.half_width
            else:
                row["p_conn_mc"] = row["mc_half_width"] = ""
            rows.append(row)
            idx += 1
    return FigureData(
        name="figure2", xkey="lambda_f", xlog=True, series_key="n_f",
        value_keys=["p_conn_lower", "p_conn_upper", "p_conn_exact", "p_conn_mc", "mc_half_width"],
        rows=rows, ylabel="connection probability",
    )


def _figure_3(trials, seed, points, workers):
    rows = []
    idx = 0
    lam_grid = np.geomspace(1e-4, 1e-2, points)
    for d_f in (0.5, 1.0, 2.0):
        for lam_e in lam_grid:
            point = build_point({
                "p_t_dbm": 10.0, "n_t": 1, "n_e": 4,
                "lambda_f": 1e-3, "lambda_e": lam_e, "d_f": d_f,
            })
            row = {"d_f": d_f, "lambda_e": lam_e}
            row["p_so_exact"] = analytic.secrecy_outage_exact(1.0, point.cfg)
            row["p_so_small_df"] = analytic.secrecy_outage_approx(1.0, point.cfg, "small_df")
            if trials:
                est = montecarlo.estimate_secrecy_outage(
                    1.0, point.cfg, _mc_settings(trials, seed, idx, workers)
                )
                row["p_so_mc"], row["mc_half_width"] = est.value, est.half_width
            else:
                row["p_so_mc"] = row["mc_half_width"] = ""
            rows.append(row)
            idx += 1
    return FigureData(
        name="figure3", xkey="lambda_e", xlog=True, series_key="d_f",
        value_keys=["p_so_exact", "p_so_small_df", "p_so_mc", "mc_half_width"],
        rows=rows, ylabel="secrecy outage probability",
    )


def _figure_4(trials, seed, points, workers):
    rows = []
    base = {
        "p_t_dbm": 20.0, "n_f": 4, "n_t": 1, "n_e": 8,
        "lambda_e": 1e-2, "sigma_c": 0.9, "t_c": 1e-3,
    }
    for sigma in np.linspace(0.55, 0.98, points):
        for eps in np.linspace(0.02, 0.50, points):
            point = build_point({**base, "sigma": float(sigma), "epsilon": float(eps)})
            sol = optimizer.solve_optimal_density(point.targets, point.cfg)
            rows.append({
                "sigma": float(sigma), "epsilon": float(eps),
                "feasible": int(sol.feasible),
                "t_s_star": sol.t_s_star,
            })
    return FigureData(
        name="figure4", xkey="sigma", xlog=False, series_key=None,
        value_keys=["feasible", "t_s_star"], rows=rows, kind="grid",
        extra_keys=["epsilon"], ylabel="max secrecy throughput",
    )


def _figure_5(trials, seed, points, workers):
    rows = []
    idx = 0
    lam_grid = np.geomspace(2e-4, 1e-2, points)
    for n_e in (4, 8):
        for lam_e in (1e-3, 1e-2):
            for lam_f in lam_grid:
                point = build_point({
                    "p_t_dbm": 20.0, "n_t": 1, "n_e": n_e,
                    "lambda_e": lam_e, "lambda_f": lam_f,
                })
                row = {"n_e": n_e, "lambda_e": lam_e, "lambda_f": lam_f}
                row["p_so_small_df"] = analytic.secrecy_outage_approx(1.0, point.cfg, "small_df")
                if trials:
                    est = montecarlo.estimate_secrecy_outage(
                        1.0, point.cfg, _mc_settings(trials, seed, idx, workers)
                    )
                    row["p_so_mc"], row["mc_half_width"] = est.value, est.half_width
                else:
                    row["p_so_mc"] = row["mc_half_width"] = ""
                rows.append(row)
                idx += 1
    return FigureData(
        name="figure5", xkey="lambda_f", xlog=True, series_key="n_e",
        value_keys=["p_so_small_df", "p_so_mc", "mc_half_width"],
        rows=rows, extra_keys=["lambda_e"], ylabel="secrecy outage probability",
    )


def _figure_6(trials, seed, points, workers):
    rows = []
    base = {
        "n_f": 4, "n_t": 1, "n_e": 4, "lambda_e": 1e-3,
        "sigma": 0.9, "sigma_c": 0.9, "epsilon": 0.1, "t_c": 1e-3,
    }
    for lam_f in (5e-4, 1e-3, 2e-3):
        for p_t_dbm in np.linspace(0.0, 40.0, points):
            point = build_point({**base, "lambda_f": lam_f, "p_t_dbm": float(p_t_dbm)})
            try:
                _, lam_up = optimizer.lambda_bounds(point.targets, point.cfg)
            except Exception:
                lam_up = 0.0
            t_s = optimizer.throughput(lam_f, point.targets, point.cfg)
            rows.append({
                "lambda_f": lam_f, "p_t_dbm": float(p_t_dbm),
                "t_s": t_s, "hd_feasible": int(lam_f <= lam_up),
            })
    return FigureData(
        name="figure6", xkey="p_t_dbm", xlog=False, series_key="lambda_f",
        value_keys=["t_s", "hd_feasible"], rows=rows,
        ylabel="secrecy throughput",
    )


def _figure_7(trials, seed, points, workers):
    rows = []
    idx = 0
    for n_j in (1, 3, 5):
        for n_t in range(2, 8):
            if n_j > n_t - 1:
                continue
            point = build_point({
                "p_t_dbm": 20.0, "n_f": 8, "lambda_f": 1e-3,
                "n_t": n_t, "n_j": n_j,
            })
            row = {"n_j": n_j, "n_t": n_t}
            row["p_conn_approx"] = analytic.fd_connection_approx(1.0, point.cfg)
            row["p_conn_lower"] = analytic.connection_probability_bound(1.0, point.cfg)
            if trials:
                est = montecarlo.estimate_fd_connection(
                    1.0, point.cfg, _mc_settings(trials, seed, idx, workers)
                )
                row["p_conn_mc"], row["mc_half_width"] = est.value, est.half_width
            else:
                row["p_conn_mc"] = row["mc_half_width"] = ""
            rows.append(row)
            idx += 1
    return FigureData(
        name="figure7", xkey="n_t", xlog=False, series_key="n_j",
        value_keys=["p_conn_approx", "p_conn_lower", "p_conn_mc", "mc_half_width"],
        rows=rows, ylabel="connection probability",
    )


def _figure_8(trials, seed, points, workers):
    rows = []
    idx = 0
    for n_e in (2, 4):
        for lam_f in (1e-3, 2e-3):
            for n_j in range(1, 9):
                n_t = n_j + 1
                point = build_point({
                    "p_t_dbm": 10.0, "lambda_e": 1e-4, "lambda_f": lam_f,
                    "n_e": n_e, "n_j": n_j, "n_t": n_t, "n_f": n_t + 1,
                })
                row = {"n_e": n_e, "lambda_f": lam_f, "n_j": n_j}
                row["p_so_ma"] = analytic.secrecy_outage_ma(1.0, point.cfg)
                row["p_so_ma_limit"] = analytic.secrecy_outage_ma_limit(1.0, point.cfg)
                if trials:
                    est = montecarlo.estimate_secrecy_outage(
                        1.0, point.cfg, _mc_settings(trials, seed, idx, workers)
                    )
                    row["p_so_mc"], row["mc_half_width"] = est.value, est.half_width
                else:
                    row["p_so_mc"] = row["mc_half_width"] = ""
                rows.append(row)
                idx += 1
    return FigureData(
        name="figure8", xkey="n_j", xlog=False, series_key="n_e",
        value_keys=["p_so_ma", "p_so_ma_limit", "p_so_mc", "mc_half_width"],
        rows=rows, extra_keys=["lambda_f"], ylabel="secrecy outage probability",
    )


def _figure_9(trials, seed, points, workers):
    rows = []
    base = {
        "p_t_dbm": 20.0, "n_f": 8, "n_e": 8, "n_t": 6, "lambda_e": 1e-4,
        "sigma": 0.9, "sigma_c": 0.9, "epsilon": 0.02, "t_c": 1e-3,
    }
    for n_j in (1, 3, 5):
        point0 = build_point({**base, "n_j": n_j})
        try:
            _, lam_up = optimizer.lambda_bounds(point0.targets, point0.cfg)
        except Exception:
            lam_up = 0.0
        for lam_f in np.geomspace(1e-4, 1e-2, points):
            t_s = optimizer.throughput(float(lam_f), point0.targets, point0.cfg)
            rows.append({
                "n_j": n_j, "lambda_f": float(lam_f), "t_s": t_s,
                "hd_feasible": int(lam_f <= lam_up),
            })
    return FigureData(
        name="figure9", xkey="lambda_f", xlog=True, series_key="n_j",
        value_keys=["t_s", "hd_feasible"], rows=rows,
        ylabel="secrecy throughput",
    )


_FIGURES = {
    2: (_figure_2, 9),
    3: (_figure_3, 9),
    4: (_figure_4, 13),
    5: (_figure_5, 9),
    6: (_figure_6, 11),
    7: (_figure_7, 6),
    8: (_figure_8, 8),
    9: (_figure_9, 13),
}


def figure_data(
    number: int,
    trials: int = 20_000,
    seed: int = 1,
    points: int | None = None,
    workers: int = 1,
) -> FigureData:
    """Build the data table for figure preset `number` (2-9)."""
    if number not in _FIGURES:
        raise ConfigError(f"figure must be one of {sorted(_FIGURES)}, got {number}")
    builder, default_points = _FIGURES[number]
    return builder(trials, seed, points or default_points, workers)
