"""Network configuration shared by the analytic, simulation, and optimizer layers.

All quantities are in consistent linear units; the CLI converts dBm inputs
to milliwatt-linear (10^(dBm/10)) before building a NetworkConfig, and only
power ratios and power-times-threshold products enter any formula, so the
absolute unit choice cancels.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .mathcore import DerivedConstants


def dbm_to_linear(dbm: float) -> float:
    """dBm to milliwatt-linear power."""
    return 10.0 ** (dbm / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Physical and deployment parameters of the two-tier network.

    Densities are nodes per unit area, powers linear, distances in length
    units.  n_t = 1 selects single-antenna jamming (hybrid ZF-MRC reception,
    receive array of n_f - 1 antennas); n_t >= 2 selects multi-antenna
    jamming (MRC reception on n_f - n_t antennas, jamming injected into the
    null space of the self-interference channel).
    """

    lambda_h: float = 1e-3
    lambda_f: float = 1e-3
    lambda_e: float = 1e-3
    p_h: float = 1.0
    p_f: float = 1.0
    p_t: float = 1.0
    alpha: float = 3.5
    n_f: int = 4
    n_h: int = 4
    n_e: int = 4
    n_t: int = 1
    n_j: int = 1
    d_f: float = 1.0
    d_h: float = 1.0

    def __post_init__(self):
        if self.alpha <= 2:
            raise ValueError(f"alpha must exceed 2, got {self.alpha}")
        for name in ("lambda_h", "lambda_f", "lambda_e"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("p_h", "p_f", "p_t"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("d_f", "d_h"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("n_f", "n_h", "n_e", "n_t", "n_j"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_t == 1:
            if self.n_j != 1:
                raise ValueError("single-antenna jamming requires n_j = 1")
            if self.n_f < 3:
                raise ValueError("single-antenna jamming requires n_f >= 3")
        else:
            if not 1 <= self.n_j <= self.n_t - 1:
                raise ValueError("multi-antenna jamming requires 1 <= n_j <= n_t - 1")
            if self.n_f < self.n_t + 1:
                raise ValueError("multi-antenna jamming requires n_f >= n_t + 1")

    @property
    def multi_antenna(self) -> bool:
        return self.n_t >= 2

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    # Power ratios p_ab = p_a / p_b.
    @property
    def p_hf(self) -> float:
        return self.p_h / self.p_f

    @property
    def p_tf(self) -> float:
        return self.p_t / self.p_f

    @property
    def p_fh(self) -> float:
        return self.p_f / self.p_h

    @property
    def p_th(self) -> float:
        return self.p_t / self.p_h

    def constants(self) -> DerivedConstants:
        """Eagerly filled path-loss constants for this configuration."""
        consts = DerivedConstants.for_alpha(self.alpha)
        consts.c(2)
        consts.c(self.n_j + 1)
        consts.k(self.n_h)
        if self.multi_antenna:
            if self.n_f - self.n_t >= 1:
                consts.k(self.n_f - self.n_t)
        elif self.n_f - 2 >= 1:
            consts.k(self.n_f - 2)
        return consts

    def replace(self, **changes) -> "NetworkConfig":
        return dataclasses.replace(self, **changes)
