"""Special-function constants, combinatorial sums, and derivative machinery.

Everything here is pure and memoized, so values can be shared freely
across threads once computed.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import PartitionLimitError

#: partitions(k) refuses k above this unless the caller raises the cap;
#: p(40) = 37338 rows, which is already generous for any realistic
#: eavesdropper antenna count.
PARTITION_CAP_DEFAULT = 40

#: upsilon() enumerates subsets of {1..m-1}; beyond m = 20 the
#: enumeration would explode and no supported configuration needs it.
UPSILON_MAX_M = 20


def delta(alpha: float) -> float:
    """Stability exponent 2/alpha of the path-loss model (in (0,1) for alpha > 2)."""
    if alpha <= 2:
        raise ValueError(f"path-loss exponent must exceed 2, got {alpha}")
    return 2.0 / alpha


@lru_cache(maxsize=None)
def c_alpha_n(alpha: float, n: int) -> float:
    """Interference-geometry constant pi*Gamma(n-1+d)*Gamma(1-d)/Gamma(n-1), d = 2/alpha.

    Scales the exponent of the aggregate-interference Laplace transform for a
    field of n-1 co-located unit-power streams per interferer.  Evaluated in
    log space so large n (hundreds of jamming streams) cannot overflow.
    """
    d = delta(alpha)
    if n < 2:
        raise ValueError(f"order must be >= 2, got {n}")
    log_ratio = math.lgamma(n - 1 + d) - math.lgamma(n - 1)
    return math.pi * math.exp(log_ratio) * math.gamma(1.0 - d)


@lru_cache(maxsize=None)
def k_alpha_n(alpha: float, n: int) -> float:
    """Diversity-gain factor 1 + sum_{m=1}^{n-1} (1/m!) prod_{l=0}^{m-1} (l - d).

    Equals Gamma(n-d)/(Gamma(n)Gamma(1-d)); lies in (0, 1] and is
    non-increasing in n.  n = 1 gives the empty sum, i.e. 1.
    """
    d = delta(alpha)
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    total = 1.0
    term = 1.0
    for m in range(1, n):
        term *= (m - 1 - d) / m  # multiply (l - d)/m for l = m-1
        total += term
    return total


@lru_cache(maxsize=None)
def upsilon(m: int, n: int, delta_value: float) -> float:
    """Subset-product sum weighting the n-th power term of the bound series.

    Sums, over every (m-n)-element subset {l_1 < ... < l_{m-n}} of {1..m-1},
    the product of (l_i - delta*(l_i - i + 1)).  The empty subset (n = m)
    contributes 1.
    """
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got m={m}, n={n}")
    if m > UPSILON_MAX_M:
        raise ValueError(f"subset enumeration capped at m={UPSILON_MAX_M}, got {m}")
    if not 0.0 < delta_value < 1.0:
        raise ValueError(f"delta must lie in (0,1), got {delta_value}")
    size = m - n
    total = 0.0
    for subset in itertools.combinations(range(1, m), size):
        prod = 1.0
        for i, l in enumerate(subset, start=1):
            prod *= l - delta_value * (l - i + 1)
        total += prod
    return total


@dataclass(frozen=True)
class PartitionTable:
    """All partitions of k as non-increasing rows, largest-first ordering.

    The k = 0 table is the single empty row, so that row counts and
    per-row coefficients degenerate correctly in the outage series.
    """

    k: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def part_count(self, j: int) -> int:
        """Number of parts in row j."""
        return len(self.rows[j])

    def entry(self, i: int, j: int) -> int:
        """i-th part (0-based) of row j."""
        return self.rows[j][i]

    def multiplicities(self, j: int) -> tuple[tuple[int, int], ...]:
        """(value, multiplicity) pairs for row j, largest value first."""
        counts = Counter(self.rows[j])
        return tuple(sorted(counts.items(), reverse=True))

    def distinct_count(self, j: int) -> int:
        """Number of distinct part values in row j."""
        return len(set(self.rows[j]))


def _descending_partitions(k: int, cap: int):
    """Yield partitions of k as non-increasing tuples, reverse-lexicographic."""
    if k == 0:
        yield ()
        return
    for first in range(min(k, cap), 0, -1):
        for rest in _descending_partitions(k - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def partitions(k: int, cap: int = PARTITION_CAP_DEFAULT) -> PartitionTable:
    """Build the full partition table of k (reverse-lexicographic rows).

    Raises PartitionLimitError above the cap: the row count p(k) grows
    super-polynomially and the outage series only ever needs k < N_e.
    """
    if k < 0:
        raise ValueError(f"partition order must be >= 0, got {k}")
    if k > cap:
        raise PartitionLimitError(
            f"partitions({k}) exceeds cap {cap}; raise the cap explicitly if intended"
        )
    return PartitionTable(k=k, rows=tuple(_descending_partitions(k, k)))


def xi_coefficient(j: int, n: int, n_j: int, delta_value: float) -> float:
    """Per-row coefficient of the multi-stream outage series.

    For row j of the partition table of n, multiplies
    (n_j+1-k)(k-1-delta) / (k (n_j-k+delta)) over k = 1..part for every part,
    divided by the factorials of the multiplicities of the distinct part
    values.  The n = 0 convention row gives 1.  Rows containing a part
    >= n_j + 1 vanish through the (n_j+1-k) factor.
    """
    if n_j < 1:
        raise ValueError(f"stream count must be >= 1, got {n_j}")
    table = partitions(n)
    if not 0 <= j < table.row_count:
        raise ValueError(f"row {j} out of range for partitions({n})")
    row = table.rows[j]
    value = 1.0
    for part in row:
        for k in range(1, part + 1):
            value *= (n_j + 1 - k) * (k - 1 - delta_value) / (k * (n_j - k + delta_value))
        if value == 0.0:
            return 0.0
    for _, mult in table.multiplicities(j):
        value /= math.factorial(mult)
    return value


def xi_coefficient_limit(j: int, n: int, delta_value: float) -> float:
    """Stream-count -> infinity limit of xi_coefficient.

    The (n_j+1-k)/(n_j-k+delta) ratio tends to 1, leaving
    prod_k (k-1-delta)/k per part over the multiplicity factorials.
    """
    table = partitions(n)
    if not 0 <= j < table.row_count:
        raise ValueError(f"row {j} out of range for partitions({n})")
    value = 1.0
    for part in table.rows[j]:
        for k in range(1, part + 1):
            value *= (k - 1 - delta_value) / k
    for _, mult in table.multiplicities(j):
        value /= math.factorial(mult)
    return value


def exp_derivative(eta_derivs: Sequence[float]) -> float:
    """m-th derivative of exp(eta(s)) from [eta, eta', ..., eta^(m)].

    Uses the complete Bell polynomial recurrence
    B_{j+1} = sum_i C(j,i) B_{j-i} x_{i+1} with B_0 = 1, then multiplies by
    exp(eta).  Length-1 input returns exp(eta) itself.
    """
    if len(eta_derivs) < 1:
        raise ValueError("need at least eta(s) itself")
    m = len(eta_derivs) - 1
    bell = [1.0] + [0.0] * m
    for j in range(m):
        acc = 0.0
        for i in range(j + 1):
            acc += math.comb(j, i) * bell[j - i] * eta_derivs[i + 1]
        bell[j + 1] = acc
    return bell[m] * math.exp(eta_derivs[0])


@dataclass
class DerivedConstants:
    """Memoized path-loss constants for one value of alpha.

    Built eagerly per configuration and then read-only, so instances are
    safe to share across parallel sweep evaluation.
    """

    alpha: float
    delta: float
    c_alpha: dict[int, float] = field(default_factory=dict)
    k_alpha: dict[int, float] = field(default_factory=dict)

    @classmethod
    def for_alpha(cls, alpha: float) -> "DerivedConstants":
        return cls(alpha=alpha, delta=delta(alpha))

    def c(self, n: int) -> float:
        if n not in self.c_alpha:
            self.c_alpha[n] = c_alpha_n(self.alpha, n)
        return self.c_alpha[n]

    def k(self, n: int) -> float:
        if n not in self.k_alpha:
            self.k_alpha[n] = k_alpha_n(self.alpha, n)
        return self.k_alpha[n]
