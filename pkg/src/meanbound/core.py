"""Domain types and the induced mean that every bound in the package composes.

A sample x with ascending order statistics x_(1) <= ... <= x_(n) and a vector
of CDF levels l in [0,1]^n define a stairstep distribution: the CDF sits at
l_(i) on [x_(i), x_(i+1)) and jumps to 1 at the support's upper end s. Its
mean,

    m(x, l) = s - sum_{i=1..n} l_(i) * (x_(i+1) - x_(i)),    x_(n+1) := s,

is the induced mean. With l a CDF lower-confidence envelope this is a
deterministic upper confidence bound on the true mean; with l a sorted
uniform draw it is the random quantity whose constrained maxima the
Monte-Carlo bound takes quantiles of.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Sample",
    "SupportInterval",
    "Envelope",
    "UniformDraw",
    "induced_mean",
    "precedes",
    "quantile_index",
]


def _float_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


@dataclass(frozen=True)
class Sample:
    """Observed values with cached ascending order statistics."""

    values: np.ndarray
    sorted: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        arr = _float_vector(self.values, "values")
        srt = np.sort(arr)
        arr.flags.writeable = False
        srt.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "sorted", srt)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class SupportInterval:
    """Interval known to contain the distribution's support.

    ``lower=None`` marks an interval unbounded below and ``upper=None`` one
    unbounded above (the latter only ever appears as a declared support that
    is negated before any bound is computed). Infinite floats are normalized
    to the ``None`` markers. Upper confidence bounds require a finite
    ``upper``; the operations that need a finite end validate at call time.
    """

    lower: float | None
    upper: float | None

    def __post_init__(self) -> None:
        low, up = self.lower, self.upper
        if low is not None:
            low = float(low)
            if math.isnan(low):
                raise ValueError("lower must not be NaN")
            if low == -math.inf:
                low = None
            elif not math.isfinite(low):
                raise ValueError("lower must be finite or -inf")
        if up is not None:
            up = float(up)
            if math.isnan(up):
                raise ValueError("upper must not be NaN")
            if up == math.inf:
                up = None
            elif not math.isfinite(up):
                raise ValueError("upper must be finite or +inf")
        if low is not None and up is not None and low > up:
            raise ValueError(f"lower {low} exceeds upper {up}")
        if low is None and up is None:
            raise ValueError("at least one end of the support must be finite")
        object.__setattr__(self, "lower", low)
        object.__setattr__(self, "upper", up)

    @property
    def is_two_ended(self) -> bool:
        return self.lower is not None and self.upper is not None

    def negate(self) -> "SupportInterval":
        """The support of -X when this is the support of X."""
        low = None if self.upper is None else -self.upper
        up = None if self.lower is None else -self.lower
        return SupportInterval(low, up)

    def finite_upper(self) -> float:
        if self.upper is None:
            raise ValueError("operation requires a finite upper support end")
        return self.upper

    def require_two_ended(self) -> tuple[float, float]:
        if not self.is_two_ended:
            raise ValueError("operation requires a two-ended support interval")
        return self.lower, self.upper


def _unit_levels(values, name: str) -> np.ndarray:
    arr = _float_vector(values, name)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


@dataclass(frozen=True)
class Envelope:
    """CDF lower-confidence levels, one per order statistic, stored ascending.

    Input levels are treated as a multiset and sorted; ``alpha`` records the
    confidence parameter the envelope was built for, ``warning`` carries a
    validity caveat (set by constructors when a guarantee does not apply).
    """

    levels: np.ndarray
    alpha: float | None = None
    warning: str | None = None

    def __post_init__(self) -> None:
        arr = np.sort(_unit_levels(self.levels, "levels"))
        arr.flags.writeable = False
        object.__setattr__(self, "levels", arr)

    @property
    def n(self) -> int:
        return int(self.levels.size)


@dataclass(frozen=True)
class UniformDraw:
    """A sorted vector of uniform levels u_(1) <= ... <= u_(n) in [0, 1]."""

    levels: np.ndarray

    def __post_init__(self) -> None:
        arr = _unit_levels(self.levels, "levels")
        if np.any(np.diff(arr) < 0):
            raise ValueError("levels must be sorted ascending")
        arr.flags.writeable = False
        object.__setattr__(self, "levels", arr)

    @property
    def n(self) -> int:
        return int(self.levels.size)


def _levels_of(ell, n: int) -> np.ndarray:
    if isinstance(ell, (Envelope, UniformDraw)):
        levels = ell.levels
    else:
        levels = np.sort(_unit_levels(ell, "levels"))
    if levels.size != n:
        raise ValueError(f"levels length {levels.size} does not match sample size {n}")
    return levels


def induced_mean_sorted(x_sorted: np.ndarray, levels: np.ndarray, s: float) -> float:
    """Gap form on pre-sorted inputs, no validation (hot path)."""
    gaps = np.diff(np.append(x_sorted, s))
    return float(s - levels @ gaps)


def induced_mean(x: Sample, ell, support: SupportInterval) -> float:
    """Mean of the stairstep CDF pairing x's order statistics with levels.

    Parameters
    ----------
    x : Sample
    ell : Envelope, UniformDraw, or array-like
        Levels in [0, 1], one per observation; treated as a multiset.
    support : SupportInterval
        Only the (finite) upper end enters the formula.
    """
    s = support.finite_upper()
    levels = _levels_of(ell, x.n)
    if x.sorted[-1] > s:
        raise ValueError(f"sample maximum {x.sorted[-1]} exceeds support upper end {s}")
    return induced_mean_sorted(x.sorted, levels, s)


def precedes(z: Sample, y: Sample) -> bool:
    """True iff z_(i) <= y_(i) for every i (partial order on order statistics)."""
    if z.n != y.n:
        raise ValueError(f"length mismatch: {z.n} vs {y.n}")
    return bool(np.all(z.sorted <= y.sorted))


def quantile_index(p: float, count: int) -> int:
    """1-based order-statistic index ceil(p * count), clipped to [1, count].

    The tiny relative guard undoes binary-float overshoot in products like
    0.95 * 10**6 = 950000.0000000444, whose mathematical ceiling is 950000;
    erring toward the ceiling keeps the conservative side.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    raw = math.ceil(p * count - 1e-12 * count)
    return min(max(raw, 1), count)
