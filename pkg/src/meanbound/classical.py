"""Baseline upper confidence bounds and the negation rule for lower bounds.

All bounds hold with probability at least 1-alpha for any distribution
meeting the stated support assumption. Values are reported raw (a Hoeffding
bound can exceed the support's upper end); clamping to the support is an
explicit opt-in so dominance comparisons see the unclamped numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaincinv, stdtrit

from meanbound.core import Envelope, Sample, SupportInterval, induced_mean

__all__ = [
    "BoundResult",
    "hoeffding_ucb",
    "maurer_pontil_ucb",
    "student_t_ucb",
    "anderson_ucb",
    "clopper_pearson_ucb",
    "lower_bound_via_negation",
    "student_t_quantile",
]


@dataclass(frozen=True)
class BoundResult:
    """A one-sided confidence bound with the settings that produced it."""

    value: float
    method: str
    side: str
    alpha: float
    diagnostics: dict = field(default_factory=dict)


def _validate_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return alpha


def _check_in_support(x: Sample, support: SupportInterval) -> None:
    if support.lower is not None and x.sorted[0] < support.lower:
        raise ValueError(
            f"sample minimum {x.sorted[0]} below support lower end {support.lower}")
    if support.upper is not None and x.sorted[-1] > support.upper:
        raise ValueError(
            f"sample maximum {x.sorted[-1]} above support upper end {support.upper}")


def _unbiased_variance(x: Sample) -> float:
    if x.n < 2:
        raise ValueError("needs n >= 2 observations")
    return float(np.var(x.values, ddof=1))


def student_t_quantile(p: float, df: int) -> float:
    """Quantile of the Student-t distribution with df degrees of freedom."""
    return float(stdtrit(df, p))


def hoeffding_ucb(x: Sample, support: SupportInterval, alpha: float,
                  clamp: bool = False) -> BoundResult:
    """mean + (b - a) * sqrt(ln(1/alpha) / (2n)); needs a two-ended support."""
    alpha = _validate_alpha(alpha)
    a, b = support.require_two_ended()
    _check_in_support(x, support)
    margin = (b - a) * math.sqrt(math.log(1.0 / alpha) / (2.0 * x.n))
    value = float(np.mean(x.values)) + margin
    if clamp:
        value = min(value, b)
    return BoundResult(value, "hoeffding", "upper", alpha, {"margin": margin})


def maurer_pontil_ucb(x: Sample, support: SupportInterval, alpha: float,
                      clamp: bool = False) -> BoundResult:
    """Empirical-Bernstein bound: mean + 7(b-a)ln(2/a)/(3(n-1)) + sqrt(2 var ln(2/a)/n).

    The variance term uses the unbiased sample variance (denominator n-1);
    requires n >= 2.
    """
    alpha = _validate_alpha(alpha)
    a, b = support.require_two_ended()
    _check_in_support(x, support)
    var = _unbiased_variance(x)
    log_term = math.log(2.0 / alpha)
    value = (float(np.mean(x.values))
             + 7.0 * (b - a) * log_term / (3.0 * (x.n - 1))
             + math.sqrt(2.0 * var * log_term / x.n))
    if clamp:
        value = min(value, b)
    return BoundResult(value, "maurer-pontil", "upper", alpha, {"variance": var})


def student_t_ucb(x: Sample, alpha: float) -> BoundResult:
    """mean + sqrt(var/n) * t_{1-alpha, n-1}; no support needed, no coverage
    guarantee outside (asymptotically) normal settings."""
    alpha = _validate_alpha(alpha)
    var = _unbiased_variance(x)
    mean = float(np.mean(x.values))
    value = mean
    if var > 0.0:
        value = mean + math.sqrt(var / x.n) * student_t_quantile(1.0 - alpha, x.n - 1)
    return BoundResult(value, "student-t", "upper", alpha, {"variance": var})


def anderson_ucb(x: Sample, support: SupportInterval, envelope: Envelope) -> BoundResult:
    """Induced mean of the sample under a CDF lower-confidence envelope.

    Uses only the support's upper end; a lower support end carries no
    information for this construction.
    """
    value = induced_mean(x, envelope, support)
    alpha = envelope.alpha if envelope.alpha is not None else float("nan")
    diag: dict = {"envelope_max": float(envelope.levels[-1])}
    if envelope.warning:
        diag["warning"] = envelope.warning
    return BoundResult(value, "anderson", "upper", alpha, diag)


def clopper_pearson_ucb(x: Sample, alpha: float) -> BoundResult:
    """Exact binomial upper bound for {0,1}-valued samples.

    With p zeros out of n, the bound is the 1-alpha quantile of
    Beta(n - p + 1, p); with no zeros it is 1.
    """
    alpha = _validate_alpha(alpha)
    vals = x.values
    if not np.all((vals == 0.0) | (vals == 1.0)):
        raise ValueError("clopper-pearson requires all values in {0, 1}")
    p = int(np.sum(vals == 0.0))
    if p == 0:
        value = 1.0
    else:
        value = float(betaincinv(x.n - p + 1, p, 1.0 - alpha))
    return BoundResult(value, "clopper-pearson", "upper", alpha, {"zeros": p})


def lower_bound_via_negation(method: str, x: Sample,
                             support: SupportInterval | None, alpha: float,
                             envelope: Envelope | None = None,
                             clamp: bool = False) -> BoundResult:
    """Lower confidence bound as the negated upper bound of the negated sample.

    The sample x over [a, b] becomes -x over [-b, -a]; methods that need a
    finite upper end of the negated support therefore need a finite lower
    end of the original one. Clopper-Pearson negates through the complement
    1 - x, which is the same reflection expressed on {0, 1}.
    """
    alpha = _validate_alpha(alpha)
    if method == "student-t":
        up = student_t_ucb(Sample(-x.values), alpha)
        value = -up.value
    elif method == "clopper-pearson":
        up = clopper_pearson_ucb(Sample(1.0 - x.values), alpha)
        value = 1.0 - up.value
    elif method in ("hoeffding", "maurer-pontil", "anderson"):
        if support is None:
            raise ValueError(f"{method} needs a support interval")
        if support.lower is None:
            raise ValueError(
                f"{method} lower bound needs a finite lower support end")
        neg_x = Sample(-x.values)
        neg_support = support.negate()
        if method == "hoeffding":
            up = hoeffding_ucb(neg_x, neg_support, alpha)
        elif method == "maurer-pontil":
            up = maurer_pontil_ucb(neg_x, neg_support, alpha)
        else:
            if envelope is None:
                raise ValueError("anderson needs an envelope")
            up = anderson_ucb(neg_x, neg_support, envelope)
        value = -up.value
    else:
        raise ValueError(f"unknown method {method!r}")
    if clamp and support is not None and support.lower is not None:
        value = max(value, support.lower)
    return BoundResult(value, method, "lower", alpha, dict(up.diagnostics))
