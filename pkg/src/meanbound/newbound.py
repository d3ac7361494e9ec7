"""Monte-Carlo quantile bounds on the mean over ordering sublevel sets.

The upper confidence bound draws l sorted uniform vectors, maximizes the
induced mean over {y : T(y) <= T(x)} for each draw, and reports the
(1 - alpha) quantile of the per-draw suprema (a raw order statistic, no
interpolation). Lower bounds reuse the upper-bound machinery on the negated
sample and support. A safe variant widens the quantile index and pads the
value so the reported number also covers the Monte-Carlo error of the
quantile itself, at the price of a sample-size requirement that is
exponential in n.

Precomputed tables evaluate the bound on a grid of constraint levels with
one shared set of draws, so table lookups are monotone in the level and a
lookup at the next grid point at or above T(x) is conservative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from meanbound.classical import BoundResult
from meanbound.core import Envelope, Sample, SupportInterval, quantile_index
from meanbound.ordering import (
    AndersonT,
    L2T,
    MeanT,
    OrderingFunction,
    eval_T,
    sup_first_order_statistic,
    sup_problem,
)
from meanbound._rng import sorted_uniform_blocks, sorted_uniform_matrix

__all__ = [
    "BoundRequest",
    "BoundTable",
    "SafePlan",
    "bound_table",
    "check_superset_monotonicity",
    "new_bound",
    "safe_plan",
]

_TABLE_HEADER = "t_value,bound,alpha,n,method,l,seed"


@dataclass(frozen=True)
class BoundRequest:
    """Inputs for one Monte-Carlo bound computation.

    safe_epsilon, when set, switches on the safe variant: the number of
    draws is raised to the variant's requirement if needed (capped by
    safe_budget) and the reported value includes the epsilon/3 padding.
    """

    x: Sample
    support: SupportInterval
    alpha: float
    ordering: OrderingFunction
    mc_samples: int = 10_000
    seed: int = 0
    side: str = "upper"
    safe_epsilon: float | None = None
    safe_budget: int = 100_000_000


@dataclass(frozen=True)
class SafePlan:
    """Quantile widening and sample-size requirement of the safe variant.

    phi is the largest first order statistic attainable in the constraint
    set; the spread s_D - phi drives both the widening gamma and the draw
    requirement.
    """

    gamma: float
    required_samples: int
    epsilon: float
    phi: float


def _method_name(T: OrderingFunction) -> str:
    return "new-" + T.kind


def _validate_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0) or not math.isfinite(alpha):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")


def _binary_zero_count(x: Sample, support: SupportInterval) -> int | None:
    """Count of observations at the lower end, when the two-point reduction
    applies (two-ended support, every value at one of the two ends)."""
    if not support.is_two_ended:
        return None
    a, b = support.lower, support.upper
    if a == b:
        return None
    at_a = x.values == a
    at_b = x.values == b
    if not bool(np.all(at_a | at_b)):
        return None
    return int(at_a.sum())


def _sup_values(x: Sample, support: SupportInterval, T: OrderingFunction,
                t_level: float, draws: int, seed: int) -> tuple[np.ndarray, str]:
    """Per-draw suprema for `draws` sorted uniform vectors."""
    n = x.n
    if isinstance(T, MeanT):
        p = _binary_zero_count(x, support)
        if p is not None:
            a, b = support.lower, support.upper
            out = np.empty(draws)
            pos = 0
            for block in sorted_uniform_blocks(seed, draws, n):
                rows = block.shape[0]
                if p == 0:
                    out[pos:pos + rows] = b
                else:
                    out[pos:pos + rows] = b - (b - a) * block[:, p - 1]
                pos += rows
            return out, "optimal"
    problem = sup_problem(T, t_level, n, support)
    out = np.empty(draws)
    pos = 0
    for block in sorted_uniform_blocks(seed, draws, n):
        rows = block.shape[0]
        out[pos:pos + rows] = problem.values(block)
        pos += rows
    return out, problem.status


def safe_plan(x: Sample, support: SupportInterval, T: OrderingFunction,
              alpha: float, epsilon: float) -> SafePlan:
    """Widened quantile level and draw requirement for the safe variant.

    gamma = min(alpha, (epsilon / (3 (s_D - phi)))^n) where phi is the
    largest first order statistic attainable in the constraint set, and the
    draw requirement inverts a one-sided DKW-type deviation bound at gamma/2.
    A degenerate spread (s_D <= phi) makes every draw's supremum equal, so
    one draw suffices.
    """
    _validate_alpha(alpha)
    if not (epsilon > 0.0) or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n = x.n
    s = support.finite_upper()
    phi = sup_first_order_statistic(x, T, support)
    spread = s - phi
    if spread <= 0.0:
        return SafePlan(gamma=alpha, required_samples=1,
                        epsilon=epsilon, phi=phi)
    ratio = epsilon / (3.0 * spread)
    gamma = min(alpha, ratio**n)
    if gamma <= 0.0:
        # gamma underflowed: the true requirement exceeds any usable budget
        return SafePlan(gamma=gamma, required_samples=10**18,
                        epsilon=epsilon, phi=phi)
    required = (-math.log(gamma / 2.0) / 2.0) * ratio**(-n)
    if not math.isfinite(required) or required > 1e18:
        return SafePlan(gamma=gamma, required_samples=10**18,
                        epsilon=epsilon, phi=phi)
    return SafePlan(gamma=gamma, required_samples=int(math.ceil(required)),
                    epsilon=epsilon, phi=phi)


def new_bound(request: BoundRequest) -> BoundResult:
    """Monte-Carlo quantile bound on the mean, upper or lower side.

    The draw stream is fully determined by (seed, mc_samples, n), so
    repeated calls with identical requests return identical values, and
    requests sharing a seed share their uniform draws.
    """
    _validate_alpha(request.alpha)
    if request.mc_samples < 1:
        raise ValueError(f"mc_samples must be >= 1, got {request.mc_samples}")
    if request.side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {request.side!r}")
    x, support, T = request.x, request.support, request.ordering

    if request.side == "lower":
        if support.lower is None:
            raise ValueError(
                "lower bound needs a finite lower support end (negation route)")
        neg = BoundRequest(
            x=Sample(-x.values), support=support.negate(),
            alpha=request.alpha, ordering=T,
            mc_samples=request.mc_samples, seed=request.seed, side="upper",
            safe_epsilon=request.safe_epsilon, safe_budget=request.safe_budget)
        up = new_bound(neg)
        diag = dict(up.diagnostics)
        diag["negated"] = True
        return BoundResult(value=-up.value, method=up.method, side="lower",
                           alpha=request.alpha, diagnostics=diag)

    support.finite_upper()
    if x.sorted[-1] > support.upper:
        raise ValueError(
            f"sample maximum {x.sorted[-1]} above support upper end {support.upper}")
    if support.lower is not None and x.sorted[0] < support.lower:
        raise ValueError(
            f"sample minimum {x.sorted[0]} below support lower end {support.lower}")

    t_level = eval_T(T, x, support)
    draws = request.mc_samples
    plan = None
    if request.safe_epsilon is not None:
        plan = safe_plan(x, support, T, request.alpha, request.safe_epsilon)
        if plan.required_samples > request.safe_budget:
            raise ValueError(
                f"safe variant requires {plan.required_samples} draws, above "
                f"the budget {request.safe_budget}; raise safe_budget or epsilon")
        draws = max(draws, plan.required_samples)

    values, status = _sup_values(x, support, T, t_level, draws, request.seed)
    values.sort()
    if plan is None:
        idx = quantile_index(1.0 - request.alpha, draws)
        bound = float(values[idx - 1])
    else:
        idx = quantile_index(1.0 - request.alpha + plan.gamma, draws)
        bound = float(values[idx - 1]) + plan.epsilon / 3.0

    diagnostics = {
        "t_value": t_level,
        "mc_samples": draws,
        "quantile_index": idx,
        "status": status,
        "n": x.n,
    }
    if plan is not None:
        diagnostics["safe_gamma"] = plan.gamma
        diagnostics["safe_required_samples"] = plan.required_samples
        diagnostics["safe_epsilon"] = plan.epsilon
        diagnostics["safe_phi"] = plan.phi
        diagnostics["safe_raised"] = draws > request.mc_samples
    return BoundResult(value=bound, method=_method_name(T), side="upper",
                       alpha=request.alpha, diagnostics=diagnostics)


@dataclass(frozen=True)
class BoundTable:
    """Bound values on an ascending grid of constraint levels.

    All grid entries share one set of draws, which makes the bound column
    nondecreasing in the level column, so rounding a query level up to the
    next grid point is conservative.
    """

    t_values: np.ndarray
    bounds: np.ndarray
    alpha: float
    n: int
    method: str
    mc_samples: int
    seed: int

    def lookup(self, t: float) -> float:
        """Bound at the smallest grid level >= t (conservative)."""
        idx = int(np.searchsorted(self.t_values, t, side="left"))
        if idx >= self.t_values.size:
            raise ValueError(
                f"level {t} above the table's largest grid value "
                f"{self.t_values[-1]}")
        return float(self.bounds[idx])

    def to_csv(self) -> str:
        lines = [_TABLE_HEADER]
        for t, b in zip(self.t_values, self.bounds):
            lines.append(f"{float(t)!r},{float(b)!r},{self.alpha!r},"
                         f"{self.n},{self.method},{self.mc_samples},{self.seed}")
        return "\n".join(lines) + "\n"


def table_from_csv(text: str) -> BoundTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != _TABLE_HEADER:
        raise ValueError(f"expected header {_TABLE_HEADER!r}")
    t_values, bounds = [], []
    alpha = n = method = mc = seed = None
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 7:
            raise ValueError(f"malformed table row {ln!r}")
        t_values.append(float(parts[0]))
        bounds.append(float(parts[1]))
        alpha, n, method = float(parts[2]), int(parts[3]), parts[4]
        mc, seed = int(parts[5]), int(parts[6])
    if not t_values:
        raise ValueError("table has no rows")
    return BoundTable(t_values=np.asarray(t_values), bounds=np.asarray(bounds),
                      alpha=alpha, n=n, method=method, mc_samples=mc, seed=seed)


def _ordering_for(kind: str, envelope: Envelope | None) -> OrderingFunction:
    if kind == "anderson":
        if envelope is None:
            raise ValueError("kind 'anderson' needs an envelope")
        return AndersonT(envelope)
    if kind == "l2":
        return L2T()
    if kind == "mean":
        return MeanT()
    raise ValueError(f"unknown ordering kind {kind!r}")


def bound_table(t_values, n: int, support: SupportInterval, alpha: float,
                kind: str, mc_samples: int = 10_000, seed: int = 0,
                envelope: Envelope | None = None,
                binary: bool = False) -> BoundTable:
    """Precompute the bound on an ascending grid of constraint levels.

    With binary=True (kind must be 'mean', support two-ended) each level is
    read as a mean of two-point data and the exact two-point reduction is
    used; levels then must lie on the lattice a + (b - a) k / n.
    """
    _validate_alpha(alpha)
    grid = np.asarray(t_values, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("t_values must be a nonempty one-dimensional grid")
    if np.any(np.diff(grid) < 0):
        raise ValueError("t_values must be ascending")
    if mc_samples < 1:
        raise ValueError(f"mc_samples must be >= 1, got {mc_samples}")
    T = _ordering_for(kind, envelope)
    if binary:
        if kind != "mean":
            raise ValueError("binary tables require kind 'mean'")
        support.require_two_ended()
    U = sorted_uniform_matrix(seed, mc_samples, n)
    idx = quantile_index(1.0 - alpha, mc_samples)
    bounds = np.empty(grid.size)
    for i, t in enumerate(grid):
        if binary:
            a, b = support.lower, support.upper
            k = (t - a) / (b - a) * n
            k_int = int(round(k))
            if abs(k - k_int) > 1e-6 or not (0 <= k_int <= n):
                raise ValueError(
                    f"binary level {t} is not a lattice mean for n={n}")
            p = n - k_int
            vals = np.full(mc_samples, float(b)) if p == 0 \
                else b - (b - a) * U[:, p - 1]
        else:
            vals = sup_problem(T, float(t), n, support).values(U)
        order = np.sort(vals)
        bounds[i] = order[idx - 1]
    return BoundTable(t_values=grid, bounds=bounds, alpha=alpha, n=n,
                      method=_method_name(T), mc_samples=mc_samples, seed=seed)


def check_superset_monotonicity(x: Sample, inner: SupportInterval,
                                outer: SupportInterval, T: OrderingFunction,
                                alpha: float = 0.05, mc_samples: int = 2_000,
                                seed: int = 0) -> bool:
    """Verify the bound under a superset support dominates, draw by draw.

    Both supports are evaluated on the same uniform draws; the check
    requires every per-draw supremum under the inner support to be at most
    its counterpart under the outer support plus a 1e-9 scale tolerance,
    which implies the same ordering for the reported quantiles.
    """
    _validate_alpha(alpha)
    inner.finite_upper()
    outer.finite_upper()
    if inner.upper > outer.upper:
        raise ValueError("inner support upper end exceeds the outer one")
    if outer.lower is not None and (inner.lower is None
                                    or inner.lower < outer.lower):
        raise ValueError("inner support lower end is below the outer one")
    if x.sorted[-1] > inner.upper:
        raise ValueError("sample is not contained in the inner support")
    if inner.lower is not None and x.sorted[0] < inner.lower:
        raise ValueError("sample is not contained in the inner support")
    t_inner = eval_T(T, x, inner)
    t_outer = eval_T(T, x, outer)
    prob_inner = sup_problem(T, t_inner, x.n, inner)
    prob_outer = sup_problem(T, t_outer, x.n, outer)
    ends = [abs(outer.upper), abs(inner.upper)]
    ends += [abs(e) for e in (inner.lower, outer.lower) if e is not None]
    tol = 1e-9 * max(1.0, *ends)
    for block in sorted_uniform_blocks(seed, mc_samples, x.n):
        vi = prob_inner.values(block)
        vo = prob_outer.values(block)
        if np.any(vi > vo + tol):
            return False
    return True
