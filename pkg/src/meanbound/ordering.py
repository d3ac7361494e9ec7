"""Ordering functionals and exact maximization of the induced mean.

The Monte-Carlo bound repeatedly maximizes the induced mean m(y, u) over the
sublevel set S(x) = {y : T(y) <= T(x), y ascending, each y_i in the support}
of an ordering functional T. Three functionals are supported:

* ``AndersonT``: T(y) = m(y, l) for a fixed envelope l (linear in the
  sorted coordinates),
* ``MeanT``: T(y) = mean(y) (linear),
* ``L2T``: T(y) = (sum_i y_i^2) / n (quadratic).

Linear functionals give a linear program over the intersection of a box,
the ordering cone, and one halfspace. In unit-scaled gap coordinates
z_1 = y_(1) - a, z_j = y_(j) - y_(j-1) the feasible set is
{z >= 0, sum z <= 1, D.z <= r}, a polytope whose vertices have at most two
nonzero coordinates; the optimum is exact by enumerating them, and the
enumeration batches across Monte-Carlo draws as one matrix product. The
quadratic functional gives a linear objective over a ball intersected with
the box and the cone, solved per draw by isotonic regression of the
objective weights (pool adjacent violators) plus bisection on the scalar
dual variable of the ball constraint.

One-ended supports (lower end -inf) are reduced to equivalent bounded
problems by clamping the lower box end at a value the optimum never needs
to cross: for ``MeanT`` at n*T(x) - (n-1)*b (a tight mean constraint cannot
push the smallest coordinate lower), for ``L2T`` at -sqrt(n*T(x)) (the ball
radius), and for ``AndersonT`` at b - (b - T(x))/l_(i0) with i0 the first
positive envelope level (coordinates below that index carry no constraint
weight, and the maximal-slack vertex sits exactly at the clamp). Each clamp
is exact, not an approximation.

``L2T`` is evaluated on the caller's original coordinates (it is not
translation equivariant, so no internal rescaling is applied on that path);
tolerances there scale with the ball radius instead of the box width.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from meanbound.core import (
    Envelope,
    Sample,
    SupportInterval,
    UniformDraw,
    induced_mean,
    induced_mean_sorted,
)

__all__ = [
    "AndersonT",
    "L2T",
    "MeanT",
    "OrderingFunction",
    "MaximizerSolution",
    "eval_T",
    "maximize_induced_mean",
    "sup_first_order_statistic",
    "sup_problem",
]

_VERTEX_TOL = 1e-12


@dataclass(frozen=True)
class AndersonT:
    """T(y) = induced mean of y under a fixed envelope."""

    envelope: Envelope
    kind = "anderson"


@dataclass(frozen=True)
class L2T:
    """T(y) = (sum of squares) / n."""

    kind = "l2"


@dataclass(frozen=True)
class MeanT:
    """T(y) = sample mean."""

    kind = "mean"


OrderingFunction = AndersonT | L2T | MeanT


@dataclass(frozen=True)
class MaximizerSolution:
    value: float
    argmax: np.ndarray
    status: str  # "optimal" or "clamped_one_ended"
    certified_feasible: bool


def eval_T(T: OrderingFunction, x: Sample, support: SupportInterval) -> float:
    """Evaluate the ordering functional at a sample."""
    if isinstance(T, AndersonT):
        return induced_mean(x, T.envelope, support)
    if isinstance(T, L2T):
        return float(np.mean(x.values**2))
    if isinstance(T, MeanT):
        return float(np.mean(x.values))
    raise TypeError(f"unknown ordering function {T!r}")


def _scale_of(support: SupportInterval, fallback: float = 1.0) -> float:
    if support.is_two_ended:
        return max(support.upper - support.lower, 1e-12)
    return max(fallback, 1e-12)


def _linear_weights(T: OrderingFunction, n: int, b: float) -> tuple[np.ndarray, float]:
    """Weights d and offset t0 with T(y) = d @ y_sorted + t0 for linear T."""
    if isinstance(T, MeanT):
        return np.full(n, 1.0 / n), 0.0
    env = T.envelope.levels
    if env.size != n:
        raise ValueError(f"envelope length {env.size} does not match n {n}")
    d = np.diff(np.concatenate(([0.0], env)))
    return d, b * (1.0 - env[-1])


def _effective_lower(T: OrderingFunction, t_level: float,
                     support: SupportInterval, n: int) -> tuple[float, str]:
    """Lower box end the solver uses, clamping one-ended supports exactly."""
    if support.lower is not None:
        return support.lower, "optimal"
    b = support.finite_upper()
    if isinstance(T, MeanT):
        a_eff = n * t_level - (n - 1) * b
    elif isinstance(T, L2T):
        a_eff = -math.sqrt(max(n * t_level, 0.0))
    else:
        env = T.envelope.levels
        if env[-1] <= 0.0:
            # no constraint weight anywhere: every coordinate pins at b
            return b, "clamped_one_ended"
        i0 = int(np.argmax(env > 0.0))
        a_eff = b - (b - t_level) / env[i0]
    return min(a_eff, b), "clamped_one_ended"


def _vertices_unit(D: np.ndarray, r: float) -> np.ndarray:
    """Vertices of {z >= 0, sum z <= 1, D.z <= r}, one per row.

    Every vertex of this two-row system has at most two nonzero
    coordinates: none (the origin), one (a single constraint tight), or two
    (both rows tight).
    """
    n = D.size
    rows = [np.zeros(n)]
    for j in range(n):
        if D[j] <= r + _VERTEX_TOL:
            v = np.zeros(n)
            v[j] = 1.0
            rows.append(v)
        if D[j] > _VERTEX_TOL:
            zj = r / D[j]
            if zj <= 1.0 + _VERTEX_TOL:
                v = np.zeros(n)
                v[j] = min(max(zj, 0.0), 1.0)
                rows.append(v)
    for j in range(n):
        dj = D[j]
        for k in range(j + 1, n):
            dk = D[k]
            if abs(dj - dk) <= _VERTEX_TOL:
                continue
            zj = (r - dk) / (dj - dk)
            zk = 1.0 - zj
            if zj >= -_VERTEX_TOL and zk >= -_VERTEX_TOL:
                v = np.zeros(n)
                v[j] = max(zj, 0.0)
                v[k] = max(zk, 0.0)
                rows.append(v)
    return np.vstack(rows)


class _LinearProblem:
    """Batched exact LP for AndersonT and MeanT at a fixed constraint level."""

    def __init__(self, T: OrderingFunction, t_level: float,
                 n: int, support: SupportInterval):
        b = support.finite_upper()
        d, t0 = _linear_weights(T, n, b)
        a_eff, status = _effective_lower(T, t_level, support, n)
        self.n = n
        self.b = b
        self.a_eff = a_eff
        self.status = status
        self.width = b - a_eff
        if self.width <= 0.0:
            self.vertices = np.zeros((1, n))
            self.r = 0.0
            return
        # gap-space constraint row: D_j = sum of weights from j on
        self.D = np.cumsum(d[::-1])[::-1]
        r = (t_level - t0 - a_eff * float(d.sum())) / self.width
        # negative r means the level sits below the minimum attainable
        # T-value; the conservative reading is the singleton {a_eff * ones}
        self.r = max(r, 0.0)
        self.vertices = _vertices_unit(self.D, self.r)

    def values(self, u_block: np.ndarray) -> np.ndarray:
        """Per-draw suprema for a block of sorted uniform rows."""
        un = u_block[:, -1]
        base = self.a_eff * un + self.b * (1.0 - un)
        if self.width <= 0.0:
            return base
        prev = np.concatenate(
            [np.zeros((u_block.shape[0], 1)), u_block[:, :-1]], axis=1)
        coeff = un[:, None] - prev
        best = (self.vertices @ coeff.T).max(axis=0)
        return base + self.width * best

    def solve_single(self, u_levels: np.ndarray) -> tuple[float, np.ndarray]:
        un = u_levels[-1]
        base = self.a_eff * un + self.b * (1.0 - un)
        if self.width <= 0.0:
            return base, np.full(self.n, self.b)
        coeff = un - np.concatenate(([0.0], u_levels[:-1]))
        scores = self.vertices @ coeff
        best = int(np.argmax(scores))
        y = self.a_eff + self.width * np.cumsum(self.vertices[best])
        return base + self.width * float(scores[best]), y


@njit(cache=True)
def _l2_block_values(u_block, r2, a, b):  # pragma: no cover - jitted
    draws, n = u_block.shape
    out = np.empty(draws)
    w = np.empty(n)
    cnt = np.empty(n, np.int64)
    clip0 = min(max(0.0, a), b)
    for j in range(draws):
        # ascending isotonic regression of the level gaps (pool adjacent
        # violators); blocks come out strictly increasing
        m = 0
        prev = 0.0
        for i in range(n):
            ci = u_block[j, i] - prev
            prev = u_block[j, i]
            w[m] = ci
            cnt[m] = 1
            m += 1
            while m > 1 and w[m - 2] >= w[m - 1]:
                total = w[m - 2] * cnt[m - 2] + w[m - 1] * cnt[m - 1]
                cnt[m - 2] += cnt[m - 1]
                w[m - 2] = total / cnt[m - 2]
                m -= 1
        # limit as the dual variable -> 0: positive-weight blocks at b
        g0 = 0.0
        v0 = 0.0
        for t in range(m):
            yt = b if w[t] > 0.0 else clip0
            g0 += cnt[t] * yt * yt
            v0 += cnt[t] * w[t] * yt
        if g0 <= r2 * (1.0 + 1e-12) + 1e-300:
            inner = v0
        else:
            lo = 0.0
            hi = 1.0
            for _ in range(400):
                g = 0.0
                for t in range(m):
                    yt = w[t] / (2.0 * hi)
                    if yt < a:
                        yt = a
                    elif yt > b:
                        yt = b
                    g += cnt[t] * yt * yt
                if g <= r2:
                    break
                hi *= 2.0
            for _ in range(120):
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                g = 0.0
                for t in range(m):
                    yt = w[t] / (2.0 * mid)
                    if yt < a:
                        yt = a
                    elif yt > b:
                        yt = b
                    g += cnt[t] * yt * yt
                if g > r2:
                    lo = mid
                else:
                    hi = mid
            inner = 0.0
            g = 0.0
            for t in range(m):
                yt = w[t] / (2.0 * hi)
                if yt < a:
                    yt = a
                elif yt > b:
                    yt = b
                g += cnt[t] * yt * yt
                inner += cnt[t] * w[t] * yt
            if g > r2 and g > 0.0:
                inner *= math.sqrt(r2 / g)
        out[j] = inner + b * (1.0 - u_block[j, n - 1])
    return out


def _pava_ascending(c: np.ndarray) -> np.ndarray:
    """Equal-weight ascending isotonic regression, expanded to full length."""
    n = c.size
    vals = np.empty(n)
    cnts = np.empty(n, dtype=np.int64)
    m = 0
    for ci in c:
        vals[m] = ci
        cnts[m] = 1
        m += 1
        while m > 1 and vals[m - 2] >= vals[m - 1]:
            total = vals[m - 2] * cnts[m - 2] + vals[m - 1] * cnts[m - 1]
            cnts[m - 2] += cnts[m - 1]
            vals[m - 2] = total / cnts[m - 2]
            m -= 1
    return np.repeat(vals[:m], cnts[:m])


def _l2_solve_single(c: np.ndarray, r2: float, a: float,
                     b: float) -> tuple[float, np.ndarray]:
    """Maximize c @ y over the ball/box/cone intersection; returns (value, y).

    Independent of the jitted batch kernel: full-length isotonic vector plus
    a vectorized bisection, used where the argmax is needed.
    """
    w = _pava_ascending(c)

    def y_of(lam: float) -> np.ndarray:
        return np.clip(w / (2.0 * lam), a, b)

    y_hi = np.where(w > 0.0, b, np.clip(0.0, a, b))
    if float(y_hi @ y_hi) <= r2 * (1.0 + 1e-12) + 1e-300:
        return float(c @ y_hi), y_hi
    lo, hi = 0.0, 1.0
    for _ in range(400):
        if float(y_of(hi) @ y_of(hi)) <= r2:
            break
        hi *= 2.0
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if float(y_of(mid) @ y_of(mid)) > r2:
            lo = mid
        else:
            hi = mid
    y = y_of(hi)
    norm2 = float(y @ y)
    if norm2 > r2 > 0.0:
        y = y * math.sqrt(r2 / norm2)
    return float(c @ y), y


class _L2Problem:
    """Batched convex solve for L2T at a fixed constraint level."""

    def __init__(self, T: L2T, t_level: float, n: int, support: SupportInterval):
        b = support.finite_upper()
        a_eff, status = _effective_lower(T, t_level, support, n)
        self.n = n
        self.b = b
        self.a_eff = a_eff
        self.status = status
        clip0 = min(max(0.0, a_eff), b)
        # levels below the minimum attainable sum of squares evaluate at
        # that minimum (the singleton closest to the origin)
        self.r2 = max(n * t_level, n * clip0 * clip0)

    def values(self, u_block: np.ndarray) -> np.ndarray:
        return _l2_block_values(u_block, self.r2, self.a_eff, self.b)

    def solve_single(self, u_levels: np.ndarray) -> tuple[float, np.ndarray]:
        c = np.diff(np.concatenate(([0.0], u_levels)))
        inner, y = _l2_solve_single(c, self.r2, self.a_eff, self.b)
        return inner + self.b * (1.0 - u_levels[-1]), y


def sup_problem(T: OrderingFunction, t_level: float, n: int,
                support: SupportInterval):
    """Solver for sup of the induced mean over {y : T(y) <= t_level}.

    The returned object exposes ``values(u_block)`` for batched evaluation
    over rows of sorted uniforms, ``solve_single(u_levels)`` returning
    (value, argmax), and ``status``.
    """
    if isinstance(T, L2T):
        return _L2Problem(T, t_level, n, support)
    if isinstance(T, (AndersonT, MeanT)):
        return _LinearProblem(T, t_level, n, support)
    raise TypeError(f"unknown ordering function {T!r}")


def _validate_inputs(x: Sample, support: SupportInterval) -> None:
    support.finite_upper()
    if x.sorted[-1] > support.upper:
        raise ValueError(
            f"sample maximum {x.sorted[-1]} above support upper end {support.upper}")
    if support.lower is not None and x.sorted[0] < support.lower:
        raise ValueError(
            f"sample minimum {x.sorted[0]} below support lower end {support.lower}")


def _is_two_point(x: Sample, support: SupportInterval) -> bool:
    if not support.is_two_ended:
        return False
    a, b = support.lower, support.upper
    return bool(np.all((x.values == a) | (x.values == b)))


def maximize_induced_mean(x: Sample, u, T: OrderingFunction,
                          support: SupportInterval) -> MaximizerSolution:
    """Maximize m(y, u) over {y : T(y) <= T(x)} inside the support.

    Parameters
    ----------
    x : Sample
        Reference sample defining the constraint level T(x).
    u : UniformDraw or sorted array-like
        Levels the induced mean is taken at.
    T : OrderingFunction
    support : SupportInterval
        Upper end must be finite. An unbounded lower end is handled by the
        exact clamps described in the module docstring and reported via
        ``status="clamped_one_ended"``.

    Notes
    -----
    For ``MeanT`` with every observation at one of the two ends of the
    support, the feasible set is treated on the two-point domain {a, b}
    rather than the full interval, where the sample itself attains the
    supremum. This is the reduction that makes the Monte-Carlo bound for
    binary data coincide with the exact binomial bound.
    """
    levels = u.levels if isinstance(u, UniformDraw) else UniformDraw(u).levels
    if levels.size != x.n:
        raise ValueError(f"draw length {levels.size} does not match n {x.n}")
    _validate_inputs(x, support)
    if isinstance(T, MeanT) and _is_two_point(x, support):
        value = induced_mean(x, levels, support)
        return MaximizerSolution(value=value, argmax=x.sorted.copy(),
                                 status="optimal", certified_feasible=True)
    t_level = eval_T(T, x, support)
    problem = sup_problem(T, t_level, x.n, support)
    value, y = problem.solve_single(levels)
    scale = _scale_of(support, fallback=max(1.0, abs(support.upper),
                                            float(np.max(np.abs(x.values)))))
    tol = 1e-9 * scale
    y = np.maximum.accumulate(np.clip(y, problem.a_eff, problem.b))
    t_y = _eval_T_sorted(T, y, support)
    feasible = (t_y <= t_level + tol
                and value >= induced_mean(x, levels, support) - tol)
    return MaximizerSolution(value=value, argmax=y, status=problem.status,
                             certified_feasible=bool(feasible))


def _eval_T_sorted(T: OrderingFunction, y_sorted: np.ndarray,
                   support: SupportInterval) -> float:
    if isinstance(T, AndersonT):
        return induced_mean_sorted(y_sorted, T.envelope.levels,
                                   support.finite_upper())
    if isinstance(T, L2T):
        return float(np.mean(y_sorted**2))
    return float(np.mean(y_sorted))


def sup_first_order_statistic(x: Sample, T: OrderingFunction,
                              support: SupportInterval) -> float:
    """Largest first order statistic attainable inside {y : T(y) <= T(x)}.

    Each functional is minimized, for a fixed smallest coordinate g, by the
    constant vector g * ones, and is increasing along that diagonal, so the
    supremum is the diagonal crossing point capped at the support's upper
    end.
    """
    _validate_inputs(x, support)
    b = support.finite_upper()
    t_level = eval_T(T, x, support)
    if isinstance(T, MeanT):
        crossing = t_level
    elif isinstance(T, L2T):
        crossing = math.sqrt(max(t_level, 0.0))
    else:
        env = T.envelope.levels
        if env.size != x.n:
            raise ValueError(
                f"envelope length {env.size} does not match n {x.n}")
        if env[-1] <= 0.0:
            return b
        crossing = (t_level - b * (1.0 - env[-1])) / env[-1]
    return min(b, crossing)
