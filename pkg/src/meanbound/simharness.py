"""Simulation harness: expected-value, quantile, and coverage experiments.

Runs a grid of (sample size, alpha, method) cells against a parametric
distribution, computes one confidence bound per trial, reduces the trials
per the chosen metric, and emits rows matching the CSV schema
``distribution,params,n,alpha,method,metric,value,stderr,trials,seed``.

Distribution samplers are implemented here rather than taken from a
library generator so the draw streams are pinned down by this module
alone: uniforms come straight from the counter-based generator, normals
by inverse transform, lognormals by exponentiating normals, binomials as
Bernoulli sums, Poisson by Knuth's product-of-uniforms method (requires
lambda <= 50), and betas as a gamma ratio with Marsaglia-Tsang gamma
variates. Their first two moments are validated in the test suite.

Determinism: every trial draws from a generator seeded by
(root seed, stream tag, cell index, trial index), so any cell or trial
can be recomputed in isolation and results do not depend on execution
order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from meanbound.classical import (
    anderson_ucb,
    clopper_pearson_ucb,
    hoeffding_ucb,
    lower_bound_via_negation,
    maurer_pontil_ucb,
    student_t_ucb,
)
from meanbound.core import Envelope, Sample, SupportInterval, quantile_index
from meanbound.envelopes import anderson_envelope, cached_beta_n
from meanbound.newbound import BoundRequest, bound_table, new_bound
from meanbound.ordering import AndersonT, L2T, MeanT
from meanbound._rng import child_seed, generator

__all__ = [
    "DistributionSpec",
    "ExperimentRow",
    "ExperimentSpec",
    "HistogramRow",
    "histogram_to_csv",
    "lognormal_skew_demo",
    "load_spec",
    "parse_distribution",
    "parse_spec_text",
    "rows_to_csv",
    "run_experiment",
    "sample_distribution",
    "skewness_zscore",
]

ROW_HEADER = "distribution,params,n,alpha,method,metric,value,stderr,trials,seed"
HISTOGRAM_HEADER = "bin_left,bin_right,count,n,trials,seed"

CLASSICAL_METHODS = ("hoeffding", "maurer-pontil", "student-t",
                     "clopper-pearson", "anderson")
NEW_METHODS = ("new-anderson", "new-l2", "new-mean")
KNOWN_METHODS = CLASSICAL_METHODS + NEW_METHODS

_DIST_RE = re.compile(r"^\s*([a-z]+)\s*\(\s*([^()]*?)\s*\)\s*$")


@dataclass(frozen=True)
class DistributionSpec:
    """A named parametric distribution with its analytic mean and support."""

    name: str
    params: tuple[float, ...]
    mean: float
    lower: float | None
    upper: float | None

    @property
    def params_text(self) -> str:
        return ";".join(_fmt_float(p) for p in self.params)


def _fmt_float(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def parse_distribution(text: str) -> DistributionSpec:
    """Parse 'name(p1,p2,...)' into a DistributionSpec."""
    m = _DIST_RE.match(text)
    if not m:
        raise ValueError(f"malformed distribution {text!r}; expected name(a,b)")
    name = m.group(1)
    try:
        params = tuple(float(p) for p in m.group(2).split(",") if p.strip())
    except ValueError as exc:
        raise ValueError(f"malformed distribution parameters in {text!r}") from exc

    def need(k: int) -> None:
        if len(params) != k:
            raise ValueError(
                f"{name} takes {k} parameter(s), got {len(params)}")

    if name == "beta":
        need(2)
        a, b = params
        if a <= 0 or b <= 0:
            raise ValueError("beta parameters must be positive")
        return DistributionSpec(name, params, a / (a + b), 0.0, 1.0)
    if name == "uniform":
        need(2)
        a, b = params
        if not a < b:
            raise ValueError("uniform needs a < b")
        return DistributionSpec(name, params, (a + b) / 2.0, a, b)
    if name == "binomial":
        need(2)
        m_, p = params
        if m_ < 1 or m_ != int(m_):
            raise ValueError("binomial count must be a positive integer")
        if not 0.0 <= p <= 1.0:
            raise ValueError("binomial probability must be in [0, 1]")
        return DistributionSpec(name, params, m_ * p, 0.0, m_)
    if name == "poisson":
        need(1)
        lam = params[0]
        if lam <= 0:
            raise ValueError("poisson rate must be positive")
        if lam > 50:
            raise ValueError("poisson rate above 50 is not supported by the "
                             "product-of-uniforms sampler")
        return DistributionSpec(name, params, lam, 0.0, None)
    if name == "lognormal":
        need(2)
        mu, sigma = params
        if sigma <= 0:
            raise ValueError("lognormal sigma must be positive")
        return DistributionSpec(name, params, math.exp(mu + sigma**2 / 2.0),
                                0.0, None)
    raise ValueError(f"unknown distribution {name!r}")


def _normals(rng: np.random.Generator, size: int) -> np.ndarray:
    # inverse transform keeps normal draws a pure function of the uniforms
    return ndtri(rng.random(size))


def _gammas(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    """Marsaglia-Tsang gamma variates (unit scale)."""
    if shape < 1.0:
        boost = rng.random(size) ** (1.0 / shape)
        return _gammas(rng, shape + 1.0, size) * boost
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        want = size - filled
        z = _normals(rng, want)
        v = (1.0 + c * z) ** 3
        u = rng.random(want)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (v > 0.0) & (np.log(u) <
                              0.5 * z**2 + d - d * v + d * np.log(v))
        accepted = d * v[ok]
        take = min(accepted.size, want)
        out[filled:filled + take] = accepted[:take]
        filled += take
    return out


def _poissons(rng: np.random.Generator, lam: float, size: int) -> np.ndarray:
    """Knuth's product-of-uniforms counter."""
    limit = math.exp(-lam)
    counts = np.zeros(size, dtype=np.int64)
    prod = np.ones(size)
    active = np.arange(size)
    while active.size:
        prod[active] *= rng.random(active.size)
        still = prod[active] > limit
        counts[active[still]] += 1
        active = active[still]
    return counts.astype(float)


def sample_distribution(dist: DistributionSpec, rng: np.random.Generator,
                        size: int) -> np.ndarray:
    if dist.name == "uniform":
        a, b = dist.params
        return a + (b - a) * rng.random(size)
    if dist.name == "beta":
        a, b = dist.params
        g1 = _gammas(rng, a, size)
        g2 = _gammas(rng, b, size)
        return g1 / (g1 + g2)
    if dist.name == "binomial":
        m, p = dist.params
        flips = rng.random((size, int(m))) < p
        return flips.sum(axis=1).astype(float)
    if dist.name == "poisson":
        return _poissons(rng, dist.params[0], size)
    if dist.name == "lognormal":
        mu, sigma = dist.params
        return np.exp(mu + sigma * _normals(rng, size))
    raise ValueError(f"unknown distribution {dist.name!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment grid: distribution x sample sizes x alphas x methods."""

    distribution: str
    support_declared: SupportInterval
    sample_sizes: tuple[int, ...]
    alpha: tuple[float, ...]
    trials: int
    methods: tuple[str, ...]
    metric: str
    seed: int = 0
    side: str = "upper"
    mc_samples: int = 10_000
    beta_mc: int = 1_000_000

    def __post_init__(self):
        alphas = (self.alpha,) if isinstance(self.alpha, float) \
            else tuple(self.alpha)
        object.__setattr__(self, "alpha", alphas)
        object.__setattr__(self, "sample_sizes",
                           tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.sample_sizes:
            raise ValueError("sample_sizes must be nonempty")
        if any(n < 1 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 1")
        if not self.alpha:
            raise ValueError("alpha grid must be nonempty")
        if any(not 0.0 < a < 1.0 for a in self.alpha):
            raise ValueError("every alpha must be in (0, 1)")
        if self.metric not in ("expected_value", "alpha_quantile", "coverage"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.side not in ("upper", "lower"):
            raise ValueError(f"side must be 'upper' or 'lower', got {self.side!r}")
        for m in self.methods:
            if m not in KNOWN_METHODS:
                raise ValueError(f"unknown method {m!r}")
        if not self.methods:
            raise ValueError("methods must be nonempty")


@dataclass(frozen=True)
class ExperimentRow:
    distribution: str
    params: str
    n: int
    alpha: float
    method: str
    metric: str
    value: float
    stderr: float
    trials: int
    seed: int

    def as_csv(self) -> str:
        return (f"{self.distribution},{self.params},{self.n},{self.alpha!r},"
                f"{self.method},{self.metric},{self.value!r},{self.stderr!r},"
                f"{self.trials},{self.seed}")


@dataclass(frozen=True)
class HistogramRow:
    bin_left: float
    bin_right: float
    count: int
    n: int
    trials: int
    seed: int

    def as_csv(self) -> str:
        return (f"{self.bin_left!r},{self.bin_right!r},{self.count},"
                f"{self.n},{self.trials},{self.seed}")


def rows_to_csv(rows: list[ExperimentRow]) -> str:
    return "\n".join([ROW_HEADER] + [r.as_csv() for r in rows]) + "\n"


def histogram_to_csv(rows: list[HistogramRow]) -> str:
    return "\n".join([HISTOGRAM_HEADER] + [r.as_csv() for r in rows]) + "\n"


def _check_containment(dist: DistributionSpec, declared: SupportInterval) -> None:
    if dist.upper is None:
        if declared.upper is not None:
            raise ValueError(
                f"declared support {declared} cannot contain the unbounded "
                f"upper tail of {dist.name}")
    elif declared.upper is not None and declared.upper < dist.upper:
        raise ValueError(
            f"declared upper end {declared.upper} is below the "
            f"distribution's upper end {dist.upper}")
    if declared.lower is not None:
        if dist.lower is None or declared.lower > dist.lower:
            raise ValueError(
                f"declared lower end {declared.lower} is above the "
                f"distribution's lower end {dist.lower}")


def _ordering_for_method(method: str, envelope: Envelope | None):
    if method == "new-anderson":
        return AndersonT(envelope)
    if method == "new-l2":
        return L2T()
    return MeanT()


def _classical_value(method: str, x: Sample, support: SupportInterval,
                     alpha: float, side: str,
                     envelope: Envelope | None) -> float:
    if side == "lower":
        return lower_bound_via_negation(method, x, support, alpha,
                                        envelope=envelope).value
    if method == "hoeffding":
        return hoeffding_ucb(x, support, alpha).value
    if method == "maurer-pontil":
        return maurer_pontil_ucb(x, support, alpha).value
    if method == "student-t":
        return student_t_ucb(x, alpha).value
    if method == "clopper-pearson":
        return clopper_pearson_ucb(x, alpha).value
    return anderson_ucb(x, support, envelope).value


def _reduce(metric: str, bounds: np.ndarray, alpha: float, side: str,
            mean: float) -> tuple[float, float]:
    trials = bounds.size
    if metric == "expected_value":
        value = float(bounds.mean())
        stderr = float(bounds.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        return value, stderr
    if metric == "alpha_quantile":
        order = np.sort(bounds)
        level = alpha if side == "upper" else 1.0 - alpha
        idx = quantile_index(level, trials)
        half = max(1, math.ceil(math.sqrt(trials * alpha * (1.0 - alpha))))
        hi = order[min(idx + half, trials) - 1]
        lo = order[max(idx - half, 1) - 1]
        return float(order[idx - 1]), float((hi - lo) / 2.0)
    # coverage
    if side == "upper":
        covered = bounds >= mean
    else:
        covered = bounds <= mean
    value = float(np.mean(covered))
    stderr = math.sqrt(value * (1.0 - value) / trials)
    return value, stderr


def _binary_table_compatible(spec: ExperimentSpec,
                             dist: DistributionSpec) -> bool:
    return (dist.name == "binomial" and dist.params[0] == 1
            and spec.support_declared.is_two_ended
            and spec.support_declared.lower == 0.0
            and spec.support_declared.upper == 1.0
            and spec.side == "upper")


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRow]:
    """Run every (n, alpha, method) cell of the grid and reduce per metric.

    Draws are fully determined by spec.seed: sampling uses substream
    (seed, 2, cell, trial) and Monte-Carlo bounds use (seed, 3, cell,
    trial), so rows are reproducible cell by cell.
    """
    dist = parse_distribution(spec.distribution)
    _check_containment(dist, spec.support_declared)
    support = spec.support_declared
    needs_envelope = bool({"anderson", "new-anderson"} & set(spec.methods))
    rows: list[ExperimentRow] = []
    envelopes: dict[tuple[int, float], Envelope] = {}
    cell = 0
    for n in spec.sample_sizes:
        for alpha in spec.alpha:
            envelope = None
            if needs_envelope:
                key = (n, alpha)
                if key not in envelopes:
                    beta_seed = child_seed(spec.seed, 1, n,
                                           int(round(alpha * 10**9)))
                    est = cached_beta_n(n, alpha, spec.beta_mc, beta_seed)
                    envelopes[key] = anderson_envelope(n, est.value, alpha)
                envelope = envelopes[key]
            for method in spec.methods:
                table = None
                if method == "new-mean" and _binary_table_compatible(spec, dist):
                    lattice = np.arange(n + 1) / n
                    table = bound_table(
                        lattice, n, support, alpha, kind="mean",
                        mc_samples=spec.mc_samples,
                        seed=child_seed(spec.seed, 3, cell), binary=True)
                bounds = np.empty(spec.trials)
                for trial in range(spec.trials):
                    srng = generator(child_seed(spec.seed, 2, cell, trial))
                    values = sample_distribution(dist, srng, n)
                    _check_declared(values, support)
                    x = Sample(values)
                    if table is not None:
                        bounds[trial] = table.lookup(float(values.mean()))
                    elif method in CLASSICAL_METHODS:
                        bounds[trial] = _classical_value(
                            method, x, support, alpha, spec.side, envelope)
                    else:
                        req = BoundRequest(
                            x=x, support=support, alpha=alpha,
                            ordering=_ordering_for_method(method, envelope),
                            mc_samples=spec.mc_samples,
                            seed=child_seed(spec.seed, 3, cell, trial),
                            side=spec.side)
                        bounds[trial] = new_bound(req).value
                value, stderr = _reduce(spec.metric, bounds, alpha,
                                        spec.side, dist.mean)
                rows.append(ExperimentRow(
                    distribution=dist.name, params=dist.params_text, n=n,
                    alpha=alpha, method=method, metric=spec.metric,
                    value=value, stderr=stderr, trials=spec.trials,
                    seed=spec.seed))
                cell += 1
    return rows


def _check_declared(values: np.ndarray, support: SupportInterval) -> None:
    if support.upper is not None and values.max() > support.upper:
        raise ValueError(
            f"drawn value {values.max()} violates the declared support")
    if support.lower is not None and values.min() < support.lower:
        raise ValueError(
            f"drawn value {values.min()} violates the declared support")


def lognormal_skew_demo(n: int, trials: int = 10_000, seed: int = 0,
                        bins: int = 40) -> list[HistogramRow]:
    """Histogram of the size-n sample mean of lognormal(0, 1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    dist = parse_distribution("lognormal(0,1)")
    rng = generator(seed)
    means = np.empty(trials)
    for t in range(trials):
        means[t] = sample_distribution(dist, rng, n).mean()
    counts, edges = np.histogram(means, bins=bins)
    return [HistogramRow(bin_left=float(edges[i]), bin_right=float(edges[i + 1]),
                         count=int(counts[i]), n=n, trials=trials, seed=seed)
            for i in range(counts.size)]


def skewness_zscore(values) -> tuple[float, float]:
    """Sample skewness and its large-sample z-score (se ~= sqrt(6/n))."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        raise ValueError("skewness needs at least 3 values")
    c = v - v.mean()
    m2 = float(np.mean(c**2))
    if m2 == 0.0:
        return 0.0, 0.0
    g1 = float(np.mean(c**3)) / m2**1.5
    return g1, g1 / math.sqrt(6.0 / v.size)


_SPEC_KEYS = {
    "distribution", "support", "sample_sizes", "alpha", "trials", "methods",
    "metric", "seed", "side", "mc_samples", "beta_mc",
}


def _parse_end(token: str) -> float | None:
    if token.lower() in ("inf", "+inf", "none"):
        return None
    if token.lower() == "-inf":
        return None
    return float(token)


def parse_spec_text(text: str) -> ExperimentSpec:
    """Parse a config of `key = value` lines (# starts a comment)."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"line {lineno}: expected `key = value`, got {body!r}")
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SPEC_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ValueError(f"line {lineno}: empty value for {key!r}")
        raw[key] = value
    for required in ("distribution", "support", "sample_sizes", "trials",
                     "methods", "metric"):
        if required not in raw:
            raise ValueError(f"missing required key {required!r}")
    ends = raw["support"].replace(",", " ").split()
    if len(ends) != 2:
        raise ValueError(f"support needs two ends, got {raw['support']!r}")
    support = SupportInterval(_parse_end(ends[0]), _parse_end(ends[1]))
    sizes = tuple(int(tok) for tok in raw["sample_sizes"].replace(",", " ").split())
    alphas = tuple(float(tok)
                   for tok in raw.get("alpha", "0.05").replace(",", " ").split())
    methods = tuple(raw["methods"].replace(",", " ").split())
    return ExperimentSpec(
        distribution=raw["distribution"],
        support_declared=support,
        sample_sizes=sizes,
        alpha=alphas,
        trials=int(raw["trials"]),
        methods=methods,
        metric=raw["metric"],
        seed=int(raw.get("seed", "0")),
        side=raw.get("side", "upper"),
        mc_samples=int(raw.get("mc_samples", "10000")),
        beta_mc=int(raw.get("beta_mc", "1000000")),
    )


def load_spec(path) -> ExperimentSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec_text(fh.read())
