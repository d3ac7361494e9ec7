"""CDF lower-confidence envelopes.

An envelope l makes the event {F(x_(i)) >= l_(i) for all i} hold with
probability at least 1-alpha under any continuous F. Two constructions are
provided: the equal-width envelope max(0, i/n - beta(n)), where beta(n) is
the 1-alpha quantile of the one-sided Kolmogorov-Smirnov statistic
sup_t (F_hat(t) - F(t)) estimated by Monte Carlo, and the closed-form DKW
envelope with margin sqrt(ln(1/alpha)/(2n)).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from meanbound import _rng
from meanbound.core import Envelope, quantile_index

__all__ = [
    "BetaNEstimate",
    "estimate_beta_n",
    "cached_beta_n",
    "beta_n_cache_dir",
    "anderson_envelope",
    "dkw_envelope",
    "DEFAULT_BETA_MC",
]

# Monte-Carlo draw count used when callers do not choose one.
DEFAULT_BETA_MC = 1_000_000

_CACHE_FILE = "beta_n.csv"
_CACHE_HEADER = "n,alpha,mc_samples,seed,beta_n"


@dataclass(frozen=True)
class BetaNEstimate:
    """Monte-Carlo estimate of the one-sided KS quantile beta(n).

    ``stderr`` is an order-statistic spacing estimate of the quantile's own
    Monte-Carlo error (half the distance between the order statistics one
    binomial standard deviation to either side of the quantile index).
    """

    n: int
    alpha: float
    value: float
    mc_samples: int
    seed: int
    stderr: float


def _validate_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return alpha


def estimate_beta_n(n: int, alpha: float, mc_samples: int = DEFAULT_BETA_MC,
                    seed: int = 0) -> BetaNEstimate:
    """Estimate beta(n), the 1-alpha quantile of max_i (i/n - U_(i)).

    Draws ``mc_samples`` sorted uniform vectors of size n and returns the
    ceil((1-alpha) * mc_samples)-th order statistic (1-based) of the
    per-draw statistics. Deterministic for fixed (n, alpha, mc_samples,
    seed).
    """
    alpha = _validate_alpha(alpha)
    n = int(n)
    mc_samples = int(mc_samples)
    if n < 1:
        raise ValueError("n must be >= 1")
    if mc_samples < 1:
        raise ValueError("mc_samples must be >= 1")
    grid = np.arange(1, n + 1) / n
    stats = np.empty(mc_samples)
    start = 0
    for block in _rng.sorted_uniform_blocks(seed, mc_samples, n):
        stats[start:start + block.shape[0]] = (grid - block).max(axis=1)
        start += block.shape[0]
    stats.sort()
    k = quantile_index(1.0 - alpha, mc_samples)
    value = float(stats[k - 1])
    half = max(1, math.ceil(math.sqrt(mc_samples * alpha * (1.0 - alpha))))
    lo = stats[max(k - half, 1) - 1]
    hi = stats[min(k + half, mc_samples) - 1]
    stderr = float(hi - lo) / 2.0
    return BetaNEstimate(n=n, alpha=alpha, value=value,
                         mc_samples=mc_samples, seed=int(seed), stderr=stderr)


def beta_n_cache_dir() -> Path:
    """Cache directory: MEANBOUND_CACHE_DIR if set, else ~/.cache/meanbound."""
    env = os.environ.get("MEANBOUND_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "meanbound"


def _read_cache(path: Path) -> dict[tuple[int, float, int, int], float]:
    table: dict[tuple[int, float, int, int], float] = {}
    try:
        lines = path.read_text().splitlines()
    except OSError:
        return table
    for line in lines[1:] if lines[:1] == [_CACHE_HEADER] else []:
        parts = line.split(",")
        if len(parts) != 5:
            continue
        try:
            key = (int(parts[0]), float(parts[1]), int(parts[2]), int(parts[3]))
            table[key] = float(parts[4])
        except ValueError:
            continue
    return table


def cached_beta_n(n: int, alpha: float, mc_samples: int = DEFAULT_BETA_MC,
                  seed: int = 0, cache_dir: Path | str | None = None) -> BetaNEstimate:
    """Disk-backed estimate_beta_n, keyed by (n, alpha, mc_samples, seed).

    Cache hits skip the Monte Carlo entirely (their stderr is reported as
    0.0 since the spacing diagnostic is not stored). Unreadable or corrupt
    cache files are ignored and rewritten.
    """
    alpha = _validate_alpha(alpha)
    directory = Path(cache_dir) if cache_dir is not None else beta_n_cache_dir()
    path = directory / _CACHE_FILE
    key = (int(n), alpha, int(mc_samples), int(seed))
    cached = _read_cache(path).get(key)
    if cached is not None:
        return BetaNEstimate(n=int(n), alpha=alpha, value=cached,
                             mc_samples=int(mc_samples), seed=int(seed), stderr=0.0)
    est = estimate_beta_n(n, alpha, mc_samples, seed)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        fresh = not path.exists() or not path.read_text().startswith(_CACHE_HEADER)
        with open(path, "w" if fresh else "a") as fh:
            if fresh:
                fh.write(_CACHE_HEADER + "\n")
            fh.write(f"{est.n},{est.alpha!r},{est.mc_samples},{est.seed},{est.value!r}\n")
    except OSError:
        pass  # caching is best-effort; the estimate is still returned
    return est


def anderson_envelope(n: int, beta_n: float, alpha: float | None = None) -> Envelope:
    """Equal-width envelope l_i = max(0, i/n - beta(n))."""
    beta_n = float(beta_n)
    if not 0.0 <= beta_n <= 1.0:
        raise ValueError(f"beta_n must be in [0, 1], got {beta_n}")
    levels = np.maximum(0.0, np.arange(1, int(n) + 1) / int(n) - beta_n)
    return Envelope(levels, alpha=alpha)


def dkw_envelope(n: int, alpha: float) -> Envelope:
    """Closed-form envelope l_i = max(0, i/n - sqrt(ln(1/alpha)/(2n))).

    The coverage guarantee behind this envelope needs alpha <= 0.5; larger
    values are accepted but flagged in the result's ``warning`` field.
    """
    alpha = _validate_alpha(alpha)
    margin = math.sqrt(math.log(1.0 / alpha) / (2.0 * int(n)))
    levels = np.maximum(0.0, np.arange(1, int(n) + 1) / int(n) - margin)
    warning = None
    if alpha > 0.5:
        warning = "alpha above 0.5: the DKW coverage guarantee does not apply"
    return Envelope(levels, alpha=alpha, warning=warning)
