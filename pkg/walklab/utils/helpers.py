"""
Helper utility functions: confidence intervals, exponential fits,
deterministic per-trial random streams and small parsers.
"""

import logging
import math
import zlib
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..core.config import Config
from ..core.errors import ConfigError
from ..models.reports import ExpFit

logger = logging.getLogger(__name__)


# === Confidence intervals ===

def confidence_level(z: float) -> float:
    """Two-sided coverage of +/- z standard normal deviations."""
    return float(2 * stats.norm.cdf(z) - 1)


def wilson_interval(successes: int, trials: int, z: Optional[float] = None) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion at z sigma."""
    if trials <= 0:
        return 0.0, 1.0
    z = Config.Z_SCORE if z is None else z
    k = int(round(successes))
    result = stats.binomtest(k, int(trials)).proportion_ci(
        confidence_level=confidence_level(z), method="wilson"
    )
    return float(result.low), float(result.high)


def proportion_interval(successes: float, trials: int, exact: bool, z: Optional[float] = None) -> Tuple[float, float]:
    """Wilson interval for sampled counts; a point interval for enumerated probabilities."""
    if exact:
        p = float(successes)
        return p, p
    return wilson_interval(successes, trials, z)


# === Exponential fits ===

def positive_window(ns: Sequence[int], ps: Sequence[float]) -> Tuple[int, int]:
    """Index range [lo, hi) of the longest contiguous run with positive probabilities."""
    best = (0, 0)
    start = None
    for i, p in enumerate(list(ps) + [0.0]):
        if p > 0 and start is None:
            start = i
        elif p <= 0 and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return best


def fit_exponential(ns: Sequence[int], ps: Sequence[float], source: str = "p_hat") -> Optional[ExpFit]:
    """
    Least-squares fit of log p = log K + n log c over the largest window of
    positive probabilities. Returns None when fewer than two points qualify.
    """
    lo, hi = positive_window(ns, ps)
    if hi - lo < 2:
        return None
    x = np.asarray(ns[lo:hi], dtype=float)
    y = np.log(np.asarray(ps[lo:hi], dtype=float))
    if np.ptp(x) == 0:
        return None
    fit = stats.linregress(x, y)
    r_squared = float(fit.rvalue ** 2) if np.ptp(y) > 0 else 0.0
    return ExpFit(
        K=float(math.exp(fit.intercept)),
        c=float(math.exp(fit.slope)),
        r_squared=r_squared,
        window=(int(ns[lo]), int(ns[hi - 1])),
        slope=float(fit.slope),
        source=source,
    )


# === Deterministic random streams ===

def stream_id(name: str) -> int:
    """Stable integer id for a named random stream."""
    return zlib.crc32(name.encode("utf-8"))


def trial_rng(seed: int, stream: int, trial: int) -> np.random.Generator:
    """Generator for one trial, independent of batching and worker scheduling."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(trial))))


# === Parsing ===

def parse_kv(text: str) -> Dict[str, float]:
    """Parse 'K=1,c=0.9,c0=0.1' into a dict of floats."""
    out: Dict[str, float] = {}
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"Expected key=value, got {part!r}", [f"bad item {part!r} in {text!r}"])
        key, value = part.split("=", 1)
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"Value for {key.strip()!r} is not a number: {value!r}",
                              [f"bad number {value!r}"]) from None
    return out


def parse_int_list(text: str) -> List[int]:
    """'20,40,60' or '20:101:20' (start:stop:step)."""
    text = (text or "").strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, *step = (int(v) for v in text.split(":"))
            return list(range(start, stop, step[0] if step else 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"Cannot parse integer list {text!r}", [f"bad list {text!r}"]) from None
