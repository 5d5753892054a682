"""
Random walks on free groups and their orbit maps into a model space.

Group elements are carried twice along a path: as reduced words (needed to
translate sets) and in the space's own representation (matrices for the
half-plane), composed incrementally so a path of length n costs O(n).
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.caching import cache_result
from ..core.config import Config
from ..core.errors import ConfigError, EstimatorError
from ..models import words
from ..models.measure import SamplePath, StepDistribution
from ..models.quasiconvex import QuasiconvexSet
from ..models.reports import CheckReport
from ..models.space import FreeGroupTree, ModelSpace
from ..utils.helpers import stream_id, trial_rng
from .geometry import NUMERIC_SLACK, distance_to

logger = logging.getLogger(__name__)

PATH_STREAM = stream_id("walker.path")


def sample_increments(mu: StepDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    """Indices into mu.support for n i.i.d. steps."""
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    return rng.choice(len(mu.support), size=n, p=mu.weights)


def sample_path(mu: StepDistribution, n: int, seed: int) -> SamplePath:
    if n < 0:
        raise ConfigError(f"Path length must be nonnegative, got {n}")
    rng = trial_rng(seed, PATH_STREAM, 0)
    steps = tuple(mu.elements[i] for i in sample_increments(mu, rng, n))
    locations = [""]
    for g in steps:
        locations.append(words.multiply(locations[-1], g))
    return SamplePath(seed, steps, tuple(locations))


@dataclass(frozen=True)
class Trajectory:
    """Words w_0..w_n and points w_k x0 of one path."""

    words: Tuple[str, ...]
    points: Tuple
    weight: float = 1.0

    @property
    def n(self) -> int:
        return len(self.words) - 1


class PathBuilder:
    """Turns increment indices into trajectories for a fixed (space, mu, x0)."""

    def __init__(self, space: ModelSpace, mu: StepDistribution, x0=None):
        if mu.rank > space.rank:
            raise ConfigError(f"Step distribution uses rank {mu.rank} but the space has rank {space.rank}")
        self.space = space
        self.mu = mu
        self.x0 = space.basepoint() if x0 is None else space.validate_point(x0)
        self._tree = isinstance(space, FreeGroupTree)
        self._elements = [space.element(w) for w in mu.elements]
        self._identity = space.element("")
        self._weights = mu.weights

    def build(self, indices: Sequence[int]) -> Trajectory:
        ws = [""]
        pts = [self.x0]
        g = self._identity
        for i in indices:
            ws.append(words.multiply(ws[-1], self.mu.elements[i]))
            if self._tree:
                pts.append(words.multiply(ws[-1], self.x0))
            else:
                g = self.space.compose(g, self._elements[i])
                pts.append(self.space.apply(g, self.x0))
        return Trajectory(tuple(ws), tuple(pts), self.weight(indices))

    def weight(self, indices: Sequence[int]) -> float:
        w = 1.0
        for i in indices:
            w *= float(self._weights[i])
        return w


def enumeration_size(mu: StepDistribution, n: int) -> int:
    return len(mu.support) ** n


def check_enumerable(mu: StepDistribution, n: int) -> int:
    size = enumeration_size(mu, n)
    if size > Config.ENUMERATION_LIMIT:
        raise ConfigError(
            f"Enumeration of {len(mu.support)}^{n} = {size} paths exceeds the limit {Config.ENUMERATION_LIMIT}",
            [f"use mode=sample or n <= {int(math.log(Config.ENUMERATION_LIMIT, max(2, len(mu.support))))}"],
        )
    return size


def path_indices(index: int, base: int, n: int) -> List[int]:
    """The index-th path in lexicographic order, as n digits in the given base."""
    digits = [0] * n
    for k in range(n - 1, -1, -1):
        index, digits[k] = divmod(index, base)
    return digits


def reflect(mu: StepDistribution) -> StepDistribution:
    """The reflected law g -> mu(g^-1)."""
    return StepDistribution.from_mapping({words.inverse(w): p for w, p in mu.support}, mu.rank)


MASS_TOLERANCE = 1e-10


@cache_result(max_entries=32)
def iterate_measure(mu: StepDistribution, N: int, cap: Optional[int] = None) -> StepDistribution:
    """
    Exact N-fold convolution mu^(*N) with word reduction.

    mu is rescaled to total mass one before convolving; the result is not
    rescaled, and rounding drift above MASS_TOLERANCE is an error.
    """
    if N < 1:
        raise ConfigError(f"N must be at least 1, got {N}")
    cap = Config.SUPPORT_CAP if cap is None else cap
    base = math.fsum(p for _, p in mu.support)
    steps = [(v, pv / base) for v, pv in mu.support]
    current: Dict[str, float] = dict(steps)
    for step in range(2, N + 1):
        nxt: Dict[str, float] = defaultdict(float)
        for u, pu in current.items():
            for v, pv in steps:
                nxt[words.multiply(u, v)] += pu * pv
        if len(nxt) > cap:
            raise ConfigError(f"Support of mu^{step} has {len(nxt)} elements, above the cap {cap}")
        current = nxt
    drift = abs(math.fsum(current.values()) - 1.0)
    if drift > MASS_TOLERANCE:
        raise EstimatorError(f"mu^{N} lost mass in convolution: drift {drift:.3e} above {MASS_TOLERANCE:g}")
    items = sorted(current.items(), key=lambda item: words.shortlex_key(item[0]))
    logger.debug(f"[Walker] mu^{N}: {len(items)} support elements, mass drift {drift:.2e}")
    return StepDistribution(tuple(items), mu.rank)


def check_semigroup_support(mu: StepDistribution, max_length: int = 6, strict: bool = False,
                            node_cap: int = 200000) -> CheckReport:
    """
    Every support element's inverse is a product of at most max_length
    support elements, so the support generates a group as a semigroup.
    """
    targets = {words.inverse(w) for w in mu.elements}
    reached = {""}
    frontier = {""}
    for _ in range(max_length):
        frontier = {words.multiply(u, v) for u in frontier for v in mu.elements} - reached
        reached |= frontier
        if targets <= reached or len(reached) > node_cap:
            break
    report = CheckReport("semigroup_support", checked=len(targets),
                         details={"max_length": max_length, "products_seen": len(reached)})
    for w in sorted(targets - reached, key=words.shortlex_key):
        report.record({"missing_inverse": w})
    if strict and not report.passed:
        raise ConfigError("Support does not generate a group as a semigroup",
                          [f"no product of <= {max_length} steps equals {v['missing_inverse']!r}" for v in report.violations])
    return report


def phi_R(space: ModelSpace, D: QuasiconvexSet, x, R: float) -> int:
    """floor(d(D, x) / R)."""
    if not R > 0:
        raise ConfigError(f"R must be positive, got {R}")
    return int(math.floor(distance_to(space, D, x) / R))


def iterated_constants(L: float, c: float, R: float, N: int) -> Tuple[float, float]:
    """Constants after replacing mu by mu^(*N): L' = L + R N, c' = c^(1/N)."""
    if N < 1:
        raise ConfigError("N must be at least 1")
    return L + R * N, c ** (1.0 / N)


def first_free_letter(space: ModelSpace, D: QuasiconvexSet) -> str:
    """A generator whose powers leave D (used to start walks away from it)."""
    x0 = space.basepoint()
    for letter in words.alphabet(space.rank):
        if letter.islower() and distance_to(space, D, space.act(letter, x0)) > NUMERIC_SLACK:
            return letter
    return words.alphabet(space.rank)[0]


def start_at_level(space: ModelSpace, D: QuasiconvexSet, R: float, t: int = 1, max_length: int = 256) -> str:
    """Shortest power of a free letter g with phi_R(g x0) = t."""
    letter = first_free_letter(space, D)
    x0 = space.basepoint()
    for k in range(1, max_length + 1):
        g = letter * k
        if phi_R(space, D, space.act(g, x0), R) >= t:
            return g
    raise ConfigError(f"No power of {letter!r} up to {max_length} reaches level {t} at R={R}")
