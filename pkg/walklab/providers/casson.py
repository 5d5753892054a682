"""
Casson-invariant bookkeeping and the integer-walk side of the existence
argument: exact local probabilities of a walk on Z, and the scale where a
c0/sqrt(n) lower bound overtakes an exponential K c^n upper bound.
"""
import logging
import math
from collections import defaultdict
from typing import Dict, Iterable, NamedTuple, Sequence, Tuple

import numpy as np

from ..core.caching import cache_result
from ..core.errors import ConfigError, EstimatorError
from ..models import words
from ..models.casson import HomologySphereValue, S3, SurgeryKnot, TREFOIL
from ..models.measure import StepDistribution, ZStepLaw

logger = logging.getLogger(__name__)


def casson_surgery(knot: SurgeryKnot, m: int) -> HomologySphereValue:
    """lambda(S^3 + (1/m) knot) = m * Delta''(1)/2."""
    if int(m) != m:
        raise ConfigError(f"Surgery coefficient 1/m needs an integer m, got {m!r}")
    m = int(m)
    h = int(knot.half_second_derivative)
    return HomologySphereValue(m * h, ("surgery", knot.name, h, m))


def connected_sum(a: HomologySphereValue, b: HomologySphereValue) -> HomologySphereValue:
    return HomologySphereValue(a.lam + b.lam, ("sum", a.provenance, b.provenance))


def reverse_orientation(a: HomologySphereValue) -> HomologySphereValue:
    return HomologySphereValue(-a.lam, ("reverse", a.provenance))


def poincare_sphere() -> HomologySphereValue:
    """The Poincare sphere, -1 surgery on the trefoil with orientation fixed so lambda = 1."""
    return reverse_orientation(casson_surgery(TREFOIL, -1))


def realize_casson_value(k: int) -> HomologySphereValue:
    """A connected sum of (reversed) Poincare spheres with invariant k."""
    k = int(k)
    unit = poincare_sphere() if k >= 0 else reverse_orientation(poincare_sphere())
    value = S3
    for _ in range(abs(k)):
        value = connected_sum(value, unit)
    return value


def _letter_values(generator_values: Dict[str, int]) -> Dict[str, int]:
    table = {}
    for letter, value in generator_values.items():
        if int(value) != value:
            raise ConfigError(f"Value of {letter!r} must be an integer, got {value!r}")
        if len(letter) != 1 or not letter.islower():
            raise ConfigError(f"Generator names are single lower-case letters, got {letter!r}")
        table[letter] = int(value)
        table[words.letter_inverse(letter)] = -int(value)
    return table


def homomorphism_eval(generator_values: Dict[str, int], word: str) -> int:
    """Sum of letter values along the word; inverse letters count negatively."""
    table = _letter_values(generator_values)
    total = 0
    for letter in words.parse_word(word):
        if letter not in table:
            raise ConfigError(f"No value given for generator {letter.lower()!r}")
        total += table[letter]
    return total


def pushforward(mu: StepDistribution, generator_values: Dict[str, int]) -> ZStepLaw:
    """Law of the image of one step under the homomorphism to Z."""
    law: Dict[int, float] = defaultdict(float)
    for w, p in mu.support:
        law[homomorphism_eval(generator_values, w)] += p
    return ZStepLaw.from_mapping(dict(law))


def pushforward_report(law: ZStepLaw) -> Dict:
    return {"support": [[k, p] for k, p in law.support], "symmetric": law.is_symmetric(),
            "irreducible": law.is_irreducible(), "period": law.period, "mean": law.mean()}


@cache_result(max_entries=32)
def z_walk_distribution(law: ZStepLaw, n: int) -> Tuple[int, np.ndarray]:
    """Exact law of S_n as (lowest reachable value, weights)."""
    if n < 0:
        raise ConfigError("n must be nonnegative")
    step = law.dense()
    dist = np.ones(1)
    for _ in range(n):
        dist = np.convolve(dist, step)
    return n * law.low, dist


class HitProbability(NamedTuple):
    probability: float
    # largest c with c / sqrt(n) <= probability
    c: float


def z_walk_hit_prob(law: ZStepLaw, n: int, k: int = 0, strict: bool = True) -> HitProbability:
    """P(S_n = k) by exact convolution."""
    if strict and not (law.is_symmetric() and law.is_irreducible()):
        raise ConfigError("Strict mode needs a symmetric irreducible step law",
                          [f"symmetric={law.is_symmetric()}", f"period={law.period}",
                           f"support range [{law.low}, {law.high}]"])
    low, dist = z_walk_distribution(law, n)
    index = int(k) - low
    p = float(dist[index]) if 0 <= index < dist.size else 0.0
    return HitProbability(p, p * math.sqrt(n) if n > 0 else p)


def sustained_constant(law: ZStepLaw, k: int, n_values: Iterable[int], strict: bool = True) -> float:
    """min over n of sqrt(n) P(S_n = k)."""
    values = [z_walk_hit_prob(law, n, k, strict).c for n in n_values if n > 0]
    if not values:
        raise ConfigError("sustained_constant needs at least one positive n")
    return float(min(values))


def _margin(K: float, c: float, c0: float, n: int) -> float:
    """log(c0 / sqrt(n)) - log(K c^n)."""
    return math.log(c0) - 0.5 * math.log(n) - math.log(K) - n * math.log(c)


def _check_crossover_args(K: float, c: float, c0: float):
    problems = []
    if not K > 0:
        problems.append(f"K={K} must be positive")
    if not 0 < c < 1:
        problems.append(f"c={c} must lie in (0, 1)")
    if not c0 > 0:
        problems.append(f"c0={c0} must be positive")
    if problems:
        raise ConfigError("Invalid crossover parameters", problems)


def existence_crossover(K: float, c: float, c0: float, sustained: bool = False) -> int:
    """
    Least n >= 1 with c0 / sqrt(n) > K c^n. With sustained=True, the least n
    from which the inequality holds for every larger n.
    """
    _check_crossover_args(K, c, c0)
    # the margin is convex in n and increasing past n0 = -1 / (2 log c)
    n0 = -1.0 / (2.0 * math.log(c))
    first_up = max(1, math.ceil(n0))
    # doubling search past n0, then bisection
    n = first_up
    step = 1
    while _margin(K, c, c0, n) <= 0:
        n += step
        step *= 2
    lo, hi = max(first_up, n - step // 2), n
    while lo < hi:
        mid = (lo + hi) // 2
        if _margin(K, c, c0, mid) > 0:
            hi = mid
        else:
            lo = mid + 1
    n = lo
    if sustained:
        while n > 1 and _margin(K, c, c0, n - 1) > 0:
            n -= 1
        return n
    for m in range(1, n):
        if _margin(K, c, c0, m) > 0:
            return m
    return n


def verify_crossover(K: float, c: float, c0: float, n: int) -> bool:
    """The inequality holds at n and fails at n - 1 (or n is 1)."""
    holds = c0 / math.sqrt(n) > K * c ** n
    below = n == 1 or not (c0 / math.sqrt(n - 1) > K * c ** (n - 1))
    return holds and below


def genus_threshold_check(splitting_distance: int, g: int) -> Dict[str, bool]:
    """Distance above 2 gives a hyperbolic manifold; above 2g fixes the Heegaard genus."""
    if g < 2:
        raise ConfigError(f"Genus must be at least 2, got {g}")
    if splitting_distance < 0:
        raise ConfigError("Splitting distance must be nonnegative")
    return {"hyperbolic": splitting_distance > 2, "genus_exactly_g": splitting_distance > 2 * g}


def surgery_differences(knot: SurgeryKnot, m_range: int) -> Sequence[int]:
    values = [casson_surgery(knot, m).lam for m in range(-m_range, m_range + 1)]
    return [b - a for a, b in zip(values, values[1:])]


def check_local_shape(law: ZStepLaw, n: int, k: int = 0, tolerance: float = 0.02) -> Dict:
    """n P(S_n = k)^2 against 4n P(S_4n = k)^2: the 1/sqrt(n) shape."""
    a = n * z_walk_hit_prob(law, n, k).probability ** 2
    b = 4 * n * z_walk_hit_prob(law, 4 * n, k).probability ** 2
    if a <= 0:
        raise EstimatorError(f"P(S_{n} = {k}) vanishes; no local shape to compare")
    return {"n": n, "value_n": a, "value_4n": b, "relative_gap": abs(b - a) / a, "ok": abs(b - a) / a <= tolerance}
