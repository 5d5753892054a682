"""
Finitely supported step laws: on a free group (StepDistribution) and on the
integers (ZStepLaw), plus the SamplePath record.
"""
import math
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, Tuple

import numpy as np

from ..core.errors import ConfigError
from . import words

WEIGHT_TOLERANCE = 1e-9


def _check_weights(pairs, what):
    total = 0.0
    for key, weight in pairs:
        if not (weight > 0 and math.isfinite(weight)):
            raise ConfigError(f"{what}: weight for {key!r} must be positive, got {weight}")
        total += weight
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise ConfigError(f"{what}: weights sum to {total}, expected 1")


@dataclass(frozen=True)
class StepDistribution:
    support: Tuple[Tuple[str, float], ...]
    rank: int = 2

    def __post_init__(self):
        if not self.support:
            raise ConfigError("Step distribution needs a non-empty support")
        seen = set()
        for word, _ in self.support:
            words.validate_word(word, self.rank)
            if word in seen:
                raise ConfigError(f"Duplicate support element {word!r}")
            seen.add(word)
        _check_weights(self.support, "Step distribution")

    @classmethod
    def from_mapping(cls, mapping: Dict[str, float], rank: int = 2) -> "StepDistribution":
        items = sorted(((words.parse_word(w), float(p)) for w, p in mapping.items()),
                       key=lambda item: words.shortlex_key(item[0]))
        return cls(tuple(items), rank)

    @classmethod
    def uniform(cls, elements: Iterable[str], rank: int = 2) -> "StepDistribution":
        elements = [words.parse_word(e) for e in elements]
        return cls.from_mapping({e: 1.0 / len(elements) for e in elements}, rank)

    @classmethod
    def point_mass(cls, element: str, rank: int = 2) -> "StepDistribution":
        return cls(((words.parse_word(element), 1.0),), rank)

    @classmethod
    def simple_random_walk(cls, rank: int = 2) -> "StepDistribution":
        return cls.uniform(list(words.alphabet(rank)), rank)

    @property
    def elements(self) -> Tuple[str, ...]:
        return tuple(w for w, _ in self.support)

    @property
    def weights(self) -> np.ndarray:
        return np.array([p for _, p in self.support], dtype=float)

    def as_dict(self) -> Dict[str, float]:
        return dict(self.support)

    def weight_of(self, word: str) -> float:
        return self.as_dict().get(word, 0.0)

    @property
    def diameter(self) -> int:
        return max(len(w) for w, _ in self.support)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        table = self.as_dict()
        return all(abs(p - table.get(words.inverse(w), 0.0)) <= tol for w, p in self.support)

    def describe(self):
        return {"rank": self.rank, "support": [[w, p] for w, p in self.support]}


@dataclass(frozen=True)
class SamplePath:
    seed: int
    increments: Tuple[str, ...]
    locations: Tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.increments)

    @property
    def endpoint(self) -> str:
        return self.locations[-1]


@dataclass(frozen=True)
class ZStepLaw:
    """Step law of a walk on the integers."""

    support: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        if not self.support:
            raise ConfigError("Integer step law needs a non-empty support")
        if len({k for k, _ in self.support}) != len(self.support):
            raise ConfigError("Duplicate steps in integer step law")
        _check_weights(self.support, "Integer step law")
        object.__setattr__(self, "support", tuple(sorted((int(k), float(p)) for k, p in self.support)))

    @classmethod
    def from_mapping(cls, mapping: Dict[int, float]) -> "ZStepLaw":
        return cls(tuple(sorted((int(k), float(p)) for k, p in mapping.items())))

    @classmethod
    def lazy(cls) -> "ZStepLaw":
        return cls(((-1, 0.25), (0, 0.5), (1, 0.25)))

    @classmethod
    def simple(cls) -> "ZStepLaw":
        return cls(((-1, 0.5), (1, 0.5)))

    @property
    def low(self) -> int:
        return self.support[0][0]

    @property
    def high(self) -> int:
        return self.support[-1][0]

    def dense(self) -> np.ndarray:
        """Weights on low..high as a dense array."""
        arr = np.zeros(self.high - self.low + 1)
        for k, p in self.support:
            arr[k - self.low] = p
        return arr

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        table = dict(self.support)
        return all(abs(p - table.get(-k, 0.0)) <= tol for k, p in self.support)

    @property
    def period(self) -> int:
        """gcd of differences between support points; 1 means aperiodic."""
        steps = [k for k, _ in self.support]
        diffs = [abs(s - steps[0]) for s in steps[1:]]
        return reduce(math.gcd, diffs, 0)

    def is_irreducible(self) -> bool:
        # steps in both directions and no parity-type obstruction
        return self.low < 0 < self.high and self.period == 1

    def mean(self) -> float:
        return float(sum(k * p for k, p in self.support))

    def describe(self):
        return {"support": [[k, p] for k, p in self.support]}
