"""
Parameters of the comparison chain on the non-negative integers and the
distribution vectors it produces.
"""
from dataclasses import dataclass

import numpy as np

from ..core.errors import CertificateError, ConfigError

CERTIFIED_Q_LIMIT = 0.25


@dataclass(frozen=True)
class ChainParams:
    eps: float
    q: float
    truncation: int = 1001
    exploratory: bool = False

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise ConfigError(f"eps must lie in (0, 1], got {self.eps}")
        if not 0 < self.q < 0.5:
            raise ConfigError(f"q must lie in (0, 1/2), got {self.q}")
        if int(self.truncation) != self.truncation or self.truncation < 1:
            raise ConfigError(f"truncation must be a positive integer, got {self.truncation}")
        if self.q >= CERTIFIED_Q_LIMIT and not self.exploratory:
            raise CertificateError(
                f"q={self.q} >= 1/4: the spectral certificate does not apply (use exploratory mode)"
            )

    @property
    def certified(self) -> bool:
        return self.q < CERTIFIED_Q_LIMIT

    def down_probabilities(self, i: int) -> np.ndarray:
        """p(i, j) for j = 0..i, i > 0: q^(i-j+1)."""
        return self.q ** np.arange(i + 1, 0, -1, dtype=float)

    def up_probability(self, i: int) -> float:
        if i == 0:
            return self.eps
        return 1.0 - float(np.sum(self.q ** np.arange(1, i + 2, dtype=float)))

    def with_truncation(self, truncation: int) -> "ChainParams":
        return ChainParams(self.eps, self.q, truncation, self.exploratory)

    def describe(self):
        return {"eps": self.eps, "q": self.q, "truncation": self.truncation, "exploratory": self.exploratory}


@dataclass(frozen=True)
class DistributionVector:
    weights: np.ndarray
    n: int

    def __post_init__(self):
        arr = np.array(self.weights, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("Distribution weights must be a non-empty vector")
        if np.any(arr < 0):
            raise ValueError("Distribution weights must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def cdf_values(self) -> np.ndarray:
        return np.cumsum(self.weights)

    def cdf(self, t) -> float:
        if t < 0:
            return 0.0
        t = int(np.floor(t))
        if t >= self.weights.size - 1:
            return self.mass
        return float(self.cdf_values[t])

    def mean(self) -> float:
        return float(np.dot(np.arange(self.weights.size), self.weights))

    @property
    def support_max(self) -> int:
        nz = np.nonzero(self.weights)[0]
        return int(nz[-1]) if nz.size else 0

    def __eq__(self, other):
        if not isinstance(other, DistributionVector):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.n, self.weights.tobytes()))
