"""
Model hyperbolic spaces: the Cayley tree of a free group and the upper
half-plane. Both carry an isometric action of a free group given by words.
"""
import math
from string import ascii_lowercase
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ..core.errors import InvalidPointError
from . import words


class ModelSpace:
    """Common interface; concrete spaces are immutable and hashable."""

    kind = "abstract"
    rank = 2
    delta = 0.0

    def validate_point(self, point):
        raise NotImplementedError

    def distance(self, a, b) -> float:
        raise NotImplementedError

    def basepoint(self):
        raise NotImplementedError

    # group elements: element(word) builds the internal representation,
    # compose multiplies two of them, apply moves a point.
    def element(self, word: str):
        raise NotImplementedError

    def compose(self, g, h):
        raise NotImplementedError

    def apply(self, g, point):
        raise NotImplementedError

    def act(self, word: str, point):
        return self.apply(self.element(word), point)

    def point_key(self, point):
        raise NotImplementedError

    def describe(self) -> Dict:
        return {"kind": self.kind, "rank": self.rank, "delta": self.delta}


@dataclass(frozen=True)
class FreeGroupTree(ModelSpace):
    rank: int = 2
    kind: str = field(default="tree", init=False)
    delta: float = field(default=0.0, init=False)

    def __post_init__(self):
        if self.rank < 2:
            raise ValueError(f"FreeGroupTree needs rank >= 2, got {self.rank}")

    def validate_point(self, point):
        return words.validate_word(point, self.rank)

    def distance(self, a, b) -> float:
        # |a^-1 b| for reduced a, b
        k = words.common_prefix_length(a, b)
        return float(len(a) + len(b) - 2 * k)

    def basepoint(self):
        return ""

    def element(self, word: str):
        return words.validate_word(word, self.rank)

    def compose(self, g, h):
        return words.multiply(g, h)

    def apply(self, g, point):
        return words.multiply(g, point)

    def point_key(self, point):
        return words.shortlex_key(point)


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, s], [-s, c]])


def schottky_matrices(rank: int, translation: float) -> Tuple[Tuple[str, Tuple[Tuple[float, float], Tuple[float, float]]], ...]:
    """
    Hyperbolic generators with axes through i at evenly spread angles.

    For rank 2 these are diag(e^{l/2}, e^{-l/2}) (axis 0..inf) and its
    conjugate with axis the unit semicircle.
    """
    half = translation / 2
    base = np.array([[math.exp(half), 0.0], [0.0, math.exp(-half)]])
    out = []
    for j in range(rank):
        rot = _rotation(math.pi * j / rank)
        mat = rot @ base @ np.linalg.inv(rot)
        out.append((ascii_lowercase[j], tuple(tuple(float(v) for v in row) for row in mat)))
    return tuple(out)


def as_complex(point) -> complex:
    if isinstance(point, complex):
        return point
    if isinstance(point, (tuple, list)) and len(point) == 2:
        return complex(float(point[0]), float(point[1]))
    if isinstance(point, (int, float)):
        return complex(point)
    raise InvalidPointError(f"Half-plane points are complex numbers or (re, im) pairs, got {point!r}")


def mobius(mat, z: complex) -> complex:
    (a, b), (c, d) = mat
    return (a * z + b) / (c * z + d)


def mobius_boundary(mat, r: float) -> float:
    """Image of a boundary point (real or +inf) under a real Mobius map."""
    (a, b), (c, d) = mat
    if math.isinf(r):
        return math.inf if c == 0 else a / c
    denom = c * r + d
    if denom == 0:
        return math.inf
    return (a * r + b) / denom


@dataclass(frozen=True)
class HalfPlane(ModelSpace):
    delta: float = 1.0
    rank: int = 2
    translation: float = 4.0
    kind: str = field(default="halfplane", init=False)

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        object.__setattr__(self, "_matrices", self._build_matrices())

    def _build_matrices(self):
        mats = {}
        for letter, rows in schottky_matrices(self.rank, self.translation):
            mat = np.array(rows)
            mats[letter] = mat
            mats[letter.upper()] = np.linalg.inv(mat)
        return mats

    def validate_point(self, point):
        z = as_complex(point)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)) or z.imag <= 0:
            raise InvalidPointError(f"Half-plane point needs finite coordinates and im > 0, got {point!r}")
        return z

    def distance(self, a, b) -> float:
        a, b = as_complex(a), as_complex(b)
        return 2.0 * math.asinh(abs(a - b) / (2.0 * math.sqrt(a.imag * b.imag)))

    def basepoint(self):
        return 1j

    def element(self, word: str):
        words.validate_word(word, self.rank)
        mat = np.eye(2)
        for letter in word:
            mat = mat @ self._matrices[letter]
        return mat

    def compose(self, g, h):
        return g @ h

    def apply(self, g, point):
        z = mobius(g, as_complex(point))
        if not (math.isfinite(z.real) and math.isfinite(z.imag)) or z.imag <= 0:
            raise InvalidPointError(f"Isometry image left the half-plane numerically: {z!r}")
        return z

    def matrix(self, word: str) -> np.ndarray:
        return self.element(word)

    def point_key(self, point):
        z = as_complex(point)
        return (z.real, z.imag)

    def describe(self) -> Dict:
        out = super().describe()
        out["translation"] = self.translation
        return out
