"""
Quasiconvex subsets of a model space.

Three representations are supported:

* SubgroupOrbit  - offset . <generators> . x0 (tree or half-plane)
* ExplicitVertexSet - a finite list of points
* GeodesicLine   - a bi-infinite geodesic of the half-plane, given by its
                   two boundary endpoints (math.inf allowed)

A QuasiconvexSet pairs a representation with its quasiconvexity constant.
"""
import math
from dataclasses import dataclass
from typing import Tuple, Union

from ..core.errors import InvalidPointError
from . import words
from .space import HalfPlane, ModelSpace, mobius_boundary


@dataclass(frozen=True)
class SubgroupOrbit:
    generators: Tuple[str, ...]
    offset: str = ""

    @property
    def is_letter_subgroup(self) -> bool:
        return all(len(g) == 1 for g in self.generators)

    @property
    def letters(self) -> str:
        return "".join(g.lower() for g in self.generators if len(g) == 1)


@dataclass(frozen=True)
class ExplicitVertexSet:
    points: Tuple


@dataclass(frozen=True)
class GeodesicLine:
    start: float
    end: float

    def __post_init__(self):
        if self.start == self.end:
            raise InvalidPointError("A geodesic line needs two distinct endpoints")
        if math.isinf(self.start) and math.isinf(self.end):
            raise InvalidPointError("Only one endpoint may be at infinity")


Representation = Union[SubgroupOrbit, ExplicitVertexSet, GeodesicLine]


@dataclass(frozen=True)
class QuasiconvexSet:
    representation: Representation
    q_const: float = 0.0

    def __post_init__(self):
        if self.q_const < 0:
            raise ValueError("q_const must be nonnegative")
        rep = self.representation
        if isinstance(rep, SubgroupOrbit) and not rep.generators:
            raise ValueError("A subgroup orbit needs at least one generator")
        if isinstance(rep, ExplicitVertexSet) and not rep.points:
            raise ValueError("An explicit vertex set must be non-empty")

    @property
    def kind(self) -> str:
        return type(self.representation).__name__

    def seed(self, space: ModelSpace):
        """A canonical member point, used to start searches."""
        rep = self.representation
        if isinstance(rep, SubgroupOrbit):
            return space.act(rep.offset, space.basepoint())
        if isinstance(rep, ExplicitVertexSet):
            return rep.points[0]
        if math.isinf(rep.end):
            return complex(rep.start, 1.0)
        if math.isinf(rep.start):
            return complex(rep.end, 1.0)
        return complex((rep.start + rep.end) / 2, abs(rep.end - rep.start) / 2)

    def translate(self, space: ModelSpace, g: str) -> "QuasiconvexSet":
        """Image of the set under the isometry given by the word g."""
        rep = self.representation
        if isinstance(rep, SubgroupOrbit):
            new = SubgroupOrbit(rep.generators, words.multiply(g, rep.offset))
        elif isinstance(rep, ExplicitVertexSet):
            new = ExplicitVertexSet(tuple(space.act(g, p) for p in rep.points))
        else:
            mat = space.element(g)
            new = GeodesicLine(mobius_boundary(mat, rep.start), mobius_boundary(mat, rep.end))
        return QuasiconvexSet(new, self.q_const)


def axis(*generators: str, offset: str = "", q_const: float = None) -> QuasiconvexSet:
    """
    Orbit of a subgroup, e.g. axis("a") for the <a>-axis.

    Letter subgroups are convex subtrees (q = 0); a cyclic subgroup of a
    longer word stays within half its length of its axis.
    """
    gens = tuple(words.parse_word(g) for g in generators)
    if q_const is None:
        q_const = 0.0 if all(len(g) == 1 for g in gens) else float(max(len(g) for g in gens) // 2)
    return QuasiconvexSet(SubgroupOrbit(gens, words.parse_word(offset)), q_const)


def vertex_set(points, q_const: float = 0.0) -> QuasiconvexSet:
    return QuasiconvexSet(ExplicitVertexSet(tuple(points)), q_const)


def geodesic(start: float, end: float) -> QuasiconvexSet:
    return QuasiconvexSet(GeodesicLine(float(start), float(end)), 0.0)


def check_representable(space: ModelSpace, D: QuasiconvexSet):
    if isinstance(D.representation, GeodesicLine) and not isinstance(space, HalfPlane):
        raise InvalidPointError("Geodesic lines are only available in the half-plane")
    if isinstance(D.representation, ExplicitVertexSet):
        for p in D.representation.points:
            space.validate_point(p)
    return D
