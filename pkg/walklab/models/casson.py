"""
Integer-valued Casson invariants tracked together with how they were built.
"""
from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class SurgeryKnot:
    name: str
    half_second_derivative: int

    def __post_init__(self):
        if int(self.half_second_derivative) != self.half_second_derivative:
            raise ValueError("half_second_derivative must be an integer")


TREFOIL = SurgeryKnot("trefoil", 1)

# trace entries: ("sphere",), ("surgery", knot, h, m), ("sum", left, right), ("reverse", inner)
TraceEntry = Tuple


@dataclass(frozen=True)
class HomologySphereValue:
    lam: int
    provenance: TraceEntry = ("sphere",)

    def replay(self) -> int:
        return replay(self.provenance)

    def is_consistent(self) -> bool:
        return self.replay() == self.lam


def replay(trace: TraceEntry) -> int:
    """Recompute the invariant from a construction trace."""
    tag = trace[0]
    if tag == "sphere":
        return 0
    if tag == "surgery":
        _, _name, h, m = trace
        return int(m) * int(h)
    if tag == "sum":
        return replay(trace[1]) + replay(trace[2])
    if tag == "reverse":
        return -replay(trace[1])
    raise ValueError(f"Unknown trace entry {tag!r}")


S3 = HomologySphereValue(0, ("sphere",))
