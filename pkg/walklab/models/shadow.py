from dataclasses import dataclass
import math


@dataclass(frozen=True)
class ShadowSpec:
    """S_base(target, radius): points z with (target.z)_base >= d(base, target) - radius."""

    base: object
    target: object
    radius: float

    def __post_init__(self):
        if not math.isfinite(self.radius):
            raise ValueError("Shadow radius must be finite")

    def widened(self, extra: float) -> "ShadowSpec":
        return ShadowSpec(self.base, self.target, self.radius + extra)
