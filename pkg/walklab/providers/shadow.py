"""
Shadow sets as membership predicates, and sampling verifiers for the
shadow calculus: merging intersecting shadows, the gap between nested
shadows, the complement sandwich and the change of basepoint.

In the tree model the verifiers enumerate a whole ball; in the half-plane
they draw random points with a fixed seed.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from ..core.config import Config
from ..core.errors import ConfigError
from ..models import words
from ..models.reports import CheckReport, INCONCLUSIVE, VACUOUS
from ..models.shadow import ShadowSpec
from ..models.space import FreeGroupTree, ModelSpace
from .geometry import _gp, _show, sample_points

logger = logging.getLogger(__name__)

SHADOW_TOLERANCE = 1e-12
MAX_TREE_RADIUS = 8


def in_shadow(space: ModelSpace, s: ShadowSpec, z) -> bool:
    return _gp(space, s.base, s.target, z) >= space.distance(s.base, s.target) - s.radius - SHADOW_TOLERANCE


def in_shadow_checked(space: ModelSpace, s: ShadowSpec, z) -> bool:
    """in_shadow with point validation."""
    space.validate_point(s.base)
    space.validate_point(s.target)
    return in_shadow(space, s, space.validate_point(z))


def candidate_points(space: ModelSpace, center, radius: int, samples: int, seed: int) -> list:
    """Exhaustive tree ball around center, or seeded half-plane samples around it."""
    if isinstance(space, FreeGroupTree):
        radius = max(0, min(int(radius), MAX_TREE_RADIUS))
        return [words.multiply(center, w) for w in words.ball(space.rank, radius)]
    rng = np.random.default_rng(seed)
    return sample_points(space, rng, samples, center, spread=float(radius))


def _subsample(points: list, limit: int, seed: int) -> list:
    if len(points) <= limit:
        return points
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(points), size=limit, replace=False))
    return [points[i] for i in idx]


def merged_radius(space: ModelSpace, s1: ShadowSpec, s2: ShadowSpec) -> float:
    """
    Radius R' with S(x1, R1) inside S(x2, R') once the two shadows meet.

    This is a max, never min(R1, R2): in the tree S(1, a, 0) meets
    S(1, ab, 1), yet aa lies in the first and outside S(1, ab, 0).
    """
    d1 = space.distance(s1.base, s1.target)
    d2 = space.distance(s2.base, s2.target)
    return max(d2 - d1 + s1.radius, s2.radius) + 2 * space.delta


def verify_shadow_merge(space: ModelSpace, s1: ShadowSpec, s2: ShadowSpec, samples: int = None,
                        seed: int = 0, radius: Optional[int] = None) -> CheckReport:
    """Intersecting shadows from one basepoint: S(x1, R1) lies in the widened S(x2, .)."""
    samples = Config.SAMPLE_CONFIGS if samples is None else samples
    if space.distance(s1.base, s2.base) > SHADOW_TOLERANCE:
        raise ConfigError("Shadow merge needs both shadows seen from the same basepoint")
    report = CheckReport("shadow_merge")
    reach = max(space.distance(s1.base, s1.target), space.distance(s2.base, s2.target))
    radius = int(reach + max(s1.radius, s2.radius, 0) + 2) if radius is None else radius
    points = candidate_points(space, s1.target, radius, samples, seed)
    points += candidate_points(space, s2.target, radius, samples, seed + 1)

    witness = next((p for p in points if in_shadow(space, s1, p) and in_shadow(space, s2, p)), None)
    if witness is None:
        report.status = INCONCLUSIVE
        report.details["reason"] = "no intersection witness found"
        return report
    wide = ShadowSpec(s2.base, s2.target, merged_radius(space, s1, s2))
    report.details.update({"witness": _show(witness), "merged_radius": wide.radius})
    for p in points:
        if not in_shadow(space, s1, p):
            continue
        report.checked += 1
        if not in_shadow(space, wide, p):
            report.record({"z": _show(p)})
    return report


def verify_nested_gap(space: ModelSpace, s: ShadowSpec, A: float, K: float, samples: int = 200,
                      seed: int = 0) -> CheckReport:
    """Points of S(y, R) are at least A from points outside S(y, R + A + K)."""
    report = CheckReport("nested_gap", details={"A": A, "K": K})
    if A <= 0:
        report.status = VACUOUS
        return report
    outer = s.widened(A + K)
    d = space.distance(s.base, s.target)
    if isinstance(space, FreeGroupTree):
        # points near the geodesic from base to target
        geodesic_points = [s.base[:k] for k in range(len(s.base), -1, -1)] + \
                          [s.target[:k] for k in range(1, len(s.target) + 1)]
        points = sorted({words.multiply(p, w) for p in geodesic_points for w in words.ball(space.rank, 2)},
                        key=words.shortlex_key)
    else:
        rng = np.random.default_rng(seed)
        points = sample_points(space, rng, samples, s.target, spread=d + A + K + 2)
        points += sample_points(space, rng, samples, s.base, spread=d + 2)
    inside = _subsample([p for p in points if in_shadow(space, s, p)], samples, seed)
    outside = _subsample([p for p in points if not in_shadow(space, outer, p)], samples, seed + 1)
    if not inside or not outside:
        report.status = INCONCLUSIVE
        report.details["reason"] = "no sampled points on one side"
        return report
    best: Tuple[float, object, object] = (np.inf, None, None)
    for a in inside:
        for b in outside:
            gap = space.distance(a, b)
            report.checked += 1
            if gap < best[0]:
                best = (gap, a, b)
            if gap < A - SHADOW_TOLERANCE:
                report.record({"a": _show(a), "b": _show(b), "gap": gap})
    report.details.update({"min_gap": best[0], "min_gap_witness": [_show(best[1]), _show(best[2])]})
    return report


def verify_complement_sandwich(space: ModelSpace, x, z, R: float, K: float, samples: int = None,
                               seed: int = 0, radius: Optional[int] = None) -> CheckReport:
    """
    S_x(z, d-R-K) inside the complement of S_z(x, R) inside S_x(z, d-R+K), d = d(x, z).

    The complement is closed: points with (x.p)_z <= d - R.
    """
    samples = Config.SAMPLE_CONFIGS if samples is None else samples
    x = space.validate_point(x)
    z = space.validate_point(z)
    d = space.distance(x, z)
    if R < 2 * K or d < R + K:
        raise ConfigError(f"Complement sandwich needs R >= 2K and d(x,z) >= R + K (R={R}, K={K}, d={d})")
    inner = ShadowSpec(x, z, d - R - K)
    outer = ShadowSpec(x, z, d - R + K)
    report = CheckReport("complement_sandwich", details={"d": d, "R": R, "K": K, "agreements": 0})
    radius = int(d + 2) if radius is None else radius
    points = candidate_points(space, z, radius, samples, seed)
    if not isinstance(space, FreeGroupTree):
        points += candidate_points(space, x, radius, samples, seed + 1)
    for p in points:
        left = in_shadow(space, inner, p)
        middle = _gp(space, z, x, p) <= d - R + SHADOW_TOLERANCE
        right = in_shadow(space, outer, p)
        report.checked += 1
        if left == middle == right:
            report.details["agreements"] += 1
        if left and not middle:
            report.record({"p": _show(p), "claim": "inner shadow inside complement"})
        elif middle and not right:
            report.record({"p": _show(p), "claim": "complement inside outer shadow"})
    return report


def rebase_depth(space: ModelSpace, x, y, z, r: float, B: float) -> float:
    """s = d(x, y) - d(x, z) + r - B."""
    return space.distance(x, y) - space.distance(x, z) + r - B


def verify_rebase(space: ModelSpace, x, y, z, r: float, consts, samples: int = None,
                  seed: int = 0, radius: Optional[int] = None) -> CheckReport:
    """
    Change of basepoint: when (x.y)_z <= r - A, the shadow of x seen from z
    lies in the shadow of x seen from y.

    Here r and s are depths along the geodesic towards x: S_z(x, r) is the set
    of p with (x.p)_z >= r, and the target is S_y(x, s) with
    s = d(x,y) - d(x,z) + r - B. In radius terms these are
    ShadowSpec(z, x, d(z,x) - r) and ShadowSpec(y, x, d(y,x) - s).
    """
    samples = Config.SAMPLE_CONFIGS if samples is None else samples
    A, B = (float(c) for c in consts)
    x, y, z = (space.validate_point(p) for p in (x, y, z))
    report = CheckReport("rebase", details={"r": r, "A": A, "B": B})
    if _gp(space, z, x, y) > r - A + SHADOW_TOLERANCE:
        report.status = VACUOUS
        report.details["reason"] = "(x.y)_z > r - A"
        return report
    s = rebase_depth(space, x, y, z, r, B)
    source = ShadowSpec(z, x, space.distance(z, x) - r)
    target = ShadowSpec(y, x, space.distance(y, x) - s)
    report.details["s"] = s
    radius = int(max(space.distance(z, x), space.distance(y, x)) + 2) if radius is None else radius
    points = candidate_points(space, x, radius, samples, seed)
    if isinstance(space, FreeGroupTree) and z != x:
        known = set(points)
        points += [p for p in candidate_points(space, z, radius, samples, seed) if p not in known]
    for p in points:
        if not in_shadow(space, source, p):
            continue
        report.checked += 1
        if not in_shadow(space, target, p):
            report.record({"p": _show(p)})
    if report.checked == 0:
        report.status = INCONCLUSIVE
    return report


def tree_shadow_oracle(s: ShadowSpec, z: str) -> bool:
    """Combinatorial membership in the tree for base '' and integer radius below |target|."""
    return words.common_prefix_length(s.target, z) >= len(s.target) - s.radius


def verify_radius_monotone(space: ModelSpace, s: ShadowSpec, radii: List[float], points: list) -> CheckReport:
    """Membership never switches off as the radius grows."""
    report = CheckReport("radius_monotone")
    radii = sorted(radii)
    for p in points:
        flags = [in_shadow(space, ShadowSpec(s.base, s.target, r), p) for r in radii]
        report.checked += 1
        if any(a and not b for a, b in zip(flags, flags[1:])):
            report.record({"p": _show(p), "flags": flags})
    return report
