"""
Coarse geometry on the model spaces.

Distances, Gromov products, closest-point projections to quasiconvex sets,
set-to-set distances, approximate trees, and the sampling/exhaustive
checkers for the projection and two-set estimates.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..core.config import Config
from ..core.errors import ConfigError, InvalidPointError, ProjectionExhaustedError
from ..models import words
from ..models.quasiconvex import (
    ExplicitVertexSet, GeodesicLine, QuasiconvexSet, SubgroupOrbit, check_representable, geodesic,
)
from ..models.reports import CheckReport, PASS, VACUOUS
from ..models.space import FreeGroupTree, HalfPlane, ModelSpace, _rotation, as_complex, mobius, mobius_boundary

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12
NUMERIC_SLACK = 1e-9


# ---------------------------------------------------------------------------
# Metric basics
# ---------------------------------------------------------------------------

def distance(space: ModelSpace, a, b) -> float:
    a = space.validate_point(a)
    b = space.validate_point(b)
    return space.distance(a, b)


def _gp(space: ModelSpace, base, y, z) -> float:
    dy = space.distance(base, y)
    dz = space.distance(base, z)
    value = 0.5 * (dy + dz - space.distance(y, z))
    return min(max(value, 0.0), dy, dz)


def gromov_product(space: ModelSpace, base, y, z) -> float:
    """(y.z)_base = (d(base,y) + d(base,z) - d(y,z)) / 2, clamped to its valid range."""
    base = space.validate_point(base)
    y = space.validate_point(y)
    z = space.validate_point(z)
    if isinstance(space, FreeGroupTree):
        inv = words.inverse(base)
        return float(words.common_prefix_length(words.multiply(inv, y), words.multiply(inv, z)))
    return _gp(space, base, y, z)


def _four_point_defect(space: ModelSpace, w, x, y, z) -> float:
    """Largest violation of the four-point inequality over the three pairings, base w."""
    worst = -math.inf
    for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
        # (a.c)_w >= min{(a.b)_w, (b.c)_w} - delta
        defect = min(_gp(space, w, a, b), _gp(space, w, b, c)) - _gp(space, w, a, c)
        worst = max(worst, defect)
    return worst


def verify_four_point(space: ModelSpace, quadruple: Sequence, delta: float) -> bool:
    w, x, y, z = (space.validate_point(p) for p in quadruple)
    return _four_point_defect(space, w, x, y, z) <= delta + NUMERIC_SLACK


# ---------------------------------------------------------------------------
# Sampling helpers
# ---------------------------------------------------------------------------

def hyperbolic_polar(center, rho: float, theta: float) -> complex:
    """Half-plane point at hyperbolic distance rho from center in direction theta."""
    c = as_complex(center)
    w = mobius(_rotation(theta), 1j * math.exp(rho))
    return complex(c.real + c.imag * w.real, c.imag * w.imag)


def random_word(rng: np.random.Generator, rank: int, length: int) -> str:
    letters = words.alphabet(rank)
    out = ""
    while len(out) < length:
        letter = letters[rng.integers(len(letters))]
        if out and out[-1] == letter.swapcase():
            continue
        out += letter
    return out


def sample_points(space: ModelSpace, rng: np.random.Generator, count: int, center=None,
                  spread: float = 6.0) -> list:
    """
    Random points near center: reduced words center*w with |w| <= spread in the
    tree, hyperbolic-polar samples within distance spread in the half-plane.
    """
    center = space.basepoint() if center is None else center
    out = []
    for _ in range(count):
        if isinstance(space, FreeGroupTree):
            length = int(rng.integers(0, int(spread) + 1))
            out.append(words.multiply(center, random_word(rng, space.rank, length)))
        else:
            rho = float(rng.uniform(0.0, spread))
            theta = float(rng.uniform(0.0, 2 * math.pi))
            out.append(hyperbolic_polar(center, rho, theta))
    return out


def sample_box(rng: np.random.Generator, count: int, re_range=(-10.0, 10.0), im_range=(0.05, 20.0)) -> list:
    """Uniform samples from a Euclidean box of the half-plane."""
    re = rng.uniform(re_range[0], re_range[1], size=count)
    im = rng.uniform(im_range[0], im_range[1], size=count)
    return [complex(a, b) for a, b in zip(re, im)]


# ---------------------------------------------------------------------------
# Projections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Projection:
    point: object
    distance: float
    # subgroup element realising the point, for orbit sets
    element: Optional[str] = None


def _line_normaliser(line: GeodesicLine) -> np.ndarray:
    """Real Mobius matrix (det > 0) sending line.start to 0 and line.end to infinity."""
    s, e = line.start, line.end
    if math.isinf(e):
        return np.array([[1.0, -s], [0.0, 1.0]])
    if math.isinf(s):
        return np.array([[0.0, -1.0], [1.0, -e]])
    if s < e:
        return np.array([[1.0, -s], [-1.0, e]])
    return np.array([[1.0, -s], [1.0, -e]])


def _project_line(line: GeodesicLine, y: complex) -> Projection:
    mat = _line_normaliser(line)
    w = mobius(mat, y)
    d = math.asinh(abs(w.real) / w.imag)
    foot = mobius(np.linalg.inv(mat), 1j * abs(w))
    return Projection(complex(foot.real, abs(foot.imag)), d)


def _orbit_generators(rep: SubgroupOrbit) -> Tuple[str, ...]:
    gens = []
    for g in rep.generators:
        for h in (g, words.inverse(g)):
            if h and h not in gens:
                gens.append(h)
    return tuple(gens)


def _enumerate_orbit(space: ModelSpace, rep: SubgroupOrbit, center, radius: float,
                     cap: Optional[int] = None):
    """
    Yield (element, point) for orbit points offset*h*x0 within radius of center.

    Breadth-first over products of generators; a branch is followed while its
    point stays within radius plus one generator displacement of center.
    Generators are assumed Nielsen reduced, so the products used to reach a
    point stay near it.
    """
    cap = Config.SEARCH_NODES if cap is None else cap
    gens = _orbit_generators(rep)
    x0 = space.basepoint()
    step = max(space.distance(x0, space.act(g, x0)) for g in gens)
    offset = space.element(rep.offset)
    seen = {""}
    queue = deque([""])
    explored = 0
    while queue:
        h = queue.popleft()
        explored += 1
        if explored > cap:
            raise ProjectionExhaustedError(
                f"Orbit enumeration exceeded {cap} nodes (radius {radius:.3f}); raise WALKLAB_SEARCH_NODES"
            )
        point = space.apply(space.compose(offset, space.element(h)), x0)
        d = space.distance(center, point)
        if d <= radius + TIE_TOLERANCE:
            yield h, point
        if d > radius + step:
            continue
        for g in gens:
            nxt = words.multiply(h, g)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)


def _project_tree_letters(rep: SubgroupOrbit, y: str) -> Projection:
    # the orbit of a letter subgroup is a convex subtree: strip the longest
    # prefix spelled in the subgroup letters
    rel = words.multiply(words.inverse(rep.offset), y)
    allowed = set(rep.letters + rep.letters.upper())
    k = 0
    while k < len(rel) and rel[k] in allowed:
        k += 1
    return Projection(words.multiply(rep.offset, rel[:k]), float(len(rel) - k), rel[:k])


def closest_point(space: ModelSpace, D: QuasiconvexSet, y) -> Projection:
    check_representable(space, D)
    y = space.validate_point(y)
    rep = D.representation

    if isinstance(rep, GeodesicLine):
        return _project_line(rep, y)

    if isinstance(rep, ExplicitVertexSet):
        best = min(rep.points, key=lambda p: (round(space.distance(p, y), 12), space.point_key(p)))
        return Projection(best, space.distance(best, y))

    if isinstance(space, FreeGroupTree) and rep.is_letter_subgroup:
        return _project_tree_letters(rep, y)

    seed = D.seed(space)
    radius = space.distance(seed, y) + 2 * D.q_const + 2 * space.delta
    best = None
    for h, point in _enumerate_orbit(space, rep, y, radius):
        key = (round(space.distance(point, y), 12), space.point_key(point))
        if best is None or key < best[0]:
            best = (key, h, point)
    if best is None:
        raise ProjectionExhaustedError("Orbit enumeration found no member within the search radius")
    _, h, point = best
    return Projection(point, space.distance(point, y), h)


def project(space: ModelSpace, D: QuasiconvexSet, y):
    """A closest point of D to y (deterministic tie-break)."""
    return closest_point(space, D, y).point


def distance_to(space: ModelSpace, D: QuasiconvexSet, y) -> float:
    return closest_point(space, D, y).distance


def line_distance(a: GeodesicLine, b: GeodesicLine) -> float:
    """Distance between two geodesic lines of the half-plane (0 if they meet or are asymptotic)."""
    mat = _line_normaliser(a)
    r1 = mobius_boundary(mat, b.start)
    r2 = mobius_boundary(mat, b.end)
    if r1 == 0 or r2 == 0 or math.isinf(r1) or math.isinf(r2) or r1 * r2 < 0:
        return 0.0
    lo, hi = sorted((abs(r1), abs(r2)))
    return math.acosh((hi + lo) / (hi - lo))


def set_distance(space: ModelSpace, D: QuasiconvexSet, E: QuasiconvexSet) -> float:
    """d(D, E) = inf over member pairs."""
    check_representable(space, D)
    check_representable(space, E)
    rd, re = D.representation, E.representation

    if isinstance(rd, GeodesicLine) and isinstance(re, GeodesicLine):
        return line_distance(rd, re)
    if isinstance(re, ExplicitVertexSet):
        return min(distance_to(space, D, p) for p in re.points)
    if isinstance(rd, ExplicitVertexSet):
        return min(distance_to(space, E, p) for p in rd.points)
    if isinstance(space, FreeGroupTree) and rd.is_letter_subgroup and re.is_letter_subgroup:
        # convex subtrees: the projection of any point of E onto D is the
        # near end of the bridge
        return distance_to(space, E, project(space, D, E.seed(space)))
    if isinstance(re, GeodesicLine):
        D, E = E, D
        rd, re = re, rd

    # E is an orbit: scan its points around the near end seen from D
    anchor = project(space, D, E.seed(space))
    upper = distance_to(space, E, anchor)
    radius = upper + 2 * (D.q_const + E.q_const) + 2 * space.delta
    best = upper
    for _h, point in _enumerate_orbit(space, re, anchor, radius + upper):
        best = min(best, distance_to(space, D, point))
        if best == 0.0:
            break
    return best


def axis_line(space: HalfPlane, word: str) -> QuasiconvexSet:
    """Translation axis of a hyperbolic isometry, as a geodesic line (repelling -> attracting)."""
    (a, b), (c, d) = space.element(word)
    if abs(c) < 1e-15:
        fixed = b / (d - a) if d != a else 0.0
        start, end = (fixed, math.inf) if a > d else (math.inf, fixed)
        return geodesic(start, end)
    disc = math.sqrt((d - a) ** 2 + 4 * b * c)
    roots = sorted((((a - d) - disc) / (2 * c), ((a - d) + disc) / (2 * c)))
    # attracting fixed point has |c z + d| > 1
    attracting = max(roots, key=lambda r: abs(c * r + d))
    repelling = roots[0] if attracting == roots[1] else roots[1]
    return geodesic(repelling, attracting)


def sample_members(space: ModelSpace, D: QuasiconvexSet, near: Projection, radius: int = 3,
                   limit: int = 64) -> list:
    """Members of D around a projection: a subgroup ball, points along the line, or the vertex list."""
    rep = D.representation
    if isinstance(rep, ExplicitVertexSet):
        return list(rep.points[:limit])
    if isinstance(rep, GeodesicLine):
        mat = _line_normaliser(rep)
        inv = np.linalg.inv(mat)
        foot = mobius(mat, as_complex(near.point))
        out = []
        for t in np.linspace(-radius, radius, 2 * radius + 1):
            z = mobius(inv, 1j * abs(foot) * math.exp(float(t)))
            out.append(complex(z.real, abs(z.imag)))
        return out
    base = words.multiply(rep.offset, near.element or "")
    if rep.is_letter_subgroup:
        local = words.ball(space.rank, radius, rep.letters)
    else:
        local = _generator_ball(rep, min(radius, 2))
    out = []
    for h in local:
        out.append(space.act(words.multiply(base, h), space.basepoint()))
        if len(out) >= limit:
            break
    return out


def _generator_ball(rep: SubgroupOrbit, steps: int):
    gens = _orbit_generators(rep)
    layer = {""}
    seen = [""]
    for _ in range(steps):
        nxt = set()
        for h in layer:
            for g in gens:
                w = words.multiply(h, g)
                if w not in seen:
                    seen.append(w)
                    nxt.add(w)
        layer = nxt
    return seen


# ---------------------------------------------------------------------------
# Approximate trees
# ---------------------------------------------------------------------------

@dataclass
class ApproxTree:
    graph: nx.Graph
    leaves: Dict[int, object]
    points: Tuple
    distortion: float
    k_t: float
    heights: Dict[object, float] = field(default_factory=dict)

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    def leaf(self, index: int):
        try:
            return self.leaves[index]
        except KeyError:
            raise InvalidPointError(f"No leaf with index {index}") from None

    def tree_distance(self, i: int, j: int) -> float:
        return float(nx.shortest_path_length(self.graph, self.leaf(i), self.leaf(j), weight="weight"))

    def node_distance(self, u, v) -> float:
        return float(nx.shortest_path_length(self.graph, u, v, weight="weight"))

    def path(self, i: int, j: int) -> List:
        return nx.shortest_path(self.graph, self.leaf(i), self.leaf(j), weight="weight")

    def slack(self, space: ModelSpace) -> Dict[str, float]:
        """min and max of d_T - d over leaf pairs."""
        gaps = [self.tree_distance(i, j) - space.distance(self.points[i], self.points[j])
                for i, j in combinations(range(len(self.points)), 2)]
        return {"min_slack": min(gaps), "max_distortion": max(gaps)}

    def satisfies_sandwich(self, space: ModelSpace) -> bool:
        s = self.slack(space)
        return s["min_slack"] >= -NUMERIC_SLACK and s["max_distortion"] <= self.k_t * self.leaf_count + NUMERIC_SLACK


def approximate_tree(space: ModelSpace, points: Sequence, kt_factor: Optional[float] = None) -> ApproxTree:
    """
    Geodesic tree on 3..5 points built from Gromov products at the first point.

    Leaves are joined single-linkage style: clusters merge at the largest
    maximin product between them, giving merge vertices at that height above
    the root. Leaf edges are then lengthened by half the largest shortfall so
    tree distances dominate the true ones.
    """
    if not 3 <= len(points) <= 5:
        raise ConfigError(f"Approximate trees take 3 to 5 points, got {len(points)}")
    pts = tuple(space.validate_point(p) for p in points)
    keys = [space.point_key(p) for p in pts]
    if len(set(map(repr, keys))) != len(keys):
        raise ConfigError("Approximate tree points must be distinct")
    kt_factor = Config.KT_FACTOR if kt_factor is None else kt_factor
    n = len(pts)
    root = pts[0]
    heights = {i: space.distance(root, pts[i]) for i in range(1, n)}

    g = nx.Graph()
    node_height: Dict[object, float] = {("leaf", i): heights[i] for i in range(1, n)}
    top = {i: ("leaf", i) for i in range(1, n)}
    members = {i: {i} for i in range(1, n)}
    pairs = sorted(((_gp(space, root, pts[i], pts[j]), i, j) for i, j in combinations(range(1, n), 2)),
                   key=lambda item: (-item[0], item[1], item[2]))
    counter = 0
    for s, i, j in pairs:
        ci = next(k for k, m in members.items() if i in m)
        cj = next(k for k, m in members.items() if j in m)
        if ci == cj:
            continue
        counter += 1
        node = ("node", counter)
        for child in (top[ci], top[cj]):
            s = min(s, node_height[child])
        node_height[node] = s
        for child in (top[ci], top[cj]):
            g.add_edge(node, child, weight=node_height[child] - s)
        members[ci] |= members.pop(cj)
        top[ci] = node
        del top[cj]

    (last,) = top.values()
    root_node = ("node", 0)
    node_height[root_node] = 0.0
    g.add_edge(root_node, last, weight=node_height[last])

    def raw_distance(a, b):
        return nx.shortest_path_length(g, a, b, weight="weight")

    leaf_nodes = {0: root_node, **{i: ("leaf", i) for i in range(1, n)}}
    shortfall = max(space.distance(pts[i], pts[j]) - raw_distance(leaf_nodes[i], leaf_nodes[j])
                    for i, j in combinations(range(n), 2))
    shortfall = max(shortfall, 0.0)
    if shortfall > TIE_TOLERANCE:
        for i in range(1, n):
            (parent,) = g.neighbors(("leaf", i))
            g[("leaf", i)][parent]["weight"] += shortfall / 2
        g.add_edge(root_node, ("leaf", 0), weight=shortfall / 2)
        node_height[("leaf", 0)] = -shortfall / 2
    else:
        shortfall = 0.0
        g = nx.relabel_nodes(g, {root_node: ("leaf", 0)})
        node_height[("leaf", 0)] = node_height.pop(root_node)

    g = _contract_zero_edges(g)
    leaves = {i: ("leaf", i) for i in range(n)}
    tree = ApproxTree(g, leaves, pts, shortfall, kt_factor * space.delta,
                      {v: node_height.get(v, 0.0) for v in g.nodes})
    logger.debug(f"[Geometry] Approximate tree on {n} points: {g.number_of_nodes()} nodes, distortion {shortfall:.4g}")
    return tree


def _contract_zero_edges(g: nx.Graph) -> nx.Graph:
    while True:
        zero = next(((u, v) for u, v, w in g.edges(data="weight") if w <= TIE_TOLERANCE), None)
        if zero is None:
            return g
        u, v = zero
        keep, drop = (v, u) if v[0] == "leaf" and u[0] != "leaf" else (u, v)
        g = nx.contracted_nodes(g, keep, drop, self_loops=False)


def tree_center(t: ApproxTree, x: int, y: int, z: int):
    """The unique vertex common to the three pairwise geodesics of leaves x, y, z."""
    for leaf in (x, y, z):
        t.leaf(leaf)
    common = set(t.path(x, y)) & set(t.path(y, z)) & set(t.path(x, z))
    if len(common) != 1:
        raise InvalidPointError(f"Leaves {x}, {y}, {z} do not determine a single centre")
    return common.pop()


def tree_gromov_product(t: ApproxTree, base: int, y: int, z: int) -> float:
    return 0.5 * (t.tree_distance(base, y) + t.tree_distance(base, z) - t.tree_distance(y, z))


# ---------------------------------------------------------------------------
# Projection and two-set checkers
# ---------------------------------------------------------------------------

def _validate_consts(consts) -> Tuple[float, float, float]:
    if len(consts) != 3 or any(c < 0 for c in consts):
        raise ConfigError(f"Checker constants must be three nonnegative numbers, got {consts!r}")
    return tuple(float(c) for c in consts)


def _one_set(space, D, y, z, consts, proj: Projection, x_samples, report: CheckReport):
    A, B, C = consts
    x = proj.point
    dxy = proj.distance
    gp = _gp(space, y, x, z)
    report.checked += 1
    if gp > dxy - A:
        report.details["hypothesis_unmet"] = report.details.get("hypothesis_unmet", 0) + 1
        return
    report.details["hypothesis_met"] = report.details.get("hypothesis_met", 0) + 1
    dyz = space.distance(y, z)
    bound = dxy + dyz - 2 * gp - B
    dDz = distance_to(space, D, z)
    if dDz < bound - NUMERIC_SLACK:
        report.record({"claim": "distance", "y": _show(y), "z": _show(z), "d_Dz": dDz, "bound": bound})
    deviation = max((abs(gp - _gp(space, y, xp, z)) for xp in x_samples), default=0.0)
    report.details["max_deviation"] = max(report.details.get("max_deviation", 0.0), deviation)
    if deviation > C + NUMERIC_SLACK:
        report.record({"claim": "stability", "y": _show(y), "z": _show(z), "deviation": deviation})


def _finish(report: CheckReport) -> CheckReport:
    if report.status == PASS and not report.details.get("hypothesis_met"):
        report.status = VACUOUS
    return report


def _show(point):
    if isinstance(point, complex):
        return [point.real, point.imag]
    return point


def check_one_quasiconvex(space: ModelSpace, D: QuasiconvexSet, y, z, consts) -> CheckReport:
    """
    Projection estimate: with x closest to y in D and (x.z)_y <= d(x,y) - A,
    d(D,z) >= d(x,y) + d(y,z) - 2(x.z)_y - B and the product moves by at most C
    when x is replaced by other members of D.
    """
    consts = _validate_consts(consts)
    y = space.validate_point(y)
    z = space.validate_point(z)
    proj = closest_point(space, D, y)
    report = CheckReport("one_quasiconvex", details={"x": _show(proj.point), "d_xy": proj.distance})
    _one_set(space, D, y, z, consts, proj, sample_members(space, D, proj), report)
    return _finish(report)


def _two_set(space, D, E, y, consts, px, pz, x_samples, z_samples, report):
    A, B, C = consts
    x, z = px.point, pz.point
    dxy, dyz = px.distance, pz.distance
    gp = _gp(space, y, x, z)
    report.checked += 1
    if gp > min(dxy, dyz) - A:
        report.details["hypothesis_unmet"] = report.details.get("hypothesis_unmet", 0) + 1
        return
    report.details["hypothesis_met"] = report.details.get("hypothesis_met", 0) + 1
    bound = dxy + dyz - 2 * gp - B
    dDE = set_distance(space, D, E)
    report.details["min_d_DE"] = min(report.details.get("min_d_DE", math.inf), dDE)
    if dDE < bound - NUMERIC_SLACK:
        report.record({"claim": "distance", "y": _show(y), "d_DE": dDE, "bound": bound})
    deviation = max((abs(gp - _gp(space, y, xp, zp)) for xp in x_samples for zp in z_samples), default=0.0)
    report.details["max_deviation"] = max(report.details.get("max_deviation", 0.0), deviation)
    if deviation > C + NUMERIC_SLACK:
        report.record({"claim": "stability", "y": _show(y), "deviation": deviation})


def check_two_quasiconvex(space: ModelSpace, D: QuasiconvexSet, E: QuasiconvexSet, y, consts) -> CheckReport:
    """
    Two-set estimate: x, z closest to y in D, E with (x.z)_y <= min{d(x,y), d(y,z)} - A
    give d(D,E) >= d(x,y) + d(y,z) - 2(x.z)_y - B, and the product is stable to C
    over other members x' of D and z' of E.
    """
    consts = _validate_consts(consts)
    y = space.validate_point(y)
    px = closest_point(space, D, y)
    pz = closest_point(space, E, y)
    report = CheckReport("two_quasiconvex", details={"x": _show(px.point), "z": _show(pz.point)})
    _two_set(space, D, E, y, consts, px, pz, sample_members(space, D, px), sample_members(space, E, pz), report)
    return _finish(report)


def check_center_projection(space: ModelSpace, D: QuasiconvexSet, y, A: float) -> CheckReport:
    """The centre of the approximate tree on (x, x', y) stays within A of the projection x."""
    y = space.validate_point(y)
    proj = closest_point(space, D, y)
    report = CheckReport("center_projection", details={"max_center_offset": 0.0})
    x = proj.point
    for xp in sample_members(space, D, proj):
        if space.distance(xp, x) <= TIE_TOLERANCE or space.distance(xp, y) <= TIE_TOLERANCE:
            continue
        if proj.distance <= TIE_TOLERANCE:
            continue
        t = approximate_tree(space, [x, xp, y])
        offset = t.node_distance(tree_center(t, 0, 1, 2), t.leaf(0))
        report.checked += 1
        report.details["max_center_offset"] = max(report.details["max_center_offset"], offset)
        if offset > A + NUMERIC_SLACK:
            report.record({"y": _show(y), "x_prime": _show(xp), "offset": offset})
    if report.checked == 0:
        report.status = VACUOUS
    return report


def verify_ball(space: FreeGroupTree, D: QuasiconvexSet, radius: int, consts,
                E: Optional[QuasiconvexSet] = None, z_radius: Optional[int] = None) -> CheckReport:
    """
    Run the projection checker (or the two-set checker when E is given) for
    every y in the tree ball of the given radius; z ranges over the ball of
    radius z_radius around the identity.
    """
    if not isinstance(space, FreeGroupTree):
        raise ConfigError("Exhaustive ball verification needs the tree model")
    consts = _validate_consts(consts)
    z_radius = radius if z_radius is None else z_radius
    name = "two_quasiconvex_ball" if E is not None else "one_quasiconvex_ball"
    report = CheckReport(name, details={"radius": radius, "z_radius": z_radius})
    zs = list(words.ball(space.rank, z_radius))
    for y in words.ball(space.rank, radius):
        px = closest_point(space, D, y)
        x_samples = sample_members(space, D, px)
        if E is None:
            for z in zs:
                _one_set(space, D, y, z, consts, px, x_samples, report)
        else:
            pz = closest_point(space, E, y)
            _two_set(space, D, E, y, consts, px, pz, x_samples, sample_members(space, E, pz), report)
    logger.info(f"[Geometry] {name}: {report.checked} configurations, {report.violation_count} violations")
    return _finish(report)


def verify_samples(space: ModelSpace, D: QuasiconvexSet, consts, samples: int, seed: int,
                   E: Optional[QuasiconvexSet] = None, spread: float = 6.0) -> CheckReport:
    """Sampling version of verify_ball: y and z drawn around the seed point of D."""
    consts = _validate_consts(consts)
    rng = np.random.default_rng(seed)
    name = "two_quasiconvex_samples" if E is not None else "one_quasiconvex_samples"
    report = CheckReport(name, details={"samples": samples, "seed": seed})
    center = D.seed(space)
    for _ in range(samples):
        y, z = sample_points(space, rng, 2, center, spread)
        px = closest_point(space, D, y)
        x_samples = sample_members(space, D, px)
        if E is None:
            _one_set(space, D, y, z, consts, px, x_samples, report)
        else:
            pz = closest_point(space, E, y)
            _two_set(space, D, E, y, consts, px, pz, x_samples, sample_members(space, E, pz), report)
    logger.info(f"[Geometry] {name}: {report.checked} configurations, {report.violation_count} violations")
    return _finish(report)


def _geodesic_points(space: ModelSpace, a, b, count: int = 9) -> list:
    if isinstance(space, FreeGroupTree):
        k = words.common_prefix_length(a, b)
        down = [a[:i] for i in range(len(a), k - 1, -1)]
        up = [b[:i] for i in range(k + 1, len(b) + 1)]
        return down + up
    a, b = as_complex(a), as_complex(b)
    if abs(a.real - b.real) < 1e-12:
        ims = np.geomspace(a.imag, b.imag, count)
        return [complex(a.real, float(v)) for v in ims]
    c = (abs(b) ** 2 - abs(a) ** 2) / (2 * (b.real - a.real))
    r = abs(a - c)
    ta, tb = math.atan2(a.imag, a.real - c), math.atan2(b.imag, b.real - c)
    return [complex(c + r * math.cos(t), r * math.sin(t)) for t in np.linspace(ta, tb, count)]


def verify_quasiconvexity(space: ModelSpace, D: QuasiconvexSet, samples: int = 200, seed: int = 0) -> CheckReport:
    """Observed distance from geodesics between members back to D, against q_const."""
    check_representable(space, D)
    rng = np.random.default_rng(seed)
    seed_point = D.seed(space)
    members = sample_members(space, D, closest_point(space, D, seed_point), radius=4, limit=128)
    report = CheckReport("quasiconvexity", details={"q_const": D.q_const, "max_observed": 0.0})
    if len(members) < 2:
        report.status = VACUOUS
        return report
    for _ in range(samples):
        i, j = rng.choice(len(members), size=2, replace=False)
        for p in _geodesic_points(space, members[i], members[j]):
            gap = distance_to(space, D, p)
            report.checked += 1
            report.details["max_observed"] = max(report.details["max_observed"], gap)
            if gap > D.q_const + 1e-6:
                report.record({"a": _show(members[i]), "b": _show(members[j]), "point": _show(p), "gap": gap})
    return report


def calibrate_delta(space: ModelSpace, samples: int = 10000, seed: int = 0, box: bool = True) -> Dict[str, float]:
    """Largest four-point defect over random quadruples."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        if isinstance(space, HalfPlane) and box:
            quad = sample_box(rng, 4)
        else:
            quad = sample_points(space, rng, 4)
        for base in range(4):
            rest = [quad[k] for k in range(4) if k != base]
            worst = max(worst, _four_point_defect(space, quad[base], *rest))
    logger.info(f"[Geometry] Four-point defect over {samples} quadruples: {worst:.6f} (model delta {space.delta})")
    return {"samples": samples, "max_defect": worst, "model_delta": space.delta,
            "within_model_delta": worst <= space.delta + NUMERIC_SLACK}


def four_point_report(space: ModelSpace, samples: int, seed: int, delta: Optional[float] = None) -> CheckReport:
    delta = space.delta if delta is None else delta
    rng = np.random.default_rng(seed)
    report = CheckReport("four_point", details={"delta": delta, "max_defect": 0.0})
    for _ in range(samples):
        quad = sample_box(rng, 4) if isinstance(space, HalfPlane) else sample_points(space, rng, 4)
        for base in range(4):
            rest = [quad[k] for k in range(4) if k != base]
            defect = _four_point_defect(space, quad[base], *rest)
            report.details["max_defect"] = max(report.details["max_defect"], defect)
            report.checked += 1
            if defect > delta + NUMERIC_SLACK:
                report.record({"quadruple": [_show(p) for p in quad], "base": base, "defect": defect})
    return report
