"""
Monte Carlo estimators for the decay statements about walks.

Every estimator runs through run_paths(), which either samples `trials`
paths (one seeded generator per trial) or, in enumerate mode, walks every
one of the |supp|^n paths with its exact probability. Batches are merged in
batch order, so results do not depend on the worker count.
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from ..core.config import Config
from ..core.errors import ConfigError, EstimatorError
from ..models import words
from ..models.chain import CERTIFIED_Q_LIMIT
from ..models.kernels import KernelTable
from ..models.measure import StepDistribution
from ..models.quasiconvex import QuasiconvexSet
from ..models.reports import DecayReport, DecayRow, ExpFit
from ..models.shadow import ShadowSpec
from ..models.space import ModelSpace
from ..utils.batching import BatchConfig, run_batches
from ..utils.helpers import fit_exponential, proportion_interval, stream_id, trial_rng
from .geometry import NUMERIC_SLACK, _gp, distance_to, set_distance
from .shadow import in_shadow
from .walker import (
    PathBuilder, Trajectory, check_enumerable, iterate_measure, path_indices, phi_R,
    sample_increments, start_at_level,
)

logger = logging.getLogger(__name__)

MODES = ("sample", "enumerate")


# ---------------------------------------------------------------------------
# Trial engine
# ---------------------------------------------------------------------------

@dataclass
class Outcome:
    key: Hashable
    value: float = 0.0
    states: Optional[Sequence[int]] = None


class Tally:
    """Weighted outcome counts of a batch of paths."""

    def __init__(self, exact: bool = False, stride: int = 1):
        self.exact = exact
        self.counts: Dict[Hashable, float] = defaultdict(float)
        self.total = 0.0
        self.paths = 0
        self.value_sum = 0.0
        self.kernels = KernelTable(exact=exact, stride=stride)

    def add(self, outcome: Outcome, weight: float):
        self.counts[outcome.key] += weight
        self.total += weight
        self.paths += 1
        self.value_sum += weight * outcome.value
        if outcome.states is not None:
            self.kernels.add_path(outcome.states, weight)

    def merge(self, other: "Tally") -> "Tally":
        for key, w in other.counts.items():
            self.counts[key] += w
        self.total += other.total
        self.paths += other.paths
        self.value_sum += other.value_sum
        self.kernels.merge(other.kernels)
        return self

    def mass(self, predicate: Callable[[Hashable], bool]) -> float:
        return float(sum(w for key, w in self.counts.items() if predicate(key)))

    @property
    def mean_value(self) -> float:
        return self.value_sum / self.total if self.total > 0 else 0.0


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ConfigError(f"Unknown mode {mode!r}; expected one of {MODES}")
    return mode


def run_paths(space: ModelSpace, mu: StepDistribution, n: int, evaluate: Callable[[Trajectory], Outcome],
              trials: int, seed: int, stream: str, mode: str = "sample", x0=None,
              batch: Optional[BatchConfig] = None) -> Tally:
    """Evaluate every path (enumerate) or `trials` seeded paths (sample) and merge the tallies."""
    _check_mode(mode)
    if n < 0:
        raise ConfigError(f"Path length must be nonnegative, got {n}")
    builder = PathBuilder(space, mu, x0)
    exact = mode == "enumerate"
    sid = stream_id(stream)
    base = len(mu.support)

    if exact:
        total = check_enumerable(mu, n)

        def batch_fn(start: int, stop: int) -> Tally:
            tally = Tally(exact=True)
            for i in range(start, stop):
                traj = builder.build(path_indices(i, base, n))
                tally.add(evaluate(traj), traj.weight)
            return tally
    else:
        if trials <= 0:
            raise ConfigError(f"trials must be positive, got {trials}")
        total = trials

        def batch_fn(start: int, stop: int) -> Tally:
            tally = Tally()
            for i in range(start, stop):
                idx = sample_increments(mu, trial_rng(seed, sid, i), n)
                tally.add(evaluate(builder.build(idx)), 1.0)
            return tally

    logger.debug(f"[Estimators] {stream}: {mode} over {total} paths of length {n}")
    merged = Tally(exact=exact)
    for part in run_batches(total, batch_fn, batch or BatchConfig.from_config(), label=stream):
        merged.merge(part)
    if exact and abs(merged.total - 1.0) > 1e-9:
        raise EstimatorError(f"Enumerated path weights sum to {merged.total}, expected 1")
    return merged


def _interval(tally: Tally, successes: float, z: Optional[float]) -> Tuple[float, float]:
    if tally.exact:
        return proportion_interval(successes, 1, True)
    return proportion_interval(successes, int(tally.total), False, z)


def _decay_rows(tally: Tally, ns: Sequence[int], z: Optional[float] = None) -> List[DecayRow]:
    rows = []
    for i, n in enumerate(ns):
        successes = tally.mass(lambda key, i=i: key[0][i])
        lo, hi = _interval(tally, successes, z)
        p = successes / tally.total if tally.total > 0 else 0.0
        rows.append(DecayRow(int(n), tally.paths, successes, p, lo, hi))
    return rows


def _decay_flags(rows: List[DecayRow], fit: Optional[ExpFit], name: str) -> List[str]:
    flags = []
    for prev, cur in zip(rows, rows[1:]):
        if cur.ci_lo > prev.ci_hi:
            flags.append(f"non_monotone@{cur.n}")
    if rows and all(r.p_hat >= 1.0 for r in rows):
        flags.append("degenerate")
    if any(r.p_hat == 0 for r in rows):
        flags.append("zero_counts")
    if fit is None:
        flags.append("no_fit")
    elif fit.r_squared < 0.9:
        flags.append("poor_fit")
    for flag in flags:
        logger.warning(f"[Estimators] {name}: {flag}")
    return flags


def _decay_report(name: str, tally: Tally, ns: Sequence[int], seed: int, trials: int, mode: str,
                  z: Optional[float] = None, drift: Optional[float] = None, **diagnostics) -> DecayReport:
    rows = _decay_rows(tally, ns, z)
    fit = fit_exponential([r.n for r in rows], [r.p_hat for r in rows])
    flags = _decay_flags(rows, fit, name)
    return DecayReport(name, rows, fit, seed, trials, mode, drift, flags, diagnostics)


def _check_n_list(n_list: Sequence[int]) -> List[int]:
    ns = [int(n) for n in n_list]
    if not ns or any(n < 0 for n in ns):
        raise ConfigError(f"n_list must be a non-empty list of nonnegative integers, got {list(n_list)}")
    if ns != sorted(set(ns)):
        raise ConfigError("n_list must be strictly increasing")
    return ns


# ---------------------------------------------------------------------------
# Linear progress and shadows
# ---------------------------------------------------------------------------

def estimate_linear_progress(mu: StepDistribution, space: ModelSpace, x0, L: float, n_list: Sequence[int],
                             trials: int, seed: int, mode: str = "sample", z: Optional[float] = None,
                             batch: Optional[BatchConfig] = None) -> DecayReport:
    """P(d(x0, w_n x0) <= L n) for each n, with an exponential fit and the observed drift."""
    ns = _check_n_list(n_list)
    top = ns[-1]

    def evaluate(traj: Trajectory) -> Outcome:
        x = traj.points[0]
        hits = tuple(space.distance(x, traj.points[n]) <= L * n + NUMERIC_SLACK for n in ns)
        speed = space.distance(x, traj.points[top]) / top if top else 0.0
        return Outcome((hits,), speed)

    tally = run_paths(space, mu, top, evaluate, trials, seed, "linear_progress", mode, x0, batch)
    report = _decay_report("linear_progress", tally, ns, seed, trials, mode, z, drift=tally.mean_value, L=L)
    logger.info(f"[Estimators] Linear progress L={L}: drift {report.drift:.4f}, flags {report.flags}")
    return report


def estimate_shadow_decay(mu: StepDistribution, space: ModelSpace, x0, shadow: ShadowSpec, n_list: Sequence[int],
                          trials: int, seed: int, mode: str = "sample", z: Optional[float] = None,
                          batch: Optional[BatchConfig] = None) -> DecayReport:
    """P(w_n x0 in S_x0(y, R)) for each n."""
    ns = _check_n_list(n_list)
    depth = space.distance(shadow.base, shadow.target) - shadow.radius

    def evaluate(traj: Trajectory) -> Outcome:
        return Outcome((tuple(in_shadow(space, shadow, traj.points[n]) for n in ns),))

    tally = run_paths(space, mu, ns[-1], evaluate, trials, seed, "shadow_decay", mode, x0, batch)
    report = _decay_report("shadow_decay", tally, ns, seed, trials, mode, z, depth=depth)
    if depth <= 0:
        report.flags.append("vacuous_shadow")
    return report


def estimate_shadow_profile(mu: StepDistribution, space: ModelSpace, x0, depths: Sequence[int], n: int,
                            trials: int, seed: int, radius: float = 0.0, direction: str = "a",
                            mode: str = "sample", z: Optional[float] = None,
                            batch: Optional[BatchConfig] = None) -> DecayReport:
    """
    Shadow membership at time n against targets direction^d x0, one row per
    d; the fit over d gives (K_S, c_S) in terms of target distance.
    """
    ds = _check_n_list(depths)
    x0 = space.basepoint() if x0 is None else space.validate_point(x0)
    direction = words.parse_word(direction)
    shadows = [ShadowSpec(x0, space.act(words.power(direction, d), x0), radius) for d in ds]

    def evaluate(traj: Trajectory) -> Outcome:
        end = traj.points[-1]
        return Outcome((tuple(in_shadow(space, s, end) for s in shadows),))

    tally = run_paths(space, mu, n, evaluate, trials, seed, "shadow_profile", mode, x0, batch)
    distances = [space.distance(s.base, s.target) - radius for s in shadows]
    return _decay_report("shadow_profile", tally, ds, seed, trials, mode, z, time=n, radius=radius,
                         depths=distances)


# ---------------------------------------------------------------------------
# Backtracking and escape
# ---------------------------------------------------------------------------

BOTH_HOLD = "both_hold"
PRODUCT_FAILS = "product_fails"
SHORT_DISPLACEMENT = "short_displacement"


@dataclass
class BacktrackEstimate:
    t: int
    n: int
    R: float
    start: str
    mode: str
    trials: int
    distribution: Dict[int, float]
    rows: List[DecayRow]
    q_hat: float
    q_upper: float
    cases: Dict[str, float]
    exact: bool = False

    CSV_HEADER = ["r", "trials", "successes", "p_hat", "ci_lo", "ci_hi"]

    def csv_rows(self):
        return [self.CSV_HEADER] + [r.as_csv() for r in self.rows]

    def summary(self) -> Dict[str, Any]:
        return {"t": self.t, "n": self.n, "R": self.R, "start": self.start, "mode": self.mode,
                "q_hat": self.q_hat, "q_upper": self.q_upper, "cases": dict(self.cases),
                "distribution": {str(k): v for k, v in sorted(self.distribution.items())}}


def _validate_start(space: ModelSpace, g: str) -> str:
    return words.validate_word(words.parse_word(g), space.rank)


def estimate_backtrack(mu: StepDistribution, space: ModelSpace, D: QuasiconvexSet, start: str, R: float, n: int,
                       trials: int, seed: int, mode: str = "sample", consts=(1.0, 0.0, 0.0),
                       z: Optional[float] = None, batch: Optional[BatchConfig] = None) -> BacktrackEstimate:
    """
    Law of phi_R(g w_n x0) given phi_R(g x0) = t >= 1, with the exceedances
    P(phi <= t + 1 - r) for r = 1..t+1 and q_hat = max_r P^(1/r).

    The walk starts at x0 and D is moved by g^-1 instead of moving the walk.
    Each path is also classified by which bookkeeping case bounds it: the
    Gromov-product condition failing, the displacement staying under 2R, or
    both conditions holding.
    """
    g = _validate_start(space, start)
    x0 = space.basepoint()
    Dg = D.translate(space, words.inverse(g))
    t = phi_R(space, Dg, x0, R)
    if t < 1:
        raise EstimatorError(f"phi_R(g x0) = {t} at g={g!r}; backtracking needs t >= 1 (use estimate_escape)")
    A, _B, C = (float(c) for c in consts)
    anchor = space.act(words.inverse(g), x0)
    threshold = R * t - A - C

    def evaluate(traj: Trajectory) -> Outcome:
        end = traj.points[-1]
        phi = phi_R(space, Dg, end, R)
        if _gp(space, x0, anchor, end) > threshold + NUMERIC_SLACK:
            case = PRODUCT_FAILS
        elif space.distance(x0, end) < 2 * R:
            case = SHORT_DISPLACEMENT
        else:
            case = BOTH_HOLD
        return Outcome((phi, case))

    tally = run_paths(space, mu, n, evaluate, trials, seed, "backtrack", mode, None, batch)
    total = tally.total
    distribution: Dict[int, float] = defaultdict(float)
    cases = {BOTH_HOLD: 0.0, PRODUCT_FAILS: 0.0, SHORT_DISPLACEMENT: 0.0}
    for (phi, case), w in tally.counts.items():
        distribution[phi] += w / total
        cases[case] += w / total

    rows, q_hat, q_upper = [], 0.0, 0.0
    for r in range(1, t + 2):
        level = t + 1 - r
        successes = tally.mass(lambda key, level=level: key[0] <= level)
        lo, hi = _interval(tally, successes, z)
        p = successes / total
        rows.append(DecayRow(r, tally.paths, successes, p, lo, hi))
        if p > 0:
            q_hat = max(q_hat, p ** (1.0 / r))
            q_upper = max(q_upper, hi ** (1.0 / r))
    logger.info(f"[Estimators] Backtrack t={t} R={R} n={n}: q_hat={q_hat:.4f} q_upper={q_upper:.4f}")
    return BacktrackEstimate(t, n, R, g, mode, trials, dict(sorted(distribution.items())), rows,
                             q_hat, q_upper, cases, tally.exact)


@dataclass
class EscapeEstimate:
    n: int
    R: float
    start: str
    mode: str
    rows: List[DecayRow]
    p_escape: float
    p_one: float
    eps_hat: float
    lower_at_n: float
    exact: bool = False

    def csv_rows(self):
        return [DecayReport.CSV_HEADER] + [r.as_csv() for r in self.rows]

    def summary(self) -> Dict[str, Any]:
        return {"n": self.n, "R": self.R, "start": self.start, "mode": self.mode, "p_escape": self.p_escape,
                "p_one": self.p_one, "eps_hat": self.eps_hat, "lower_at_n": self.lower_at_n}


def estimate_escape(mu: StepDistribution, space: ModelSpace, D: QuasiconvexSet, start: str, R: float, n: int,
                    trials: int, seed: int, mode: str = "sample", z: Optional[float] = None,
                    batch: Optional[BatchConfig] = None) -> EscapeEstimate:
    """
    P(phi_R(g w_k x0) >= 1) for k = 1..n from a start with phi_R(g x0) = 0;
    eps_hat is the best lower confidence bound over those k.
    """
    g = _validate_start(space, start)
    x0 = space.basepoint()
    Dg = D.translate(space, words.inverse(g))
    if phi_R(space, Dg, x0, R) != 0:
        raise EstimatorError(f"estimate_escape needs phi_R(g x0) = 0, start {g!r} is farther out")
    if n == 0:
        return EscapeEstimate(0, R, g, mode, [], 0.0, 0.0, 0.0, 0.0, mode == "enumerate")

    def evaluate(traj: Trajectory) -> Outcome:
        phis = [phi_R(space, Dg, p, R) for p in traj.points[1:]]
        return Outcome((tuple(phi >= 1 for phi in phis), phis[-1] == 1))

    tally = run_paths(space, mu, n, evaluate, trials, seed, "escape", mode, None, batch)
    rows = _decay_rows(tally, list(range(1, n + 1)), z)
    p_one = tally.mass(lambda key: key[1]) / tally.total
    eps_hat = max(r.ci_lo for r in rows)
    est = EscapeEstimate(n, R, g, mode, rows, rows[-1].p_hat, p_one, eps_hat, rows[-1].ci_lo, tally.exact)
    logger.info(f"[Estimators] Escape R={R} n={n}: P(phi>=1)={est.p_escape:.4f}, eps_hat={eps_hat:.4f}")
    return est


# ---------------------------------------------------------------------------
# Distance from D and its kernels
# ---------------------------------------------------------------------------

def estimate_distance_from_D(mu: StepDistribution, space: ModelSpace, D: QuasiconvexSet, L: float,
                             n_list: Sequence[int], trials: int, seed: int, R: float = 1.0,
                             mode: str = "sample", z: Optional[float] = None,
                             batch: Optional[BatchConfig] = None) -> DecayReport:
    """
    P(d(D, w_n x0) <= L n) for each n. The phi_R trajectory of every path
    feeds an empirical kernel table (report.kernels); the law of phi_R at each
    requested time is kept in report.diagnostics["histograms"].
    """
    ns = _check_n_list(n_list)
    top = ns[-1]

    def evaluate(traj: Trajectory) -> Outcome:
        dists = [distance_to(space, D, p) for p in traj.points]
        hits = tuple(dists[n] <= L * n + NUMERIC_SLACK for n in ns)
        states = [int(math.floor(d / R)) for d in dists]
        return Outcome((hits, tuple(states[n] for n in ns)), states=states)

    tally = run_paths(space, mu, top, evaluate, trials, seed, "distance_from_D", mode, None, batch)
    histograms: Dict[int, Dict[int, float]] = {n: defaultdict(float) for n in ns}
    for (_hits, levels), w in tally.counts.items():
        for n, level in zip(ns, levels):
            histograms[n][level] += w
    histograms = {n: dict(sorted(h.items())) for n, h in histograms.items()}
    report = _decay_report("distance_from_D", tally, ns, seed, trials, mode, z, L=L, R=R,
                           histograms=histograms, final_histogram=histograms[top], total_weight=tally.total)
    report.kernels = tally.kernels
    tv = tally.kernels.history_tv(Config.MIN_VISITS if not tally.exact else 0.0)
    report.diagnostics["history_tv_max"] = max(tv.values(), default=0.0)
    return report


def empirical_kernels(runs: Iterable[Sequence[int]], weights: Optional[Iterable[float]] = None,
                      exact: bool = False) -> KernelTable:
    """Kernel table from integer state sequences (phi_R trajectories or chain paths)."""
    table = KernelTable(exact=exact)
    runs = list(runs)
    weights = [1.0] * len(runs) if weights is None else list(weights)
    if len(weights) != len(runs):
        raise ConfigError("weights and runs differ in length")
    for states, w in zip(runs, weights):
        table.add_path([int(s) for s in states], w)
    return table


# ---------------------------------------------------------------------------
# Splitting distance
# ---------------------------------------------------------------------------

SPLIT_EVENTS = ("main", "initial", "final", "product", "target")


def estimate_splitting_distance(mu: StepDistribution, space: ModelSpace, D: QuasiconvexSet, Dp: QuasiconvexSet,
                                L: float, n_list: Sequence[int], trials: int, seed: int, mode: str = "sample",
                                consts=(1.0, 0.0, 0.0), z: Optional[float] = None,
                                batch: Optional[BatchConfig] = None) -> DecayReport:
    """
    P(d(D, w_n Dp) <= L n) for each n.

    With m = n // 2 the diagnostics track the three events that cover the
    quarter-threshold event d(D, w_n Dp) <= L n / 4: the first half of the
    path staying near D, the second half ending near w_n Dp, and w_m x0
    lying far along the triangle (x0, w_n x0).
    """
    ns = _check_n_list(n_list)
    x0 = space.basepoint()
    if distance_to(space, D, x0) > NUMERIC_SLACK or distance_to(space, Dp, x0) > NUMERIC_SLACK:
        raise ConfigError("The basepoint must lie in both D and Dp")
    _A, B, C = (float(c) for c in consts)

    def evaluate(traj: Trajectory) -> Outcome:
        per_n = []
        last = 0.0
        for n in ns:
            moved = Dp.translate(space, traj.words[n])
            d = set_distance(space, D, moved)
            m = n // 2
            mid = traj.points[m]
            initial = distance_to(space, D, mid) <= L * n / 2 + NUMERIC_SLACK
            final = distance_to(space, moved, mid) <= L * (n / 2 + 1) + NUMERIC_SLACK
            product = _gp(space, mid, x0, traj.points[n]) >= L * n / 4 - C - B / 2 - NUMERIC_SLACK
            target = d <= L * n / 4 + NUMERIC_SLACK
            per_n.append((d <= L * n + NUMERIC_SLACK, initial, final, product, target))
            last = d
        hits = tuple(row[0] for row in per_n)
        return Outcome((hits, tuple(per_n), round(last, 9)), value=last)

    tally = run_paths(space, mu, ns[-1], evaluate, trials, seed, "splitting_distance", mode, None, batch)
    events = []
    for i, n in enumerate(ns):
        frac = {}
        for j, name in enumerate(SPLIT_EVENTS):
            frac[name] = tally.mass(lambda key, i=i, j=j: key[1][i][j]) / tally.total
        frac["union"] = tally.mass(lambda key, i=i: any(key[1][i][1:4])) / tally.total
        frac["uncovered"] = tally.mass(lambda key, i=i: key[1][i][4] and not any(key[1][i][1:4])) / tally.total
        events.append({"n": n, "m": n // 2, **frac})
    histogram: Dict[float, float] = defaultdict(float)
    for key, w in tally.counts.items():
        histogram[key[2]] += w / tally.total
    report = _decay_report("splitting_distance", tally, ns, seed, trials, mode, z, drift=tally.mean_value / ns[-1] if ns[-1] else None,
                           L=L, events=events, final_histogram=dict(sorted(histogram.items())))
    if ns[0] == 0:
        report.flags.append("degenerate_row@0")
    return report


# ---------------------------------------------------------------------------
# Calibration and classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Calibration:
    R: int
    N: int
    eps_hat: float
    q_hat: float
    q_upper: float
    candidates_tried: int
    start: str = ""
    mode: str = "sample"
    levels: int = 1
    history: Tuple = field(default=(), compare=False)

    def as_dict(self) -> Dict[str, Any]:
        return {"R": self.R, "N": self.N, "eps_hat": self.eps_hat, "q_hat": self.q_hat,
                "q_upper": self.q_upper, "candidates_tried": self.candidates_tried,
                "start": self.start, "mode": self.mode, "levels": self.levels}


MAX_CALIBRATION_LEVELS = 12


def calibration_levels(mu_N: StepDistribution, space: ModelSpace, R: float) -> int:
    """Start levels 1..t whose backtracking rows cover every drop one step of mu_N can make."""
    x0 = space.basepoint()
    reach = max(space.distance(x0, space.act(w, x0)) for w in mu_N.elements)
    return max(1, min(MAX_CALIBRATION_LEVELS, math.ceil(reach / R) + 1))


def calibrate(mu: StepDistribution, space: ModelSpace, D: QuasiconvexSet, trials: int, seed: int,
              R_max: int = 8, N_max: int = 32, mode: str = "sample", z: Optional[float] = None,
              batch: Optional[BatchConfig] = None) -> Calibration:
    """
    Smallest (N, R), N first, for which one step of mu^(*N) escapes D with a
    positive lower bound eps_hat and backtracks with q_upper < 1/4.

    Backtracking is measured from the bottom of every level 1..t, where t is
    one more than the number of levels a single step can cross, and q is the
    maximum over those starts. Levels next to D see the boundary; the deepest
    start sees every drop.
    """
    tried = 0
    history = []
    for N in range(1, N_max + 1):
        try:
            mu_N = iterate_measure(mu, N)
        except ConfigError as e:
            logger.warning(f"[Calibration] Stopping at N={N}: {e}")
            break
        for R in range(1, R_max + 1):
            tried += 1
            escape = estimate_escape(mu_N, space, D, "", R, 1, trials, seed, mode, z, batch)
            levels = calibration_levels(mu_N, space, R)
            start = start_at_level(space, D, R, 1)
            q_hat = q_upper = 0.0
            for t in range(1, levels + 1):
                g = start if t == 1 else start_at_level(space, D, R, t)
                back = estimate_backtrack(mu_N, space, D, g, R, 1, trials, seed, mode, z=z, batch=batch)
                q_hat, q_upper = max(q_hat, back.q_hat), max(q_upper, back.q_upper)
                if q_upper >= CERTIFIED_Q_LIMIT:
                    break
            history.append((N, R, escape.eps_hat, q_upper))
            logger.debug(f"[Calibration] N={N} R={R} levels={levels}: eps_hat={escape.eps_hat:.4f} "
                         f"q_upper={q_upper:.4f}")
            if escape.eps_hat > 0 and q_upper < CERTIFIED_Q_LIMIT:
                cal = Calibration(R, N, escape.eps_hat, q_hat, q_upper, tried, start, mode, levels, tuple(history))
                logger.info(f"[Calibration] Accepted R={R} N={N} eps_hat={cal.eps_hat:.4f} q_upper={cal.q_upper:.4f}")
                return cal
    raise EstimatorError(f"No (R, N) with R <= {R_max}, N <= {N_max} gave eps_hat > 0 and q_upper < 1/4")


EXPONENTIALLY_SMALL = "exponentially small"
EXPONENTIALLY_LARGE = "exponentially large"
UNDETERMINED = "undetermined"


def _decays(fit: Optional[ExpFit], r_squared: float) -> bool:
    return fit is not None and fit.slope < 0 and fit.c < 1 and fit.r_squared >= r_squared


def classify_decay(report: DecayReport, r_squared: float = 0.9) -> str:
    """Whether the hitting probabilities, or those of the complement, decay exponentially."""
    if _decays(report.fit, r_squared):
        return EXPONENTIALLY_SMALL
    ns = [r.n for r in report.rows]
    complement = fit_exponential(ns, [1.0 - r.p_hat for r in report.rows], source="1-p_hat")
    if _decays(complement, r_squared):
        return EXPONENTIALLY_LARGE
    return UNDETERMINED
