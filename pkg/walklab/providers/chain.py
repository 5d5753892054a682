"""
The comparison chain on the non-negative integers.

From 0 the chain moves up with probability eps and stays otherwise; from
i > 0 it drops to j <= i with probability q^(i-j+1) and moves up to i+1
with the remaining mass p_i = 1 - q - ... - q^(i+1).
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import signal
from scipy.special import logsumexp

from ..core.caching import cache_result
from ..core.config import Config
from ..core.errors import CertificateError, ConfigError, EstimatorError
from ..models.chain import CERTIFIED_Q_LIMIT, ChainParams, DistributionVector
from ..models.kernels import KernelTable
from ..models.reports import CONDITIONAL, CheckReport, FAIL
from ..utils.helpers import proportion_interval

logger = logging.getLogger(__name__)

MASS_TOLERANCE = 1e-12
MASS_FAILURE = 1e-9
RATIO_TOLERANCE = 1e-10
CDF_TOLERANCE = 1e-12


def transition(params: ChainParams, i: int, j: int) -> float:
    if i < 0 or j < 0:
        raise ConfigError(f"Chain states are nonnegative, got ({i}, {j})")
    if i == 0:
        return {0: 1.0 - params.eps, 1: params.eps}.get(j, 0.0)
    if j <= i:
        return params.q ** (i - j + 1)
    if j == i + 1:
        return params.up_probability(i)
    return 0.0


def up_probabilities(q: float, size: int) -> np.ndarray:
    """p_i = 1 - q(1 - q^(i+1))/(1 - q) for i = 0..size-1 (entry 0 unused)."""
    i = np.arange(size, dtype=float)
    return 1.0 - q * (1.0 - q ** (i + 1)) / (1.0 - q)


def _step(params: ChainParams, v: np.ndarray, up: np.ndarray) -> np.ndarray:
    """One forward step of a distribution supported on 0..len(v)-2."""
    q = params.q
    movers = v.copy()
    movers[0] = 0.0
    # D[j] = q v[j] + q D[j+1] over the reversed vector
    down = signal.lfilter([q], [1.0, -q], movers[::-1])[::-1]
    new = down
    new[0] += v[0] * (1.0 - params.eps)
    new[1] += v[0] * params.eps
    new[2:] += v[1:-1] * up[1:-1]
    return new


@cache_result(max_entries=64)
def n_step_distribution(params: ChainParams, n: int) -> DistributionVector:
    """Exact law of the chain after n steps from 0 (support 0..n)."""
    if n < 0:
        raise ConfigError(f"n must be nonnegative, got {n}")
    if params.truncation < n:
        raise ConfigError(f"Truncation T={params.truncation} is below n={n}; the n-step support needs T >= n")
    v = np.zeros(n + 2)
    v[0] = 1.0
    up = up_probabilities(params.q, n + 2)
    for _ in range(n):
        v = _step(params, v, up)
    drift = abs(v.sum() - 1.0)
    if drift > MASS_TOLERANCE:
        logger.warning(f"[Chain] Mass drift {drift:.3e} after {n} steps exceeds {MASS_TOLERANCE}")
    if drift > MASS_FAILURE:
        raise EstimatorError(f"Chain distribution lost mass: drift {drift:.3e} after {n} steps")
    return DistributionVector(v[: n + 1], n)


def cdf(d: DistributionVector, t) -> float:
    return d.cdf(t)


def _padded_cdfs(a: Sequence[float], b: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    size = max(a.size, b.size)
    a = np.concatenate([a, np.full(size - a.size, a[-1] if a.size else 1.0)])
    b = np.concatenate([b, np.full(size - b.size, b[-1] if b.size else 1.0)])
    return a, b


def dominates_cdf(F_a: Sequence[float], F_b: Sequence[float], tol: float = CDF_TOLERANCE) -> bool:
    """A <= B stochastically: F_A(t) >= F_B(t) for every t."""
    a, b = _padded_cdfs(F_a, F_b)
    return bool(np.all(a >= b - tol))


def dominates(d_a: DistributionVector, d_b: DistributionVector) -> bool:
    return dominates_cdf(d_a.cdf_values, d_b.cdf_values)


def from_cdf(values: Sequence[float], n: int = 0) -> DistributionVector:
    values = np.asarray(values, dtype=float)
    return DistributionVector(np.diff(values, prepend=0.0), n)


def shift(d: DistributionVector, k: int) -> DistributionVector:
    """The law of X + k (k units of deterministic progress)."""
    if k < 0:
        raise ConfigError("Shift must be nonnegative")
    return DistributionVector(np.concatenate([np.zeros(k), d.weights]), d.n)


def distribution_rows(d: DistributionVector):
    return [["state", "probability"]] + [[i, float(p)] for i, p in enumerate(d.weights)]


def spectral_radius_bound(params: ChainParams) -> float:
    """t = max{1 - eps(1 - 2q), 4q}, an upper bound for the spectral radius when q < 1/4."""
    if params.q >= CERTIFIED_Q_LIMIT:
        raise CertificateError(f"q={params.q} >= 1/4: no spectral radius certificate")
    return max(1.0 - params.eps * (1.0 - 2.0 * params.q), 4.0 * params.q)


def superharmonic_ratios(params: ChainParams, kmax: int) -> np.ndarray:
    """(Pf)(k)/f(k) for f(k) = (2q)^k, k = 0..kmax, without forming (2q)^k."""
    eps, q = params.eps, params.q
    k = np.arange(kmax + 1, dtype=float)
    # sum_{m=0..k} q^(m+1) (2q)^(-m) = q (2 - 2^-k); the up move adds 2q p_k
    ratios = q * (2.0 - 2.0 ** (-k)) + 2.0 * q * up_probabilities(q, kmax + 1)
    ratios[0] = (1.0 - eps) + 2.0 * q * eps
    return ratios


def check_superharmonic(params: ChainParams, t: float, kmax: int = 10000) -> CheckReport:
    ratios = superharmonic_ratios(params, kmax)
    worst = int(np.argmax(ratios))
    report = CheckReport("superharmonic", checked=kmax + 1,
                         details={"t": t, "kmax": kmax, "max_ratio": float(ratios[worst]), "argmax": worst})
    bad = np.nonzero(ratios > t + RATIO_TOLERANCE)[0]
    for k in bad:
        report.record({"k": int(k), "ratio": float(ratios[k])})
    logger.info(f"[Chain] Superharmonic check eps={params.eps} q={params.q} t={t}: max ratio {ratios[worst]:.6f} -> {report.status}")
    return report


def _log_step_matrix(q: float, size: int) -> np.ndarray:
    """E[j, i] = (i - j + 1) log q for 1 <= i, j <= i; -inf elsewhere."""
    i = np.arange(size)[None, :]
    j = np.arange(size)[:, None]
    mat = np.where((i >= j) & (i >= 1), (i - j + 1) * math.log(q), -np.inf)
    return mat


def return_log_probabilities(params: ChainParams, n_max: int) -> np.ndarray:
    """log p^(n)(0, 0) for n = 0..n_max, iterated in log space."""
    if params.truncation < n_max:
        raise ConfigError(f"Truncation T={params.truncation} is below n_max={n_max}")
    size = n_max + 2
    down = _log_step_matrix(params.q, size)
    log_up = np.log(np.clip(up_probabilities(params.q, size), 1e-300, None))
    logv = np.full(size, -np.inf)
    logv[0] = 0.0
    out = np.empty(n_max + 1)
    out[0] = 0.0
    log_stay = math.log(1.0 - params.eps) if params.eps < 1.0 else -np.inf
    log_eps = math.log(params.eps)
    with np.errstate(invalid="ignore"):
        for n in range(1, n_max + 1):
            new = logsumexp(logv[None, :] + down, axis=1)
            new[0] = np.logaddexp(new[0], logv[0] + log_stay)
            new[1] = np.logaddexp(new[1], logv[0] + log_eps)
            new[2:] = np.logaddexp(new[2:], logv[1:-1] + log_up[1:-1])
            logv = new
            out[n] = logv[0]
    return out


@cache_result(max_entries=64)
def estimate_spectral_radius(params: ChainParams, n_max: int) -> float:
    """rho_hat = p^(n)(0,0)^(1/n) at n = n_max; never above the true spectral radius."""
    if n_max < 1:
        raise ConfigError("n_max must be at least 1")
    logp = return_log_probabilities(params, n_max)[n_max]
    if not np.isfinite(logp):
        return 0.0
    return float(math.exp(logp / n_max))


@dataclass(frozen=True)
class Irreducibility:
    N: int
    eps0: float
    states_checked: int
    min_neighbour_probability: float


def uniform_irreducibility_constants(params: ChainParams) -> Tuple[int, float]:
    """(N, eps0) = (1, min{eps, q^2, 1 - q/(1-q)}), validated over 0..T."""
    info = irreducibility_report(params)
    return info.N, info.eps0


def irreducibility_report(params: ChainParams) -> Irreducibility:
    eps, q = params.eps, params.q
    eps0 = min(eps, q * q, 1.0 - q / (1.0 - q))
    T = params.truncation
    up = up_probabilities(q, T + 1)
    # neighbour moves: 0 -> 1 (eps), i -> i+1 (p_i), i -> i-1 (q^2)
    neighbour = np.concatenate([[eps], up[1:T], np.full(T, q * q)])
    lowest = float(neighbour.min())
    if lowest < eps0 - 1e-15:
        raise CertificateError(f"Neighbour transition {lowest} below eps0={eps0}")
    logger.debug(f"[Chain] Uniform irreducibility N=1 eps0={eps0} over {T + 1} states")
    return Irreducibility(1, eps0, T + 1, lowest)


@dataclass(frozen=True)
class TailBound:
    bound: float
    L_max: float
    decays: bool
    log_bound: float


def tail_bound(params: ChainParams, A: float, L: float, n: int, rho: Optional[float] = None) -> TailBound:
    """
    F_{X_n}(Ln) <= Ln A^(Ln) rho^n, with the largest L for which the bound
    decays (L ln A + ln rho < 0).
    """
    if A <= 0:
        raise ConfigError(f"A must be positive, got {A}")
    if L < 0 or n < 0:
        raise ConfigError("L and n must be nonnegative")
    rho = spectral_radius_bound(params) if rho is None else rho
    L_max = math.log(1.0 / rho) / math.log(A) if A > 1 else math.inf
    Ln = L * n
    if Ln == 0:
        return TailBound(0.0, L_max, L < L_max, -math.inf)
    log_bound = math.log(Ln) + Ln * math.log(A) + n * math.log(rho)
    return TailBound(math.exp(log_bound) if log_bound < 700 else math.inf, L_max, L < L_max, log_bound)


def chain_cdf_row(params: ChainParams, state: int, level: int) -> float:
    """P(next <= level | current = state)."""
    if level < 0:
        return 0.0
    if state == 0:
        return 1.0 - params.eps if level == 0 else 1.0
    if level >= state + 1:
        return 1.0
    q = params.q
    # sum_{j=0..level} q^(state-j+1)
    return q ** (state - level + 1) * (1.0 - q ** (level + 1)) / (1.0 - q)


def check_kernel_domination(kernels: KernelTable, params: ChainParams, z: Optional[float] = None,
                            min_visits: Optional[int] = None) -> CheckReport:
    """
    Chain kernel <= empirical kernel at every well-visited state: the
    empirical CDF never exceeds the chain CDF beyond sampling error.
    """
    min_visits = Config.MIN_VISITS if min_visits is None else min_visits
    report = CheckReport("kernel_domination", details={
        "min_visits": min_visits, "exact": kernels.exact, "untested": [], "min_slack": math.inf,
        "states_tested": 0,
    })
    for state in kernels.states():
        visits = kernels.visits(state)
        if not kernels.exact and visits < min_visits:
            report.details["untested"].append(state)
            continue
        report.details["states_tested"] += 1
        top = max(kernels.counts[state])
        for level in range(0, max(state + 1, top) + 1):
            successes = kernels.count_at_most(state, level)
            if kernels.exact:
                lo = successes / visits
            else:
                lo, _ = proportion_interval(successes, int(round(visits)), False, z)
            chain = chain_cdf_row(params, state, level)
            report.checked += 1
            report.details["min_slack"] = min(report.details["min_slack"], chain - successes / visits)
            if lo > chain + CDF_TOLERANCE:
                report.record({"state": state, "level": level, "empirical_lower": lo, "chain": chain,
                               "visits": visits})
    if report.status != FAIL and report.details["untested"]:
        report.status = CONDITIONAL
    logger.info(f"[Chain] Kernel domination: {report.details['states_tested']} states tested, "
                f"{len(report.details['untested'])} untested, {report.violation_count} violations")
    return report


def check_distribution_domination(chain_dist: DistributionVector, histogram: Dict[int, float], trials: float,
                                  exact: bool = False, z: Optional[float] = None, name: str = "distribution_domination") -> CheckReport:
    """Y_n <= X_n: the chain CDF lies above the (lower confidence bound of the) empirical CDF."""
    report = CheckReport(name, details={"n": chain_dist.n, "min_slack": math.inf})
    top = max(max(histogram, default=0), chain_dist.weights.size - 1)
    running = 0.0
    for level in range(top + 1):
        running += histogram.get(level, 0.0)
        lo = running / trials if exact else proportion_interval(running, int(round(trials)), False, z)[0]
        chain = chain_dist.cdf(level)
        report.checked += 1
        report.details["min_slack"] = min(report.details["min_slack"], chain - running / trials)
        if lo > chain + CDF_TOLERANCE:
            report.record({"level": level, "empirical_lower": lo, "chain": chain})
    return report


def sample_chain_paths(params: ChainParams, n: int, trials: int, seed: int) -> np.ndarray:
    """Simulated chain paths from 0, shape (trials, n + 1)."""
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(0x636861,)))
    q = params.q
    paths = np.zeros((trials, n + 1), dtype=np.int64)
    state = np.zeros(trials, dtype=np.int64)
    for step in range(1, n + 1):
        u = rng.random(trials)
        at_zero = state == 0
        down_mass = q * (1.0 - q ** (state + 1.0)) / (1.0 - q)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = 1.0 - u * (1.0 - q) / q
            drop = np.floor(np.log(np.clip(w, 1e-300, None)) / math.log(q)).astype(np.int64)
        drop = np.minimum(np.maximum(drop, 0), state)
        nxt = np.where(u < down_mass, state - drop, state + 1)
        nxt = np.where(at_zero, np.where(u < params.eps, 1, 0), nxt)
        state = nxt
        paths[:, step] = state
    return paths


def chain_kernel_table(params: ChainParams, states: int) -> KernelTable:
    """The chain's own rows as an exact kernel table (states 0..states-1)."""
    table = KernelTable(exact=True)
    for i in range(states):
        for j in range(i + 2):
            p = transition(params, i, j)
            if p > 0:
                table.counts[i][j] += p
    return table


def check_row_sums(params: ChainParams, states: Optional[int] = None) -> CheckReport:
    states = params.truncation if states is None else states
    report = CheckReport("row_sums", details={"max_error": 0.0})
    for i in range(states + 1):
        total = math.fsum(transition(params, i, j) for j in range(i + 2))
        err = abs(total - 1.0)
        report.checked += 1
        report.details["max_error"] = max(report.details["max_error"], err)
        if err > MASS_TOLERANCE:
            report.record({"state": i, "sum": total})
    return report


def chain_certificate(params: ChainParams, kmax: int = 10000) -> Dict:
    """Spectral bound, superharmonic check and irreducibility constants in one record."""
    if not params.certified:
        raise CertificateError(f"q={params.q} >= 1/4: certificate withheld (exploratory mode)")
    t = spectral_radius_bound(params)
    report = check_superharmonic(params, t, kmax)
    if not report.passed:
        raise CertificateError(f"Superharmonic check failed at t={t}: max ratio {report.details['max_ratio']}")
    N, eps0 = uniform_irreducibility_constants(params)
    return {"t": t, "superharmonic": report.to_dict(), "N": N, "eps0": eps0}
