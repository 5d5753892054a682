"""
Experiment runner - one method per experiment kind plus the full pipeline.

Each method fills a RunWriter with CSV tables and summary lines and
returns the results block of the manifest.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .. import __version__
from ..core.config import Config
from ..core.errors import CertificateError, ConfigError, EstimatorError
from ..models import words
from ..models.casson import TREFOIL
from ..models.chain import CERTIFIED_Q_LIMIT, ChainParams
from ..models.experiment import ExperimentConfig
from ..models.measure import StepDistribution
from ..models.quasiconvex import QuasiconvexSet, axis
from ..models.reports import CONDITIONAL, FAIL, CheckReport, DecayReport
from ..models.shadow import ShadowSpec
from ..models.space import FreeGroupTree, HalfPlane, ModelSpace
from ..utils.artifacts import RunWriter
from ..utils.batching import BatchConfig
from ..utils.helpers import parse_kv
from . import casson, chain, estimators, geometry, shadow, walker

logger = logging.getLogger(__name__)

MIN_CHAIN_Q = 1e-6


@dataclass
class RunResult:
    manifest: Dict[str, Any]
    summary: List[str]
    files: List[str] = field(default_factory=list)
    # short answer echoed by the CLI (e.g. a crossover n)
    headline: Optional[str] = None


def _status_line(report: CheckReport) -> str:
    return f"{report.name}: {report.status} ({report.checked} checked, {report.violation_count} violations)"


class ExperimentRunner:
    """
    Runs validated experiment configs: chain, walk, geom, shadow, casson and
    the pipeline that chains calibration, the chain certificate, kernel
    domination, the splitting fit and the crossover.
    """

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.batch = BatchConfig(batch_size=cfg.batch_size, workers=cfg.workers)
        self.headline: Optional[str] = None
        logger.info(f"[ExperimentRunner] kind={cfg.kind} seed={cfg.seed} trials={cfg.trials} strict={cfg.strict}")

    def run(self) -> RunResult:
        handler = getattr(self, f"run_{self.cfg.kind}")
        writer = RunWriter(self.cfg.out)
        writer.line(f"walklab {__version__} - {self.cfg.kind} run, seed {self.cfg.seed}")
        results = handler(writer)
        manifest = {
            "tool": "walklab",
            "version": __version__,
            "kind": self.cfg.kind,
            "seed": self.cfg.seed,
            "config": self.cfg.as_dict(),
            "results": results,
        }
        files = writer.write(manifest)
        return RunResult(manifest, writer.summary_lines, files, self.headline)

    # =========================================================================
    # BUILDERS
    # =========================================================================
    def space(self) -> ModelSpace:
        cfg = self.cfg
        if cfg.space == "tree":
            return FreeGroupTree(cfg.rank)
        delta = cfg.get("delta", Config.HALFPLANE_DELTA)
        return HalfPlane(delta=delta, rank=cfg.rank, translation=cfg.translation)

    def mu(self) -> StepDistribution:
        spec = self.cfg.mu
        if isinstance(spec, dict):
            return StepDistribution.from_mapping({k: float(v) for k, v in spec.items()}, self.cfg.rank)
        if spec == "srw":
            return StepDistribution.simple_random_walk(self.cfg.rank)
        if spec.startswith("point:"):
            return StepDistribution.point_mass(spec.split(":", 1)[1], self.cfg.rank)
        raise ConfigError(f"Unknown step distribution {spec!r}", ["mu: 'srw', 'point:<word>' or a word->weight map"])

    def quasiconvex(self, space: ModelSpace, generators: List[str], offset: str = "") -> QuasiconvexSet:
        if not generators:
            raise ConfigError("A quasiconvex set needs at least one generator")
        if isinstance(space, HalfPlane) and len(generators) == 1:
            # the translation axis as a geodesic line; it passes through the basepoint
            return geometry.axis_line(space, words.parse_word(generators[0])).translate(space, words.parse_word(offset))
        return axis(*generators, offset=offset)

    def sets(self, space: ModelSpace):
        D = self.quasiconvex(space, self.cfg.D, self.cfg.D_offset)
        Dp = self.quasiconvex(space, self.cfg.Dp)
        return D, Dp

    def walk_measure(self, space: ModelSpace) -> StepDistribution:
        mu = self.mu()
        if self.cfg.strict:
            walker.check_semigroup_support(mu, strict=True)
        if self.cfg.N > 1:
            mu = walker.iterate_measure(mu, self.cfg.N)
        return mu

    def chain_params(self, eps: float, q: float, n: int = 0) -> ChainParams:
        return ChainParams(eps, q, truncation=max(1001, n), exploratory=not self.cfg.strict)

    # =========================================================================
    # CHAIN
    # =========================================================================
    def run_chain(self, writer: RunWriter) -> Dict[str, Any]:
        cfg = self.cfg
        params = self.chain_params(cfg.eps, cfg.q, cfg.n)
        dist = chain.n_step_distribution(params, cfg.n)
        writer.table("distribution", chain.distribution_rows(dist))
        results: Dict[str, Any] = {"params": params.describe(), "n": cfg.n, "mass": dist.mass, "mean": dist.mean()}

        rows = chain.check_row_sums(params)
        results["row_sums"] = rows.to_dict()
        rho_hat = chain.estimate_spectral_radius(params, cfg.n)
        results["rho_hat"] = rho_hat

        if params.certified:
            cert = chain.chain_certificate(params, cfg.kmax)
            results["certificate"] = cert
            ratios = chain.superharmonic_ratios(params, min(cfg.kmax, 200))
            writer.table("superharmonic", [["k", "ratio"]] + [[k, float(r)] for k, r in enumerate(ratios)])
            tail = chain.tail_bound(params, cfg.tail_A, cfg.tail_L, cfg.n, cert["t"])
            results["tail"] = {"A": cfg.tail_A, "L": cfg.tail_L, "bound": tail.bound, "L_max": tail.L_max,
                               "decays": tail.decays}
            writer.line(f"certificate: pass at t={cert['t']:.6g} (N={cert['N']}, eps0={cert['eps0']:.6g})")
            writer.line(f"spectral estimate at n={cfg.n}: {rho_hat:.6f} <= {cert['t']:.6f}")
            writer.line(f"tail bound at A={cfg.tail_A}, L={cfg.tail_L}: {tail.bound:.6e} (L_max={tail.L_max:.6f})")
            self.headline = f"certificate pass t={cert['t']:.6g}"
        else:
            results["certificate"] = None
            writer.line(f"certificate: withheld, q={params.q} >= 1/4 (exploratory run)")
            writer.line(f"spectral estimate at n={cfg.n}: {rho_hat:.6f}")
            self.headline = "certificate withheld"
        writer.line(f"mass after {cfg.n} steps: {dist.mass!r}, mean {dist.mean():.6f}")
        return results

    # =========================================================================
    # WALK ESTIMATORS
    # =========================================================================
    def run_walk(self, writer: RunWriter) -> Dict[str, Any]:
        cfg = self.cfg
        space = self.space()
        mu = self.walk_measure(space)
        D, Dp = self.sets(space)
        x0 = space.basepoint()
        common = dict(trials=cfg.trials, seed=cfg.seed, mode=cfg.mode, batch=self.batch)
        name = cfg.estimator
        results: Dict[str, Any] = {"estimator": name, "space": space.describe(), "mu": mu.describe()}

        if name == "linear_progress":
            report = estimators.estimate_linear_progress(mu, space, x0, cfg.L, cfg.n_list, **common)
        elif name == "shadow_decay":
            target = space.act(words.parse_word(cfg.target), x0)
            report = estimators.estimate_shadow_decay(mu, space, x0, ShadowSpec(x0, target, cfg.radius),
                                                      cfg.n_list, **common)
        elif name == "shadow_profile":
            report = estimators.estimate_shadow_profile(mu, space, x0, cfg.targets, cfg.n_list[-1],
                                                        radius=cfg.radius, **common)
        elif name == "distance_from_D":
            report = estimators.estimate_distance_from_D(mu, space, D, cfg.L, cfg.n_list, R=cfg.R, **common)
            writer.table("kernels", report.kernels.csv_rows())
        elif name == "splitting_distance":
            report = estimators.estimate_splitting_distance(mu, space, D, Dp, cfg.L, cfg.n_list,
                                                            consts=cfg.consts, **common)
            writer.table("splitting_events", self._event_rows(report))
        elif name == "backtrack":
            start = cfg.start or walker.start_at_level(space, D, cfg.R, 1)
            est = estimators.estimate_backtrack(mu, space, D, start, cfg.R, cfg.n_list[-1],
                                                consts=cfg.consts, **common)
            writer.table("backtrack", est.csv_rows())
            writer.line(f"backtrack from {start!r}: t={est.t}, q_hat={est.q_hat:.6f}, q_upper={est.q_upper:.6f}")
            writer.line(f"cases: {', '.join(f'{k}={v:.4f}' for k, v in est.cases.items())}")
            results.update(est.summary())
            return results
        elif name == "escape":
            est = estimators.estimate_escape(mu, space, D, cfg.start, cfg.R, cfg.n_list[-1], **common)
            writer.table("escape", est.csv_rows())
            writer.line(f"escape: P(phi>=1)={est.p_escape:.6f}, P(phi=1)={est.p_one:.6f}, eps_hat={est.eps_hat:.6f}")
            results.update(est.summary())
            return results
        else:
            raise ConfigError(f"Unknown estimator {name!r}")

        writer.table(name, report.csv_rows())
        results.update(report.summary())
        results["classification"] = estimators.classify_decay(report)
        self._describe_decay(writer, report)
        return results

    def _describe_decay(self, writer: RunWriter, report: DecayReport):
        for row in report.rows:
            writer.line(f"n={row.n}: p_hat={row.p_hat:.6g} [{row.ci_lo:.6g}, {row.ci_hi:.6g}]")
        if report.fit is not None:
            writer.line(f"fit: K={report.fit.K:.6g}, c={report.fit.c:.6g}, R^2={report.fit.r_squared:.4f}")
        if report.drift is not None:
            writer.line(f"drift: {report.drift:.6f}")
        if report.flags:
            writer.line(f"flags: {', '.join(report.flags)}")

    @staticmethod
    def _event_rows(report: DecayReport):
        header = ["n", "m", "main", "initial", "final", "product", "union", "target", "uncovered"]
        return [header] + [[e[k] for k in header] for e in report.diagnostics["events"]]

    # =========================================================================
    # GEOMETRY
    # =========================================================================
    def run_geom(self, writer: RunWriter) -> Dict[str, Any]:
        cfg = self.cfg
        space = self.space()
        D, _Dp = self.sets(space)
        E = D.translate(space, words.parse_word(cfg.E_offset))
        results: Dict[str, Any] = {"space": space.describe(), "consts": list(cfg.consts)}
        reports: List[CheckReport] = []

        if isinstance(space, FreeGroupTree):
            z_radius = min(cfg.ball_radius, 3)
            reports.append(geometry.verify_ball(space, D, cfg.ball_radius, cfg.consts, z_radius=z_radius))
            reports.append(geometry.verify_ball(space, D, cfg.ball_radius, cfg.consts, E=E))
        else:
            reports.append(geometry.verify_samples(space, D, cfg.consts, cfg.samples, cfg.seed))
            reports.append(geometry.verify_samples(space, D, cfg.consts, cfg.samples, cfg.seed + 1, E=E))
        reports.append(geometry.verify_quasiconvexity(space, D, min(cfg.samples, 200), cfg.seed))
        reports.append(geometry.four_point_report(space, cfg.samples, cfg.seed))
        delta = geometry.calibrate_delta(space, cfg.samples, cfg.seed)

        results["checks"] = {r.name: r.to_dict() for r in reports}
        results["delta"] = delta
        results["set_distance"] = geometry.set_distance(space, D, E)
        writer.table("checks", [["check", "status", "checked", "violations"]] +
                     [[r.name, r.status, r.checked, r.violation_count] for r in reports])
        for r in reports:
            writer.line(_status_line(r))
        writer.line(f"observed four-point defect: {delta['max_defect']:.6f} (model delta {space.delta})")
        writer.line(f"d(D, E) = {results['set_distance']:.6f}")
        self.headline = "pass" if all(r.passed for r in reports) else "fail"
        return results

    # =========================================================================
    # SHADOWS
    # =========================================================================
    def run_shadow(self, writer: RunWriter) -> Dict[str, Any]:
        cfg = self.cfg
        space = self.space()
        D, _Dp = self.sets(space)
        x0 = space.basepoint()
        word = words.parse_word(cfg.target)
        if not word:
            raise ConfigError("Shadow runs need a non-empty target word")
        target = space.act(word, x0)
        near = space.act(word[: max(1, len(word) // 2)], x0)
        side = space.act(walker.first_free_letter(space, D), x0)
        A, B, _C = cfg.consts
        samples = cfg.samples

        reports = [
            shadow.verify_shadow_merge(space, ShadowSpec(x0, target, cfg.radius), ShadowSpec(x0, near, cfg.radius),
                                       samples, cfg.seed),
            shadow.verify_nested_gap(space, ShadowSpec(x0, target, cfg.radius), cfg.A, cfg.K, min(samples, 200), cfg.seed),
            shadow.verify_complement_sandwich(space, x0, target, cfg.A, cfg.K, samples, cfg.seed),
            shadow.verify_rebase(space, target, side, x0, space.distance(x0, target) - cfg.radius, (A, B),
                                 samples, cfg.seed),
        ]
        points = shadow.candidate_points(space, target, int(space.distance(x0, target)) + 2, samples, cfg.seed)
        radii = [cfg.radius + k for k in range(0, 4)]
        reports.append(shadow.verify_radius_monotone(space, ShadowSpec(x0, target, cfg.radius), radii, points))

        writer.table("checks", [["check", "status", "checked", "violations"]] +
                     [[r.name, r.status, r.checked, r.violation_count] for r in reports])
        for r in reports:
            writer.line(_status_line(r))
        self.headline = "pass" if all(r.passed for r in reports) else "fail"
        return {"space": space.describe(), "checks": {r.name: r.to_dict() for r in reports}}

    # =========================================================================
    # CASSON
    # =========================================================================
    def run_casson(self, writer: RunWriter) -> Dict[str, Any]:
        cfg = self.cfg
        results: Dict[str, Any] = {}

        diffs = casson.surgery_differences(TREFOIL, cfg.m_range)
        results["surgery_differences_constant"] = len(set(diffs)) == 1
        results["poincare"] = casson.poincare_sphere().lam
        writer.table("surgery", [["m", "lambda"]] +
                     [[m, casson.casson_surgery(TREFOIL, m).lam] for m in range(-cfg.m_range, cfg.m_range + 1)])
        writer.line(f"trefoil surgeries m in [-{cfg.m_range}, {cfg.m_range}]: consecutive differences {sorted(set(diffs))}")

        values = cfg.generator_values
        rng = np.random.default_rng(cfg.seed)
        failures = 0
        for _ in range(cfg.samples):
            u = geometry.random_word(rng, cfg.rank, int(rng.integers(0, 12)))
            v = geometry.random_word(rng, cfg.rank, int(rng.integers(0, 12)))
            lhs = casson.homomorphism_eval(values, words.multiply(u, v))
            if lhs != casson.homomorphism_eval(values, u) + casson.homomorphism_eval(values, v):
                failures += 1
        results["additivity"] = {"pairs": cfg.samples, "failures": failures}
        writer.line(f"homomorphism additivity: {cfg.samples} pairs, {failures} failures")

        law = casson.pushforward(self.mu(), values)
        results["pushforward"] = casson.pushforward_report(law)
        hit = casson.z_walk_hit_prob(law, cfg.z_n, cfg.z_k, strict=cfg.strict)
        results["hit"] = {"n": cfg.z_n, "k": cfg.z_k, "probability": hit.probability, "c": hit.c}
        writer.line(f"P(S_{cfg.z_n} = {cfg.z_k}) = {hit.probability:.6f} (c = {hit.c:.6f})")

        if cfg.crossover:
            params = parse_kv(cfg.crossover)
            missing = [k for k in ("K", "c", "c0") if k not in params]
            if missing:
                raise ConfigError("crossover needs K, c and c0", [f"missing {k}" for k in missing])
            n = casson.existence_crossover(params["K"], params["c"], params["c0"])
            sustained = casson.existence_crossover(params["K"], params["c"], params["c0"], sustained=True)
            results["crossover"] = {**params, "n": n, "sustained_n": sustained,
                                    "verified": casson.verify_crossover(params["K"], params["c"], params["c0"], n)}
            writer.line(f"crossover: n = {n} (sustained from {sustained})")
            self.headline = str(n)
        return results

    # =========================================================================
    # PIPELINE
    # =========================================================================
    def run_pipeline(self, writer: RunWriter) -> Dict[str, Any]:
        cfg = self.cfg
        space = self.space()
        mu = self.mu()
        if cfg.strict:
            walker.check_semigroup_support(mu, strict=True)
        D, Dp = self.sets(space)
        trials = cfg.get("calibration_trials", cfg.trials)
        z = Config.Z_SCORE
        results: Dict[str, Any] = {}

        # 1. calibration
        cal = estimators.calibrate(mu, space, D, trials, cfg.seed, cfg.R_max, cfg.N_max, cfg.mode, z, self.batch)
        results["calibration"] = cal.as_dict()
        writer.table("calibration", [["N", "R", "eps_hat", "q_upper"]] + [list(h) for h in cal.history])
        writer.line(f"calibration: R={cal.R}, N={cal.N}, eps_hat={cal.eps_hat:.6f}, q_upper={cal.q_upper:.6f}")

        # 2. chain certificate
        q = cal.q_upper if cfg.get("force_q") is None else cfg.force_q
        if q >= CERTIFIED_Q_LIMIT:
            raise CertificateError(f"q={q} >= 1/4: no chain certificate, pipeline stopped")
        if q < MIN_CHAIN_Q:
            # no backtracking was observed; the chain still needs q > 0
            writer.line(f"q_upper={q:g} raised to {MIN_CHAIN_Q:g}")
            q = MIN_CHAIN_Q
        params = ChainParams(cal.eps_hat, q, truncation=max(1001, max(cfg.domination_times)))
        cert = chain.chain_certificate(params, cfg.kmax)
        results["certificate"] = cert
        writer.line(f"certificate: pass at t={cert['t']:.6g}, eps0={cert['eps0']:.6g}")

        # 3. kernel and distribution domination
        mu_N = walker.iterate_measure(mu, cal.N)
        dist = estimators.estimate_distance_from_D(mu_N, space, D, cfg.L, cfg.domination_times, cfg.trials,
                                                   cfg.seed, R=cal.R, mode="sample", z=z, batch=self.batch)
        kernel_report = chain.check_kernel_domination(dist.kernels, params, z)
        writer.table("kernels", dist.kernels.csv_rows())
        results["kernel_domination"] = kernel_report.to_dict()
        writer.line(_status_line(kernel_report))

        dom_rows = [["n", "state", "chain_cdf", "empirical_cdf"]]
        dom_reports = []
        for n in cfg.domination_times:
            chain_dist = chain.n_step_distribution(params, n)
            histogram = dist.diagnostics["histograms"][n]
            rep = chain.check_distribution_domination(chain_dist, histogram, dist.diagnostics["total_weight"],
                                                      z=z, name=f"distribution_domination@{n}")
            dom_reports.append(rep)
            running = 0.0
            for level in range(max(max(histogram, default=0), n) + 1):
                running += histogram.get(level, 0.0)
                dom_rows.append([n, level, chain_dist.cdf(level), running / dist.diagnostics["total_weight"]])
            writer.line(_status_line(rep))
        writer.table("domination", dom_rows)
        results["distribution_domination"] = {r.name: r.to_dict() for r in dom_reports}
        failed = [r.name for r in [kernel_report, *dom_reports] if r.status == FAIL]
        if failed:
            raise CertificateError(f"domination failed ({', '.join(failed)}): no crossover claim, pipeline stopped")

        # 4. splitting distance fit
        split = estimators.estimate_splitting_distance(mu, space, D, Dp, cfg.splitting_L, cfg.splitting_n,
                                                       cfg.trials, cfg.seed, "sample", consts=cfg.consts,
                                                       z=z, batch=self.batch)
        writer.table("splitting_distance", split.csv_rows())
        writer.table("splitting_events", self._event_rows(split))
        if split.fit is None or not split.fit.c < 1:
            raise EstimatorError("Splitting-distance decay could not be fitted (no window with c < 1)")
        results["splitting"] = split.summary()
        writer.line(f"splitting fit: K={split.fit.K:.6g}, c={split.fit.c:.6g}, R^2={split.fit.r_squared:.4f}")

        # 5. thresholds
        typical = self._median(split.diagnostics["final_histogram"])
        thresholds = casson.genus_threshold_check(int(math.floor(typical)), cfg.genus)
        results["thresholds"] = {"median_distance": typical, **thresholds}
        writer.line(f"median splitting distance at n={cfg.splitting_n[-1]}: {typical:g} -> {thresholds}")

        # 6. crossover against c0 / sqrt(n)
        law = casson.pushforward(mu, cfg.generator_values)
        c0 = cfg.get("c0")
        if c0 is None:
            c0 = casson.sustained_constant(law, cfg.z_k, range(1, cfg.z_n + 1), strict=cfg.strict)
        n_star = casson.existence_crossover(split.fit.K, split.fit.c, c0, sustained=True)
        results["crossover"] = {"K": split.fit.K, "c": split.fit.c, "c0": c0, "n_star": n_star}

        verdict = {
            "n_star": n_star,
            "statement": f"for all n >= {n_star}, the 1/sqrt(n) visit bound exceeds the exponential bound",
            "kernel_domination": kernel_report.status,
            "distribution_domination": all(r.passed for r in dom_reports),
            "hyperbolic": thresholds["hyperbolic"],
        }
        if kernel_report.status == CONDITIONAL:
            untested = kernel_report.details["untested"]
            verdict["statement"] += (f" (conditional: {len(untested)} kernel states below "
                                     f"{kernel_report.details['min_visits']} visits were not tested)")
        results["verdict"] = verdict
        writer.line(verdict["statement"])
        self.headline = f"n* = {n_star}"
        logger.info(f"[Pipeline] Verdict n*={n_star}, kernel domination {kernel_report.status}")
        return results

    @staticmethod
    def _median(histogram: Dict[float, float]) -> float:
        total = sum(histogram.values())
        running = 0.0
        for value, weight in sorted(histogram.items()):
            running += weight
            if running >= total / 2:
                return float(value)
        return 0.0
