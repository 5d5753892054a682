"""
Result records shared by checkers and estimators.
"""
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

PASS = "pass"
FAIL = "fail"
VACUOUS = "vacuous"
INCONCLUSIVE = "inconclusive"
CONDITIONAL = "conditional pass"

MAX_WITNESSES = 20


@dataclass
class CheckReport:
    name: str
    status: str = PASS
    checked: int = 0
    violations: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)
    violation_count: int = 0

    @property
    def passed(self) -> bool:
        return self.status in (PASS, VACUOUS, CONDITIONAL)

    def record(self, witness: Dict[str, Any]):
        self.violation_count += 1
        if len(self.violations) < MAX_WITNESSES:
            self.violations.append(witness)
        self.status = FAIL

    def merge(self, other: "CheckReport"):
        """Fold another report of the same check into this one."""
        self.checked += other.checked
        self.violation_count += other.violation_count
        room = MAX_WITNESSES - len(self.violations)
        if room > 0:
            self.violations.extend(other.violations[:room])
        if FAIL in (self.status, other.status):
            self.status = FAIL
        for key, value in other.details.items():
            if isinstance(value, (int, float)) and isinstance(self.details.get(key), (int, float)):
                if key.startswith("min"):
                    self.details[key] = min(self.details[key], value)
                elif key.startswith("max"):
                    self.details[key] = max(self.details[key], value)
                else:
                    self.details[key] = self.details[key] + value
            else:
                self.details.setdefault(key, value)
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class DecayRow:
    n: int
    trials: int
    successes: float
    p_hat: float
    ci_lo: float
    ci_hi: float

    def as_csv(self):
        return [self.n, self.trials, _fmt(self.successes), _fmt(self.p_hat), _fmt(self.ci_lo), _fmt(self.ci_hi)]


@dataclass(frozen=True)
class ExpFit:
    """P ~ K * c**n fitted by least squares on log-probabilities."""

    K: float
    c: float
    r_squared: float
    window: tuple
    slope: float
    source: str = "p_hat"


@dataclass
class DecayReport:
    name: str
    rows: List[DecayRow]
    fit: Optional[ExpFit]
    seed: int
    trials: int
    mode: str = "sample"
    drift: Optional[float] = None
    flags: List[str] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    # empirical kernel table, when the estimator collects one
    kernels: Optional[Any] = None

    CSV_HEADER = ["n", "trials", "successes", "p_hat", "ci_lo", "ci_hi"]

    def row(self, n: int) -> DecayRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def p_hat(self, n: int) -> float:
        return self.row(n).p_hat

    def csv_rows(self):
        return [self.CSV_HEADER] + [r.as_csv() for r in self.rows]

    def summary(self) -> Dict[str, Any]:
        out = {
            "name": self.name,
            "mode": self.mode,
            "seed": self.seed,
            "trials": self.trials,
            "flags": list(self.flags),
        }
        if self.fit is not None:
            out["fit"] = {"K": self.fit.K, "c": self.fit.c, "r_squared": self.fit.r_squared,
                          "window": list(self.fit.window), "source": self.fit.source}
        if self.drift is not None:
            out["drift"] = self.drift
        return out


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value
