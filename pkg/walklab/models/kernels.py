"""
Empirical transition kernels of an integer-valued process (the coarse
distance to a set, or a chain state), indexed by the current state.
"""
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Tuple


def _nested():
    return defaultdict(float)


@dataclass
class KernelTable:
    """
    counts[state][next] holds visit counts (sampling) or probabilities
    (exact enumeration, exact=True). strata split each state by the sign of
    the previous change: -1 down, 0 none, +1 up.
    """

    counts: Dict[int, Dict[int, float]] = field(default_factory=lambda: defaultdict(_nested))
    strata: Dict[Tuple[int, int], Dict[int, float]] = field(default_factory=lambda: defaultdict(_nested))
    exact: bool = False
    stride: int = 1

    def add_path(self, states: Iterable[int], weight: float = 1.0):
        states = list(states)
        prev_sign = 0
        for k in range(len(states) - 1):
            cur, nxt = states[k], states[k + 1]
            self.counts[cur][nxt] += weight
            self.strata[(cur, prev_sign)][nxt] += weight
            prev_sign = (nxt > cur) - (nxt < cur)

    def merge(self, other: "KernelTable") -> "KernelTable":
        for state, row in other.counts.items():
            for nxt, c in sorted(row.items()):
                self.counts[state][nxt] += c
        for key, row in other.strata.items():
            for nxt, c in sorted(row.items()):
                self.strata[key][nxt] += c
        return self

    def states(self) -> List[int]:
        return sorted(self.counts)

    def visits(self, state: int) -> float:
        return float(sum(self.counts.get(state, {}).values()))

    def row(self, state: int) -> Dict[int, float]:
        total = self.visits(state)
        if total <= 0:
            return {}
        return {nxt: c / total for nxt, c in sorted(self.counts[state].items())}

    def count_at_most(self, state: int, level: int) -> float:
        return float(sum(c for nxt, c in self.counts.get(state, {}).items() if nxt <= level))

    def cdf(self, state: int, level: int) -> float:
        total = self.visits(state)
        return self.count_at_most(state, level) / total if total > 0 else 0.0

    def history_tv(self, min_visits: float) -> Dict[int, float]:
        """Largest total-variation distance between history strata of each state."""
        out: Dict[int, float] = {}
        for state in self.states():
            rows = []
            for sign in (-1, 0, 1):
                row = self.strata.get((state, sign))
                total = float(sum(row.values())) if row else 0.0
                if total >= min_visits:
                    rows.append({k: v / total for k, v in row.items()})
            worst = 0.0
            for i in range(len(rows)):
                for j in range(i + 1, len(rows)):
                    keys = set(rows[i]) | set(rows[j])
                    tv = 0.5 * sum(abs(rows[i].get(k, 0.0) - rows[j].get(k, 0.0)) for k in keys)
                    worst = max(worst, tv)
            if len(rows) > 1:
                out[state] = worst
        return out

    def csv_rows(self):
        rows = [["state", "next", "count", "probability"]]
        for state in self.states():
            total = self.visits(state)
            for nxt, c in sorted(self.counts[state].items()):
                rows.append([state, nxt, c, c / total])
        return rows
