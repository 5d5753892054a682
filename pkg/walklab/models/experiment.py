"""
Experiment configuration: a flat, schema-versioned JSON document.

Every accepted key is declared in SCHEMA with its type and default. Values
are resolved in the order schema default < environment defaults < config
file < command-line flags.
"""
import json
import os
from typing import Any, Dict, List, Optional

from ..core.errors import ConfigError

SCHEMA_VERSION = 1
KINDS = ("chain", "walk", "geom", "shadow", "casson", "pipeline")
ESTIMATORS = ("linear_progress", "shadow_decay", "shadow_profile", "backtrack", "escape",
              "distance_from_D", "splitting_distance")

_NUM = (int, float)

# name: (accepted types, default)
SCHEMA: Dict[str, tuple] = {
    "schema_version": ((int,), SCHEMA_VERSION),
    "kind": ((str,), None),
    "seed": ((int,), None),
    "trials": ((int,), None),
    "out": ((str,), None),
    "strict": ((bool,), None),
    "workers": ((int,), None),
    "batch_size": ((int,), None),
    "mode": ((str,), "sample"),
    # chain
    "eps": (_NUM, 0.5),
    "q": (_NUM, 0.2),
    "n": ((int,), 400),
    "kmax": ((int,), 10000),
    "tail_A": (_NUM, 2.0),
    "tail_L": (_NUM, 0.1),
    # walks and geometry
    "space": ((str,), "tree"),
    "rank": ((int,), 2),
    "delta": (_NUM, None),
    "translation": (_NUM, 4.0),
    "mu": ((str, dict), "srw"),
    "D": ((list,), ["a"]),
    "D_offset": ((str,), ""),
    "Dp": ((list,), ["b"]),
    "E_offset": ((str,), "b^10"),
    "estimator": ((str,), "linear_progress"),
    "L": (_NUM, 0.25),
    "n_list": ((list,), [20, 40, 60, 80, 100]),
    "R": ((int,), 3),
    "N": ((int,), 1),
    "start": ((str,), ""),
    "target": ((str,), "aaaa"),
    "targets": ((list,), [2, 3, 4, 5, 6, 7, 8]),
    "radius": (_NUM, 0.0),
    "ball_radius": ((int,), 6),
    "consts": ((list,), [1, 0, 0]),
    "samples": ((int,), 1000),
    "A": (_NUM, 3.0),
    "K": (_NUM, 0.0),
    # casson
    "crossover": ((str,), None),
    "m_range": ((int,), 10),
    "z_n": ((int,), 400),
    "z_k": ((int,), 0),
    "generator_values": ((dict,), {"a": 0, "b": 1}),
    # pipeline
    "genus": ((int,), 2),
    "domination_times": ((list,), [16, 32, 64]),
    "R_max": ((int,), 8),
    "N_max": ((int,), 32),
    "calibration_trials": ((int,), None),
    "force_q": (_NUM, None),
    "c0": (_NUM, None),
    "splitting_L": (_NUM, 0.25),
    "splitting_n": ((list,), [2, 4, 6, 8, 10, 12, 14, 16]),
}


def _type_ok(value, types) -> bool:
    if isinstance(value, bool) and bool not in types:
        return False
    return isinstance(value, types)


class ExperimentConfig:
    """Validated, fully resolved experiment configuration."""

    def __init__(self, values: Dict[str, Any]):
        self._values = dict(values)

    def __getattr__(self, name):
        try:
            return self.__dict__["_values"][name]
        except KeyError:
            raise AttributeError(name) from None

    def __getitem__(self, name):
        return self._values[name]

    def get(self, name, default=None):
        value = self._values.get(name)
        return default if value is None else value

    def as_dict(self) -> Dict[str, Any]:
        return dict(sorted(self._values.items()))

    def replace(self, **changes) -> "ExperimentConfig":
        values = dict(self._values)
        values.update(changes)
        return ExperimentConfig.from_dict(values)

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]], overrides: Optional[Dict[str, Any]] = None,
                  defaults: Optional[Dict[str, Any]] = None) -> "ExperimentConfig":
        diagnostics: List[str] = []
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError("Experiment config must be a JSON object", ["top level is not an object"])

        merged = {key: spec[1] for key, spec in SCHEMA.items()}
        for source in (defaults or {}, data, overrides or {}):
            for key, value in source.items():
                if value is None and source is not data:
                    continue
                merged[key] = value

        for key in sorted(set(data) | set(overrides or {})):
            if key not in SCHEMA:
                diagnostics.append(f"unknown key: {key}")

        for key, (types, _default) in SCHEMA.items():
            value = merged.get(key)
            if value is None:
                continue
            if float in types and isinstance(value, int) and not isinstance(value, bool):
                merged[key] = value = float(value)
            if not _type_ok(value, types):
                names = "/".join(t.__name__ for t in types)
                diagnostics.append(f"{key}: expected {names}, got {type(value).__name__}")

        if merged.get("schema_version") != SCHEMA_VERSION:
            diagnostics.append(f"schema_version: expected {SCHEMA_VERSION}, got {merged.get('schema_version')}")
        if not merged.get("kind"):
            diagnostics.append("kind: required")
        elif merged["kind"] not in KINDS:
            diagnostics.append(f"kind: must be one of {', '.join(KINDS)}")
        for key in ("seed", "trials", "out", "workers", "batch_size", "strict"):
            if merged.get(key) is None:
                diagnostics.append(f"{key}: required")
        for key in ("trials", "workers", "batch_size", "samples", "n", "kmax", "rank"):
            value = merged.get(key)
            if isinstance(value, int) and not isinstance(value, bool) and value <= 0:
                diagnostics.append(f"{key}: must be positive")
        if merged.get("mode") not in ("sample", "enumerate"):
            diagnostics.append("mode: must be 'sample' or 'enumerate'")
        if merged.get("estimator") not in ESTIMATORS:
            diagnostics.append(f"estimator: must be one of {', '.join(ESTIMATORS)}")
        if merged.get("space") not in ("tree", "halfplane"):
            diagnostics.append("space: must be 'tree' or 'halfplane'")
        for key in ("n_list", "domination_times", "splitting_n", "targets"):
            value = merged.get(key)
            if isinstance(value, list) and not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in value):
                diagnostics.append(f"{key}: must be a list of nonnegative integers")
        consts = merged.get("consts")
        if isinstance(consts, list) and (len(consts) != 3 or not all(_type_ok(v, _NUM) for v in consts)):
            diagnostics.append("consts: must be three numbers [A, B, C]")

        if diagnostics:
            raise ConfigError("Invalid experiment config", diagnostics)
        return cls(merged)

    @classmethod
    def load(cls, path: Optional[str], overrides=None, defaults=None) -> "ExperimentConfig":
        data: Dict[str, Any] = {}
        if path:
            if not os.path.exists(path):
                raise ConfigError(f"Config file not found: {path}", [f"missing file {path}"])
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
            if not text.strip():
                raise ConfigError("Config file is empty", ["empty document: kind and schema_version are required"])
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigError(f"Config file is not valid JSON: {e}", [str(e)]) from e
        return cls.from_dict(data, overrides, defaults)
