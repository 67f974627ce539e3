"""The global configuration file: one JSON document, one section per component.

Precedence is command-line flags over the file over built-in defaults.
Unknown sections or keys are rejected, and each value goes through the
range checks of the type it configures. Oracle constants that out-perform
the heuristic ones are allowed (``solvable`` never consults the oracle) but
reported by :meth:`GlobalConfig.dominance_problems`.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

from .heuristics import RestartConfig
from .oracle import OracleConstants, dominance_violations
from .propagation import PropagationConstants
from .trajectory import TrajectoryParams

ENV_VAR = "RESTART_REASONER_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class HarnessParams:
    trials: int = 100
    restart_cap: int = 10

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.restart_cap < 0:
            raise ValueError("restart_cap must be non-negative")


@dataclass(frozen=True)
class GlobalConfig:
    propagation: PropagationConstants = field(default_factory=PropagationConstants)
    trajectory: TrajectoryParams = field(default_factory=TrajectoryParams)
    restart: RestartConfig = field(default_factory=RestartConfig)
    oracle: OracleConstants = field(default_factory=OracleConstants)
    harness: HarnessParams = field(default_factory=HarnessParams)

    def dominance_problems(self) -> list[str]:
        """Why the heuristic might not over-estimate the oracle; empty when it must."""
        return dominance_violations(self.oracle.propagation, self.propagation)

    def to_dict(self) -> dict:
        return {
            "propagation": _section_dict(self.propagation),
            "trajectory": _section_dict(self.trajectory),
            "restart": _section_dict(self.restart),
            "oracle": {
                **{k: v for k, v in _section_dict(self.oracle).items() if k != "propagation"},
                "propagation": _section_dict(self.oracle.propagation),
            },
            "harness": _section_dict(self.harness),
        }


def _section_dict(obj) -> dict:
    out = {}
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        if f.name in ("kill", "thresholds"):
            value = dict(value)
        elif f.name == "effectiveness":
            value = {k: list(v) for k, v in value}
        elif f.name == "weights":
            value = list(value)
        out[f.name] = value
    return out


def _build(cls, base, overrides: dict, where: str):
    if not isinstance(overrides, dict):
        raise ConfigError(f"{where}: expected an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(overrides) - names
    if unknown:
        raise ConfigError(f"{where}: unknown keys {', '.join(sorted(unknown))}")
    overrides = dict(overrides)
    for name in ("kill", "thresholds", "effectiveness"):
        if name in overrides and isinstance(overrides[name], dict):
            overrides[name] = {**dict(getattr(base, name)), **overrides[name]}
    try:
        return dataclasses.replace(base, **overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(doc: dict, base: GlobalConfig | None = None) -> GlobalConfig:
    base = base or GlobalConfig()
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    sections = {"propagation", "trajectory", "restart", "oracle", "harness"}
    unknown = set(doc) - sections
    if unknown:
        raise ConfigError(f"unknown sections {', '.join(sorted(unknown))}")
    parts = {}
    parts["propagation"] = _build(PropagationConstants, base.propagation, doc.get("propagation", {}), "propagation")
    parts["trajectory"] = _build(TrajectoryParams, base.trajectory, doc.get("trajectory", {}), "trajectory")
    parts["restart"] = _build(RestartConfig, base.restart, doc.get("restart", {}), "restart")
    oracle_doc = dict(doc.get("oracle", {}))
    oracle_prop = _build(PropagationConstants, base.oracle.propagation,
                         oracle_doc.pop("propagation", {}), "oracle.propagation")
    parts["oracle"] = _build(OracleConstants, dataclasses.replace(base.oracle, propagation=oracle_prop),
                             oracle_doc, "oracle")
    parts["harness"] = _build(HarnessParams, base.harness, doc.get("harness", {}), "harness")
    try:
        return GlobalConfig(**parts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | os.PathLike | None = None) -> GlobalConfig:
    """Read ``path``, else the file named by ``$RESTART_REASONER_CONFIG``, else defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return GlobalConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    return config_from_dict(doc)
