"""Solvability, score, good-use and combined restart heuristics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

from .level import Layout, LevelState
from .propagation import ForceMap, PropagationConstants, propagate
from .trajectory import Shot, TrajectoryParams, reachable_for

DEFAULT_THRESHOLDS = {"red": 5000.0, "blue": 6000.0, "yellow": 7000.0, "black": 10000.0, "white": 5000.0}
DEFAULT_WEIGHTS = (0.2, 0.2, 0.2, 0.4)
DEFAULT_EFFECTIVENESS = {
    "red": ("ice", "stone", "wood"),
    "white": ("ice", "stone", "wood"),
    "yellow": ("wood",),
    "blue": ("ice",),
    "black": ("stone",),
}


def _frozen_pairs(value):
    if isinstance(value, Mapping):
        value = value.items()
    return tuple(sorted((k, tuple(sorted(v)) if isinstance(v, (list, tuple, set, frozenset)) else v)
                        for k, v in value))


@dataclass(frozen=True)
class RestartConfig:
    thresholds: tuple = field(default_factory=lambda: _frozen_pairs(DEFAULT_THRESHOLDS))
    weights: tuple[float, float, float, float] = DEFAULT_WEIGHTS
    restart_threshold: float = 0.5
    effectiveness: tuple = field(default_factory=lambda: _frozen_pairs(DEFAULT_EFFECTIVENESS))
    delta_move: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "thresholds", _frozen_pairs(self.thresholds))
        object.__setattr__(self, "effectiveness", _frozen_pairs(self.effectiveness))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) != 4:
            raise ValueError("exactly four weights are required")
        if any(not 0 <= w <= 1 for w in self.weights):
            raise ValueError("weights must lie in [0, 1]")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            warnings.warn(f"restart weights sum to {sum(self.weights)}, not 1", stacklevel=3)
        if any(not t > 0 for _, t in self.thresholds):
            raise ValueError("score thresholds must be positive")
        if not 0 <= self.restart_threshold <= 1:
            raise ValueError("restart_threshold must lie in [0, 1]")
        if self.delta_move < 0:
            raise ValueError("delta_move must be non-negative")

    def threshold(self, bird: str) -> float:
        return dict(self.thresholds)[bird]

    def good_against(self, bird: str) -> tuple[str, ...]:
        return dict(self.effectiveness).get(bird, ())


@dataclass(frozen=True)
class ShotOutcome:
    score_delta: float
    change_fraction: float
    hit_material: str | None
    bird: str
    birds_remaining_after: int
    destroyed: frozenset[int] = frozenset()
    moved: frozenset[int] = frozenset()
    impact_block: int | None = None

    def __post_init__(self):
        if not 0 <= self.change_fraction <= 1:
            raise ValueError("change_fraction must lie in [0, 1]")
        if self.score_delta < 0:
            raise ValueError("score_delta must be non-negative")


@dataclass(frozen=True)
class SolvabilityVerdict:
    solvable: bool
    witness: tuple[Shot, ForceMap] | None
    pigs_unkillable: frozenset[int]


def solvable_one_shot(state: LevelState, constants: PropagationConstants,
                      params: TrajectoryParams) -> SolvabilityVerdict:
    """Can one bird, hitting any reachable block, push lethal force into every pig?

    Shots are scanned by block id, target point and arc; the first shot
    that kills every pig is the witness. When none does,
    ``pigs_unkillable`` lists the pigs that survive the best shot (the
    first one killing the most pigs), or every pig if nothing is reachable.
    """
    if state.birds_left < 1:
        raise ValueError("no birds left")
    if not state.pigs:
        raise ValueError("no pigs alive: the level is already solved")
    return _solvable(state.layout, constants, params)


@lru_cache(maxsize=16384)
def _solvable(layout: Layout, constants: PropagationConstants, params: TrajectoryParams) -> SolvabilityVerdict:
    pigs = frozenset(p.id for p in layout.pigs)
    best_killed: frozenset[int] = frozenset()
    seen: dict[int, ForceMap] = {}
    for block_id, shots in reachable_for(layout, params).items():
        for shot in shots:
            if block_id not in seen:
                seen[block_id] = propagate(layout, block_id, 1.0, constants)
            fmap = seen[block_id]
            killed = pigs & fmap.destroyed
            if killed == pigs:
                return SolvabilityVerdict(True, (shot, fmap), frozenset())
            if len(killed) > len(best_killed):
                best_killed = killed
    return SolvabilityVerdict(False, None, pigs - best_killed)


def score_h(score_delta: float, threshold: float) -> float:
    """Shortfall of a shot's score gain below ``threshold``: 1 is no gain, 0 is enough."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    return max(threshold - score_delta, 0.0) / threshold


def good_use_components(outcome: ShotOutcome, config: RestartConfig) -> tuple[float, int]:
    change_term = 1.0 - outcome.change_fraction
    type_term = 0 if outcome.hit_material in config.good_against(outcome.bird) else 1
    return change_term, type_term


def restart_score(change_term: float, type_term: float, score_term: float,
                  unsolvable_term: float, weights=DEFAULT_WEIGHTS) -> float:
    terms = (change_term, type_term, score_term, unsolvable_term)
    for t in terms:
        if not 0 <= t <= 1:
            raise ValueError(f"restart term {t} outside [0, 1]")
    w1, w2, w3, w4 = weights
    return w1 * change_term + w2 * type_term + w3 * score_term + w4 * unsolvable_term


@dataclass(frozen=True)
class RestartDecision:
    decision: bool
    score: float
    terms: Mapping[str, float]
    verdict: SolvabilityVerdict | None = None


Predictor = Callable[[LevelState], bool]


def should_restart(state: LevelState, outcome: ShotOutcome | None, config: RestartConfig,
                   constants: PropagationConstants, params: TrajectoryParams,
                   predictor: Predictor | None = None) -> RestartDecision:
    """Combine the post-shot terms with the last-bird solvability check.

    ``predictor`` replaces the heuristic solvability verdict (it returns
    True for solvable); the harness uses it to plug in a perfect oracle.
    With one bird left and an unsolvable verdict the answer is always to
    restart.
    """
    if outcome is None:
        change_term, type_term, score_term = 0.0, 0, 0.0
    else:
        change_term, type_term = good_use_components(outcome, config)
        score_term = score_h(outcome.score_delta, config.threshold(outcome.bird))

    verdict = None
    unsolvable = 0
    if state.birds_left == 1 and state.pigs:
        if predictor is None:
            verdict = solvable_one_shot(state, constants, params)
            solvable = verdict.solvable
        else:
            solvable = predictor(state)
        unsolvable = 0 if solvable else 1

    score = restart_score(change_term, type_term, score_term, unsolvable, config.weights)
    decision = score > config.restart_threshold or unsolvable == 1
    terms = {"change": change_term, "type": float(type_term), "score": score_term,
             "unsolvable": float(unsolvable)}
    return RestartDecision(decision, score, terms, verdict)
