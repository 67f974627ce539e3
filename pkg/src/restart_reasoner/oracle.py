"""Deterministic toy physics used as ground truth, plus the baseline agents.

The oracle runs the same propagation rules as the heuristic but with
lossy constants, removes whatever breaks, and lets unsupported blocks
drop straight down.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .heuristics import ShotOutcome
from .level import Block, Layout, LevelState, serialize_state
from .propagation import PropagationConstants, propagate
from .trajectory import Shot, TrajectoryParams, scan_shots, trace

POLICY_KINDS = ("naive", "greedy")


class NoShotError(RuntimeError):
    """Nothing in the level can be hit from the sling."""


def _default_oracle_physics() -> PropagationConstants:
    return PropagationConstants(c=0.8, c1=0.8, c_l=0.9)


@dataclass(frozen=True)
class OracleConstants:
    propagation: PropagationConstants = field(default_factory=_default_oracle_physics)
    pig_points: float = 10000.0
    block_points: float = 500.0
    bird_points: float = 10000.0
    t_shot: float = 10.0
    t_restart: float = 5.0

    def __post_init__(self):
        for name in ("pig_points", "block_points", "bird_points", "t_shot", "t_restart"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def dominance_violations(oracle: PropagationConstants, heuristic: PropagationConstants) -> list[str]:
    """Oracle settings that would let the oracle beat the heuristic.

    The heuristic can only over-estimate solvability when the oracle loses
    at least as much force on every rule and shares its thresholds.
    """
    out = []
    for name in ("c", "c1", "c_l", "d_max", "h_max", "s1"):
        if getattr(oracle, name) > getattr(heuristic, name):
            out.append(f"oracle {name} exceeds heuristic {name}")
    if oracle.f_floor < heuristic.f_floor:
        out.append("oracle f_floor below heuristic f_floor")
    if oracle.k != heuristic.k:
        out.append("oracle and heuristic use different contact tolerance k")
    if oracle.thrown_force_law != heuristic.thrown_force_law:
        out.append("oracle and heuristic use different thrown-force laws")
    ok, hk = oracle.kill_map, heuristic.kill_map
    for material in sorted(set(ok) | set(hk)):
        if oracle.kill_threshold(material) < heuristic.kill_threshold(material):
            out.append(f"oracle kill({material}) below heuristic kill({material})")
    return out


def settle(blocks: tuple[Block, ...], k: float) -> tuple[tuple[Block, ...], dict[int, float]]:
    """Drop unsupported blocks straight down until they rest on something.

    Returns the new blocks (id order) and how far each moved block fell.
    """
    placed: list[Block] = []
    moved: dict[int, float] = {}
    for b in sorted(blocks, key=lambda b: (b.y, b.id)):
        if b.is_ground:
            placed.append(b)
            continue
        rest = 0.0
        for other in placed:
            if min(b.right, other.right) - max(b.x, other.x) <= 1e-9:
                continue
            if other.top <= b.y + k:
                rest = max(rest, other.top)
        new_y = min(b.y, rest)
        if new_y < b.y:
            moved[b.id] = b.y - new_y
            b = b.moved_to(b.x, new_y)
        placed.append(b)
    return tuple(sorted(placed, key=lambda b: b.id)), moved


@dataclass(frozen=True)
class _Physics:
    blocks: tuple[Block, ...]
    impact: int | None
    hit_material: str | None
    destroyed: frozenset[int]
    moved: dict


@lru_cache(maxsize=65536)
def _shot_physics(layout: Layout, shot: Shot, constants: PropagationConstants, step: float) -> _Physics:
    hit = trace(shot, layout, step)
    if hit is None:
        return _Physics(layout.blocks, None, None, frozenset(), {})
    impact = hit[0]
    fmap = propagate(layout, impact, 1.0, constants)
    survivors = tuple(b for b in layout.blocks if b.id not in fmap.destroyed)
    settled, moved = settle(survivors, constants.k)
    material = next(b.material for b in layout.blocks if b.id == impact)
    return _Physics(settled, impact, material, fmap.destroyed, moved)


def apply_shot(state: LevelState, shot: Shot, oracle: OracleConstants, params: TrajectoryParams,
               delta_move: float = 0.1) -> tuple[LevelState, ShotOutcome]:
    """Fire the next bird; returns the new state and what the shot achieved.

    Points come from destroyed pigs and blocks; clearing the last pig also
    banks the bonus for every bird still unused.
    """
    if state.birds_left < 1:
        raise ValueError("no birds left")
    bird = state.remaining_birds[0]
    phys = _shot_physics(state.layout, shot, oracle.propagation, params.step)
    by_id = {b.id: b for b in state.alive_blocks}
    score = sum(oracle.pig_points if by_id[i].is_pig else oracle.block_points for i in phys.destroyed)
    moved = frozenset(i for i, dist in phys.moved.items() if dist > delta_move)
    total = sum(1 for b in state.level.blocks if not b.is_ground)
    change = min((len(phys.destroyed) + len(moved)) / total, 1.0) if total else 0.0

    birds = state.remaining_birds[1:]
    bonus = 0.0
    if not any(b.is_pig for b in phys.blocks):
        bonus = oracle.bird_points * len(birds)
    new_state = replace(
        state,
        remaining_birds=birds,
        alive_blocks=phys.blocks,
        accumulated_score=state.accumulated_score + score + bonus,
        elapsed_time=state.elapsed_time + oracle.t_shot,
        shots_taken=state.shots_taken + 1,
    )
    outcome = ShotOutcome(
        score_delta=float(score),
        change_fraction=change,
        hit_material=phys.hit_material,
        bird=bird,
        birds_remaining_after=len(birds),
        destroyed=phys.destroyed,
        moved=moved,
        impact_block=phys.impact,
    )
    return new_state, outcome


@lru_cache(maxsize=16384)
def _witness(layout: Layout, constants: PropagationConstants, params: TrajectoryParams) -> Shot | None:
    for shot in scan_shots(layout, params):
        phys = _shot_physics(layout, shot, constants, params.step)
        if not any(b.is_pig for b in phys.blocks):
            return shot
    return None


def oracle_witness(state: LevelState, oracle: OracleConstants, params: TrajectoryParams) -> Shot | None:
    """First shot in scan order that clears the level, if any."""
    if state.birds_left < 1:
        raise ValueError("no birds left")
    return _witness(state.layout, oracle.propagation, params)


def oracle_solvable(state: LevelState, oracle: OracleConstants, params: TrajectoryParams) -> bool:
    return oracle_witness(state, oracle, params) is not None


@dataclass(frozen=True)
class AgentPolicy:
    kind: str = "naive"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy {self.kind!r}; expected one of {POLICY_KINDS}")


def next_shot(policy: AgentPolicy, state: LevelState, params: TrajectoryParams,
              oracle: OracleConstants | None = None, rng: random.Random | None = None) -> Shot:
    """The policy's next shot.

    ``naive`` picks uniformly among shots aimed at pigs (any block when no
    pig is reachable). ``greedy`` takes the shot with the largest oracle
    score gain, earliest in scan order on ties. Without ``rng`` the choice
    is seeded from the policy seed and the state itself.
    """
    if state.birds_left < 1 or not state.pigs:
        raise ValueError("next_shot needs a bird and a pig")
    shots = scan_shots(state.layout, params)
    if not shots:
        raise NoShotError("no block is reachable from the sling")
    if policy.kind == "greedy":
        oracle = oracle or OracleConstants()
        best, best_score = shots[0], -1.0
        for shot in shots:
            phys = _shot_physics(state.layout, shot, oracle.propagation, params.step)
            by_id = {b.id: b for b in state.alive_blocks}
            score = sum(oracle.pig_points if by_id[i].is_pig else oracle.block_points
                        for i in phys.destroyed)
            if score > best_score:
                best, best_score = shot, score
        return best
    pig_ids = {p.id for p in state.pigs}
    candidates = [s for s in shots if s.target_block in pig_ids] or shots
    if rng is None:
        rng = random.Random(f"{policy.seed}:{serialize_state(state)}")
    return candidates[rng.randrange(len(candidates))]
