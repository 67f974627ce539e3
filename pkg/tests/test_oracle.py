import random

import pytest

from restart_reasoner.heuristics import solvable_one_shot
from restart_reasoner.level import LevelState, make_level, serialize_state
from restart_reasoner.oracle import (
    AgentPolicy, NoShotError, OracleConstants, apply_shot, dominance_violations, next_shot,
    oracle_solvable, oracle_witness, settle,
)
from restart_reasoner.propagation import PropagationConstants
from restart_reasoner.trajectory import TrajectoryParams, scan_shots

from conftest import fixture_level

ORACLE = OracleConstants()
PARAMS = TrajectoryParams()


def first_shot_at(level, block_id):
    return next(s for s in scan_shots(level, PARAMS) if s.target_block == block_id)


def test_exposed_pig_shot():
    level = fixture_level("exposed")
    state = LevelState.initial(level)
    after, out = apply_shot(state, first_shot_at(level, 1), ORACLE, PARAMS)
    assert not after.pigs
    assert out.score_delta == ORACLE.pig_points
    assert out.destroyed == {1}
    assert after.elapsed_time == ORACLE.t_shot
    assert after.birds_left == 0


def test_unbreakable_stone():
    tough = OracleConstants(propagation=PropagationConstants(c=0.8, c1=0.8, c_l=0.9,
                                                            kill={"stone": 5.0}))
    level = make_level([("stone", 14, 1, 2, 2), ("pig", 25, 1, 0.7, 0.7)])
    after, out = apply_shot(LevelState.initial(level), first_shot_at(level, 1), tough, PARAMS)
    assert out.destroyed == frozenset() and out.score_delta == 0
    assert out.change_fraction == 0.0
    assert out.hit_material == "stone"
    assert after.alive_blocks == level.blocks


def test_chain_of_three():
    level = fixture_level("chain")
    state = LevelState.initial(level)
    after, out = apply_shot(state, first_shot_at(level, 1), ORACLE, PARAMS)
    assert out.destroyed == {1, 2, 3}
    assert out.score_delta == 2 * ORACLE.block_points + ORACLE.pig_points
    assert after.accumulated_score == out.score_delta + ORACLE.bird_points


def test_apply_shot_is_pure():
    level = fixture_level("chain")
    state = LevelState.initial(level)
    before = serialize_state(state)
    a = apply_shot(state, first_shot_at(level, 1), ORACLE, PARAMS)
    b = apply_shot(state, first_shot_at(level, 1), ORACLE, PARAMS)
    assert a == b and serialize_state(state) == before


def test_no_birds_left():
    level = fixture_level("exposed")
    with pytest.raises(ValueError):
        apply_shot(LevelState(level, (), level.blocks), first_shot_at(level, 1), ORACLE, PARAMS)


def test_unsupported_blocks_drop():
    blocks, moved = settle(make_level([("wood", 10, 3, 1, 1), ("wood", 10, 1, 1, 1)]).blocks, 0.05)
    assert blocks[1].y == 2.0 and moved == {1: 1.0}


def test_oracle_solvable_examples():
    assert oracle_solvable(LevelState.initial(fixture_level("exposed")), ORACLE, PARAMS)
    assert not oracle_solvable(LevelState.initial(fixture_level("vault")), ORACLE, PARAMS)


def test_chain_too_weak_for_tough_pig():
    tough = OracleConstants(propagation=PropagationConstants(c=0.8, c1=0.8, c_l=0.9, kill={"pig": 0.9}))
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 11, 1, 1, 1), ("pig", 12, 1, 1, 1),
                        ("stone", 12, 2, 1, 3), ("stone", 11.5, 5, 2, 0.4)])
    state = LevelState.initial(level)
    assert oracle_witness(state, tough, PARAMS) is None


def test_dominance_over_small_corpus(small_corpus):
    for g in small_corpus:
        state = LevelState.initial(g.level)
        if oracle_solvable(state, ORACLE, PARAMS):
            assert solvable_one_shot(state, PropagationConstants(), PARAMS).solvable


def test_dominance_violations():
    assert dominance_violations(ORACLE.propagation, PropagationConstants()) == []
    got = dominance_violations(PropagationConstants(), PropagationConstants(c=0.5))
    assert got == ["oracle c exceeds heuristic c"]
    got = dominance_violations(PropagationConstants(kill={"pig": 0.05}), PropagationConstants())
    assert got == ["oracle kill(pig) below heuristic kill(pig)"]


def test_block_count_and_score_monotone(small_corpus):
    policy = AgentPolicy("naive", 3)
    for g in small_corpus[:12]:
        state = LevelState.initial(g.level)
        rng = random.Random(0)
        while state.birds_left and state.pigs:
            before = state
            state, _ = apply_shot(state, next_shot(policy, state, PARAMS, ORACLE, rng), ORACLE, PARAMS)
            assert len(state.alive_blocks) <= len(before.alive_blocks)
            assert state.accumulated_score >= before.accumulated_score


def test_naive_single_pig():
    level = make_level([("wood", 12, 1, 1, 1), ("pig", 20, 1, 0.7, 0.7)], birds=("red",))
    state = LevelState.initial(level)
    picks = {next_shot(AgentPolicy("naive", s), state, PARAMS).target_block for s in range(10)}
    assert picks == {2}


def test_naive_seeded_choice():
    level = make_level([("pig", 12, 1, 0.7, 0.7), ("pig", 20, 1, 0.7, 0.7)], birds=("red",))
    state = LevelState.initial(level)
    picks = [next_shot(AgentPolicy("naive", s), state, PARAMS) for s in range(20)]
    assert len({p.target_block for p in picks}) == 2
    assert picks == [next_shot(AgentPolicy("naive", s), state, PARAMS) for s in range(20)]


def test_naive_falls_back_to_any_block():
    state = LevelState.initial(fixture_level("vault"))
    shot = next_shot(AgentPolicy("naive", 0), state, PARAMS)
    assert shot.target_block != 4


def test_greedy_prefers_column():
    level = make_level([("pig", 10, 1, 1, 1), ("stone", 16, 1, 0.5, 3), ("pig", 16.5, 1, 1, 1),
                        ("pig", 18.6, 1, 1, 1)], birds=("red", "red"))
    shot = next_shot(AgentPolicy("greedy"), LevelState.initial(level), PARAMS)
    assert shot.target_block == 2


def test_nothing_reachable():
    level = make_level([("stone", 12, 1, 0.5, 2), ("stone", 14.5, 1, 0.5, 2), ("stone", 12, 3, 3, 0.5),
                        ("pig", 13, 1, 0.7, 0.7)])
    assert next_shot(AgentPolicy(), LevelState.initial(level), PARAMS).target_block in (1, 2, 3)
    out_of_reach = level.blocks[4].moved_to(29.5, 1)
    state = LevelState(level, ("red",), (level.blocks[0], out_of_reach))
    with pytest.raises(NoShotError):
        next_shot(AgentPolicy(), state, TrajectoryParams(speed=5.0))


def test_policy_validation():
    with pytest.raises(ValueError):
        AgentPolicy("smart")
