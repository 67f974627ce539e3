import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from restart_reasoner.level import make_level
from restart_reasoner.propagation import (
    RULE_NAMES, PropagationConstants, direct_force, direct_targets, expand, falling_applies, falling_force,
    network, propagate, propagation_matrix, structure_falling_applies, thrown_applies, thrown_force,
)

UNIT = PropagationConstants()


def ids(blocks):
    return {b.id for b in blocks}


def test_direct_target_on_the_right():
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 11, 1, 1, 1)])
    assert ids(direct_targets(level.block(1), level)) == {2}


def test_direct_target_on_the_left_only():
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 11, 1, 1, 1)])
    assert direct_targets(level.block(2), level) == frozenset()


def test_direct_targets_two_by_two():
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 11, 1, 1, 1),
                        ("wood", 10, 2, 1, 1), ("wood", 11, 2, 1, 1)])
    assert ids(direct_targets(level.block(1), level)) == {2, 3}


@pytest.mark.parametrize("f1, n, c, expected", [(1.0, 2, 1.0, 0.5), (1.0, 1, 1.0, 1.0), (0.8, 4, 0.9, 0.18)])
def test_direct_force(f1, n, c, expected):
    assert direct_force(f1, n, PropagationConstants(c=c)) == pytest.approx(expected, abs=1e-12)


def test_direct_force_needs_targets():
    with pytest.raises(ValueError):
        direct_force(1.0, 0, UNIT)


def test_falling_applies_near_tall_column():
    level = make_level([("stone", 10, 1, 1, 2), ("wood", 11.5, 1, 1, 1)])
    assert falling_applies(level.block(1), level.block(2), level)


def test_falling_excluded_when_in_contact():
    level = make_level([("stone", 10, 1, 1, 2), ("wood", 11, 1, 1, 1)])
    assert not falling_applies(level.block(1), level.block(2), level)


def test_falling_beyond_reach():
    level = make_level([("stone", 10, 1, 1, 2), ("wood", 16, 1, 1, 1)])
    assert not falling_applies(level.block(1), level.block(2), level)


@pytest.mark.parametrize("c1, d, h, expected", [
    (1.0, 1.0, 2.0, 1.0),
    (1.0, 0.0, 2.0, 0.0),
    (0.8, 0.5, 2.0, 0.8 * math.sin(math.pi / 4)),
])
def test_falling_force(c1, d, h, expected):
    assert falling_force(1.0, d, h, PropagationConstants(c1=c1)) == pytest.approx(expected, abs=1e-12)


def test_falling_force_degenerate_height():
    with pytest.raises(ValueError):
        falling_force(1.0, 0.0, 0.0, UNIT)


def test_structure_rule_reaches_pig_beside_support():
    # beam on a column; the pig sits right of the column inside its fall arc
    level = make_level([("wood", 10, 1, 0.5, 2), ("wood", 9.5, 3, 1.5, 0.4),
                        ("pig", 11.2, 1, 0.7, 0.7), ("stone", 8, 1, 0.5, 2)])
    beam, pig = level.block(2), level.block(3)
    assert structure_falling_applies(beam, pig, level)
    edges = {t: (r, m) for t, r, m in network(level, UNIT).edges(2) if r == "structure"}
    assert edges[3] == ("structure", 1.0)


def test_structure_rule_needs_support():
    level = make_level([("wood", 10, 1, 1, 1), ("pig", 11.5, 1, 0.7, 0.7)])
    assert not structure_falling_applies(level.block(1), level.block(2), level)


def test_structure_rule_is_rightward_only():
    level = make_level([("wood", 10, 1, 0.5, 2), ("wood", 10, 3, 1, 0.4), ("pig", 8.5, 1, 0.7, 0.7)])
    assert not structure_falling_applies(level.block(2), level.block(3), level)


def test_thrown_predicates():
    c = PropagationConstants(d_max=3.0, h_max=2.0, s1=1.0)
    level = make_level([("ice", 10, 1, 0.5, 0.5), ("pig", 12.5, 1, 0.7, 0.7),
                        ("stone", 14, 1, 3, 3), ("pig", 20.5, 1, 0.7, 0.7)])
    assert thrown_applies(level.block(1), level.block(2), c)
    assert not thrown_applies(level.block(3), level.block(4), c)
    assert not thrown_applies(level.block(1), level.block(4), c)


@pytest.mark.parametrize("c, cl, travel, expected", [(1, 1, 5, 1.0), (0.9, 0.9, 2, 0.729), (1, 0.5, 0, 1.0)])
def test_thrown_force(c, cl, travel, expected):
    got = thrown_force(1.0, travel, PropagationConstants(c=c, c_l=cl))
    assert got == pytest.approx(expected, abs=1e-12)


def test_thrown_force_literal_law():
    c = PropagationConstants(c=0.9, c_l=0.9, thrown_force_law="literal")
    assert thrown_force(1.0, 2.0, c) == pytest.approx(1.62)


def test_constants_validation():
    with pytest.raises(ValueError):
        PropagationConstants(c=0)
    with pytest.raises(ValueError):
        PropagationConstants(c1=1.5)
    with pytest.raises(ValueError):
        PropagationConstants(f_floor=0)
    with pytest.raises(ValueError):
        PropagationConstants(thrown_force_law="linear")
    assert PropagationConstants().kill_threshold("ground") == math.inf


def test_row_of_three_chain():
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 11, 1, 1, 1), ("wood", 12, 1, 1, 1)])
    fmap = propagate(level, 1, 1.0, UNIT)
    assert fmap.forces == {1: 1.0, 2: 1.0, 3: 1.0}
    assert fmap.destroyed == {1, 2, 3}


def test_two_right_contacts_split():
    level = make_level([("wood", 10, 1, 1, 2), ("wood", 11, 1, 1, 1), ("wood", 11, 2, 1, 1)])
    fmap = propagate(level, 1, 1.0, UNIT)
    assert fmap.force(2) == 0.5 and fmap.force(3) >= 0.5
    assert sum(f for _, r, f in expand(network(level, UNIT), 1, 1.0) if r == "direct") == pytest.approx(1.0)


def test_isolated_block():
    level = make_level([("wood", 10, 1, 1, 1), ("pig", 20, 1, 1, 1)])
    assert propagate(level, 1, 1.0, UNIT).forces == {1: 1.0}


def test_force_below_floor_rejected():
    level = make_level([("wood", 10, 1, 1, 1)])
    with pytest.raises(ValueError):
        propagate(level, 1, 0.001, UNIT)


def test_oracle_chain_forces():
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 11, 1, 1, 1), ("wood", 12, 1, 1, 1)])
    fmap = propagate(level, 1, 1.0, PropagationConstants(c=0.8, c1=0.8, c_l=0.9))
    assert [fmap.force(i) for i in (1, 2, 3)] == pytest.approx([1.0, 0.8, 0.64])


def test_ground_never_receives_force():
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 10, 2, 1, 1)])
    assert 0 not in propagate(level, 2, 1.0, UNIT).forces


def test_propagation_matrix():
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 11, 1, 1, 1), ("wood", 12, 1, 1, 1),
                        ("pig", 20, 1, 1, 1)])
    order, m = propagation_matrix(level, UNIT)
    assert order == (0, 1, 2, 3, 4)
    assert np.all(np.diag(m)[1:] == 1.0)
    assert m[0].sum() == 0
    fmap = propagate(level, 1, 1.0, UNIT)
    assert all(m[1, order.index(b)] == f for b, f in fmap.forces.items())
    assert m[1, 4] == 0 and m[4, 1] == 0


def test_forcemap_invariants_over_corpus(small_corpus):
    c = UNIT
    for g in small_corpus[:12]:
        for b in g.level.blocks[1:]:
            fmap = propagate(g.level, b, 1.0, c)
            assert fmap.forces[b.id] == 1.0
            assert all(f >= c.f_floor for f in fmap.forces.values())
            assert fmap.destroyed <= fmap.forces.keys()


def test_attenuated_forces_stay_below_impact(small_corpus):
    weak = PropagationConstants(c=0.9, c1=0.9, c_l=0.9)
    for g in small_corpus[:12]:
        net = network(g.level, weak)
        structure_free = all(RULE_NAMES[int(r)] != "structure" for r in net.rule)
        for b in g.level.blocks[1:]:
            fmap = propagate(g.level, b, 1.0, weak)
            others = [f for i, f in fmap.forces.items() if i != b.id]
            assert all(f <= 1.0 for f in others)
            if structure_free:
                assert all(f < 1.0 for f in others)


def test_determinism(small_corpus):
    level = small_corpus[4].level
    a = propagate(level, 1, 1.0, UNIT)
    b = propagate(level, 1, 1.0, UNIT)
    assert a == b and list(a.forces.items()) == list(b.forces.items())


factor = st.floats(0.3, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 23), factor, factor, factor, st.sampled_from(["c", "c1", "c_l"]), st.floats(0.0, 0.5))
def test_monotone_in_constants(small_corpus, idx, c, c1, cl, which, bump):
    level = small_corpus[idx].level
    low = PropagationConstants(c=c, c1=c1, c_l=cl)
    raised = min(getattr(low, which) + bump, 1.0)
    high = PropagationConstants(**{"c": c, "c1": c1, "c_l": cl, which: raised})
    for b in level.blocks[1:4]:
        lo, hi = propagate(level, b, 1.0, low), propagate(level, b, 1.0, high)
        for i, f in lo.forces.items():
            assert hi.force(i) >= f - 1e-6
        assert lo.destroyed <= hi.destroyed
