import pytest
from hypothesis import given, settings, strategies as st

from restart_reasoner.level import (
    Block, LevelFormatError, LevelState, LevelValidationError, format_number, make_level,
    parse_level, serialize_level, validate,
)

from conftest import FIXTURES, fixture_level


def test_parse_minimal_level():
    text = """{"sling": [1, 3], "birds": ["red"], "bounds": [30, 15],
      "blocks": [{"id": 1, "material": "wood", "x": 12, "y": 0, "w": 1, "h": 1},
                 {"id": 2, "material": "pig", "x": 13, "y": 0, "w": 0.8, "h": 0.8}]}"""
    level = parse_level(text)
    assert len(level.blocks) == 2
    assert level.birds == ("red",)
    assert [p.id for p in level.pigs] == [2]


def test_duplicate_id_named():
    with pytest.raises(LevelValidationError) as err:
        parse_level((FIXTURES / "duplicate_id.json").read_text())
    assert "duplicate id: 1" in err.value.violations


def test_syntax_error_has_position():
    with pytest.raises(LevelFormatError) as err:
        parse_level((FIXTURES / "malformed.json").read_text())
    assert err.value.line == 4
    assert err.value.column == 3


@pytest.mark.parametrize("doc, fragment", [
    ("[]", "top level"),
    ('{"sling": [1, 3], "birds": ["red"], "bounds": [30, 15]}', "missing keys: blocks"),
    ('{"sling": [1, 3], "birds": ["red"], "bounds": [30, 15], "blocks": [], "tnt": 1}', "unknown keys"),
    ('{"sling": [1], "birds": ["red"], "bounds": [30, 15], "blocks": []}', "sling"),
    ('{"sling": [1, 3], "birds": ["green"], "bounds": [30, 15], "blocks": []}', "unknown color"),
    ('{"sling": [1, 3], "birds": ["red"], "bounds": [30, 15], '
     '"blocks": [{"id": 1, "material": "tnt", "x": 0, "y": 0, "w": 1, "h": 1}]}', "unknown material"),
    ('{"sling": [1, 3], "birds": ["red"], "bounds": [30, 15], '
     '"blocks": [{"id": 1.5, "material": "pig", "x": 0, "y": 0, "w": 1, "h": 1}]}', "integer"),
    ('{"sling": [1, 3], "birds": ["red"], "bounds": [30, 15], '
     '"blocks": [{"id": 1, "material": "pig", "x": "a", "y": 0, "w": 1, "h": 1}]}', "number"),
])
def test_format_errors(doc, fragment):
    with pytest.raises(LevelFormatError, match=fragment):
        parse_level(doc)


def test_validate_valid_fixture():
    assert validate(fixture_level("exposed")) == []


def test_validate_zero_pigs():
    assert validate(fixture_level("zero_pig", check=False)) == ["no pigs"]


def test_validate_interpenetration_by_three_k():
    assert validate(fixture_level("overlap", check=False)) == ["interpenetration: ids 4,7"]


def test_validate_collects_every_violation():
    level = make_level([("wood", 29.5, 1, 1, 1), ("wood", 5, 1, 0, 1)], birds=())
    got = validate(level)
    assert "no pigs" in got and "no birds" in got
    assert "out of bounds: id 1" in got
    assert "non-positive size: id 2" in got


def test_touching_blocks_are_not_interpenetrating():
    level = make_level([("wood", 10, 1, 1, 1), ("wood", 11, 1, 1, 1), ("pig", 10.2, 2, 0.6, 0.6)])
    assert validate(level) == []


def test_serialize_is_canonical():
    text = (FIXTURES / "exposed.json").read_text()
    assert serialize_level(parse_level(text)) == text
    first = text.splitlines()
    assert first[1].strip().startswith('"sling"')
    assert first[2].strip().startswith('"birds"')
    assert first[3].strip().startswith('"bounds"')


def test_format_number():
    assert format_number(1.0) == "1"
    assert format_number(0.1 + 0.2) == "0.3"
    assert format_number(1.23456789) == "1.234568"
    assert format_number(-0.0000001) == "0"


def test_round_trip_over_corpus(small_corpus):
    for g in small_corpus:
        text = serialize_level(g.level)
        again = parse_level(text)
        assert again == g.level
        assert serialize_level(again) == text


def test_restart_restores_initial_state():
    level = fixture_level("chain")
    state = LevelState.initial(level)
    from restart_reasoner.oracle import OracleConstants, apply_shot
    from restart_reasoner.trajectory import TrajectoryParams, scan_shots
    params = TrajectoryParams()
    after, _ = apply_shot(state, scan_shots(level, params)[0], OracleConstants(), params)
    assert after != state
    assert serialize_level(after.restart().as_level()) == serialize_level(level)
    assert after.restart() == state


def test_blocks_sorted_by_id():
    level = make_level([("pig", 12, 1, 1, 1), ("wood", 10, 1, 1, 1)])
    shuffled = type(level)(level.sling, level.birds, tuple(reversed(level.blocks)), level.bounds)
    assert [b.id for b in shuffled.blocks] == [0, 1, 2]


coord = st.floats(0, 25, allow_nan=False).map(lambda v: round(v, 6))
size = st.floats(0.1, 3, allow_nan=False).map(lambda v: round(v, 6))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["wood", "ice", "stone", "pig"]), coord, coord, size, size),
                min_size=1, max_size=8),
       st.lists(st.sampled_from(["red", "blue", "yellow", "black", "white"]), min_size=1, max_size=4))
def test_round_trip_property(parts, birds):
    level = make_level(parts, birds=birds)
    again = parse_level(serialize_level(level), check=False)
    assert again == level


def test_block_properties():
    b = Block(3, 1.0, 2.0, 2.0, 0.5, "ice")
    assert b.right == 3.0 and b.top == 2.5 and b.area == 1.0
    assert b.top_center() == (2.0, 2.5)
    assert b.left_center() == (1.0, 2.25)
