"""Levels, level states, and the JSON level file format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Sequence

MATERIALS = ("wood", "ice", "stone", "pig", "ground")
BIRD_COLORS = ("red", "blue", "yellow", "black", "white")

# Default contact tolerance in world units.
DEFAULT_K = 0.05
_BOUNDS_EPS = 1e-9


class LevelFormatError(ValueError):
    """Raised when a level file cannot be read.

    ``line`` and ``column`` are 1-based and only set for syntax errors.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class LevelValidationError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Block:
    id: int
    x: float
    y: float
    width: float
    height: float
    material: str

    @property
    def right(self) -> float:
        return self.x + self.width

    @property
    def top(self) -> float:
        return self.y + self.height

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def is_ground(self) -> bool:
        return self.material == "ground"

    @property
    def is_pig(self) -> bool:
        return self.material == "pig"

    def top_center(self) -> tuple[float, float]:
        return (self.x + self.width / 2, self.top)

    def left_center(self) -> tuple[float, float]:
        return (self.x, self.y + self.height / 2)

    def moved_to(self, x: float, y: float) -> "Block":
        return replace(self, x=x, y=y)


class Layout(NamedTuple):
    """Just the geometry of a level or state; hashable, used as a cache key."""

    blocks: tuple["Block", ...]
    sling: tuple[float, float]
    bounds: tuple[float, float]

    @property
    def pigs(self) -> tuple["Block", ...]:
        return tuple(b for b in self.blocks if b.is_pig)


@dataclass(frozen=True)
class Level:
    sling: tuple[float, float]
    birds: tuple[str, ...]
    blocks: tuple[Block, ...]
    bounds: tuple[float, float]

    def __post_init__(self):
        # Canonical block order is by id; everything downstream relies on it.
        ordered = tuple(sorted(self.blocks, key=lambda b: b.id))
        if ordered != self.blocks:
            object.__setattr__(self, "blocks", ordered)
        object.__setattr__(self, "birds", tuple(self.birds))
        object.__setattr__(self, "sling", (float(self.sling[0]), float(self.sling[1])))
        object.__setattr__(self, "bounds", (float(self.bounds[0]), float(self.bounds[1])))

    @property
    def pigs(self) -> tuple[Block, ...]:
        return tuple(b for b in self.blocks if b.is_pig)

    @property
    def width(self) -> float:
        return self.bounds[0]

    @property
    def height(self) -> float:
        return self.bounds[1]

    def block(self, block_id: int) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)

    @property
    def layout(self) -> Layout:
        return Layout(self.blocks, self.sling, self.bounds)


@dataclass(frozen=True)
class LevelState:
    """A level mid-play: which birds are left and which blocks survive where."""

    level: Level
    remaining_birds: tuple[str, ...]
    alive_blocks: tuple[Block, ...]
    accumulated_score: float = 0.0
    elapsed_time: float = 0.0
    shots_taken: int = field(default=0)

    @classmethod
    def initial(cls, level: Level) -> "LevelState":
        return cls(level=level, remaining_birds=level.birds, alive_blocks=level.blocks)

    def restart(self) -> "LevelState":
        return LevelState.initial(self.level)

    # Geometry and propagation accept anything with these three attributes.
    @property
    def blocks(self) -> tuple[Block, ...]:
        return self.alive_blocks

    @property
    def sling(self) -> tuple[float, float]:
        return self.level.sling

    @property
    def bounds(self) -> tuple[float, float]:
        return self.level.bounds

    @property
    def pigs(self) -> tuple[Block, ...]:
        return tuple(b for b in self.alive_blocks if b.is_pig)

    @property
    def birds_left(self) -> int:
        return len(self.remaining_birds)

    def block(self, block_id: int) -> Block:
        for b in self.alive_blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)

    @property
    def layout(self) -> Layout:
        return Layout(self.alive_blocks, self.level.sling, self.level.bounds)

    def as_level(self) -> Level:
        return Level(
            sling=self.level.sling,
            birds=self.remaining_birds,
            blocks=self.alive_blocks,
            bounds=self.level.bounds,
        )


def _interval_overlap(a_lo: float, a_hi: float, b_lo: float, b_hi: float) -> float:
    return min(a_hi, b_hi) - max(a_lo, b_lo)


def validate(level: Level, k: float = DEFAULT_K) -> list[str]:
    """Return every invariant violation in ``level``; empty when valid."""
    violations: list[str] = []
    if not level.pigs:
        violations.append("no pigs")
    if not level.birds:
        violations.append("no birds")
    for color in level.birds:
        if color not in BIRD_COLORS:
            violations.append(f"unknown bird: {color}")

    seen: set[int] = set()
    for b in level.blocks:
        if b.id in seen:
            violations.append(f"duplicate id: {b.id}")
        seen.add(b.id)
        if b.material not in MATERIALS:
            violations.append(f"unknown material: id {b.id}")
        if not (b.width > 0 and b.height > 0):
            violations.append(f"non-positive size: id {b.id}")
        w, h = level.bounds
        if (
            b.x < -_BOUNDS_EPS
            or b.y < -_BOUNDS_EPS
            or b.right > w + _BOUNDS_EPS
            or b.top > h + _BOUNDS_EPS
        ):
            violations.append(f"out of bounds: id {b.id}")

    solid = [b for b in level.blocks if not b.is_ground and b.width > 0 and b.height > 0]
    for i, a in enumerate(solid):
        for b in solid[i + 1:]:
            ox = _interval_overlap(a.x, a.right, b.x, b.right)
            oy = _interval_overlap(a.y, a.top, b.y, b.top)
            if min(ox, oy) > k:
                lo, hi = sorted((a.id, b.id))
                violations.append(f"interpenetration: ids {lo},{hi}")
    return violations


# -- file format -------------------------------------------------------------

def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise LevelFormatError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise LevelFormatError(f"{where}: non-finite number")
    return float(value)


def _pair(value, where: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise LevelFormatError(f"{where}: expected [x, y]")
    return (_number(value[0], where), _number(value[1], where))


_BLOCK_KEYS = ("id", "material", "x", "y", "w", "h")


def level_from_dict(doc) -> Level:
    if not isinstance(doc, dict):
        raise LevelFormatError("top level must be an object")
    expected = {"sling", "birds", "bounds", "blocks"}
    missing = expected - doc.keys()
    if missing:
        raise LevelFormatError(f"missing keys: {', '.join(sorted(missing))}")
    extra = doc.keys() - expected
    if extra:
        raise LevelFormatError(f"unknown keys: {', '.join(sorted(extra))}")

    birds = doc["birds"]
    if not isinstance(birds, list) or not all(isinstance(c, str) for c in birds):
        raise LevelFormatError("birds: expected a list of colors")
    for c in birds:
        if c not in BIRD_COLORS:
            raise LevelFormatError(f"birds: unknown color {c!r}")

    raw_blocks = doc["blocks"]
    if not isinstance(raw_blocks, list):
        raise LevelFormatError("blocks: expected a list")
    blocks = []
    for n, raw in enumerate(raw_blocks):
        where = f"blocks[{n}]"
        if not isinstance(raw, dict) or set(raw) != set(_BLOCK_KEYS):
            raise LevelFormatError(f"{where}: expected keys {', '.join(_BLOCK_KEYS)}")
        bid = raw["id"]
        if isinstance(bid, bool) or not isinstance(bid, int):
            raise LevelFormatError(f"{where}: id must be an integer")
        if raw["material"] not in MATERIALS:
            raise LevelFormatError(f"{where}: unknown material {raw['material']!r}")
        blocks.append(
            Block(
                id=bid,
                x=_number(raw["x"], where),
                y=_number(raw["y"], where),
                width=_number(raw["w"], where),
                height=_number(raw["h"], where),
                material=raw["material"],
            )
        )
    return Level(
        sling=_pair(doc["sling"], "sling"),
        birds=tuple(birds),
        blocks=tuple(blocks),
        bounds=_pair(doc["bounds"], "bounds"),
    )


def parse_level(text: str, *, check: bool = True, k: float = DEFAULT_K) -> Level:
    """Parse a level file.

    With ``check`` the result is validated and :class:`LevelValidationError`
    lists every violation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LevelFormatError(f"syntax error: {exc.msg}", exc.lineno, exc.colno) from None
    level = level_from_dict(doc)
    if check:
        violations = validate(level, k)
        if violations:
            raise LevelValidationError(violations)
    return level


def load_level(path, **kwargs) -> Level:
    with open(path, encoding="utf-8") as fh:
        return parse_level(fh.read(), **kwargs)


def format_number(value: float) -> str:
    """At most 6 decimals, no trailing zeros, integers without a point."""
    value = round(float(value), 6)
    if value == 0:
        return "0"
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return text


def _block_line(b: Block) -> str:
    return (
        f'{{"id": {b.id}, "material": "{b.material}", "x": {format_number(b.x)}, '
        f'"y": {format_number(b.y)}, "w": {format_number(b.width)}, "h": {format_number(b.height)}}}'
    )


def serialize_level(level: Level) -> str:
    birds = ", ".join(f'"{c}"' for c in level.birds)
    lines = [
        "{",
        f'  "sling": [{format_number(level.sling[0])}, {format_number(level.sling[1])}],',
        f'  "birds": [{birds}],',
        f'  "bounds": [{format_number(level.bounds[0])}, {format_number(level.bounds[1])}],',
    ]
    block_lines = [_block_line(b) for b in sorted(level.blocks, key=lambda b: b.id)]
    if block_lines:
        lines.append('  "blocks": [')
        lines.extend("    " + line + ("," if i < len(block_lines) - 1 else "")
                     for i, line in enumerate(block_lines))
        lines.append("  ]")
    else:
        lines.append('  "blocks": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_state(state: LevelState) -> str:
    return serialize_level(state.as_level())


def make_level(
    blocks: Iterable[tuple],
    birds: Sequence[str] = ("red",),
    sling: tuple[float, float] = (1.0, 3.0),
    bounds: tuple[float, float] = (30.0, 15.0),
    ground: bool = True,
) -> Level:
    """Build a level from ``(material, x, y, w, h)`` tuples.

    Ids are assigned in order, starting at 1; the ground row is id 0 and
    spans ``y`` in ``[0, 1]``.
    """
    out = []
    if ground:
        out.append(Block(0, 0.0, 0.0, float(bounds[0]), 1.0, "ground"))
    for n, (material, x, y, w, h) in enumerate(blocks, start=1):
        out.append(Block(n, float(x), float(y), float(w), float(h), material))
    return Level(sling=sling, birds=tuple(birds), blocks=tuple(out), bounds=bounds)
