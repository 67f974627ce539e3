"""Procedural level corpora.

Every level has a ground row, one main structure in a named style, and
optional pig-free decoration stacks. Styles with a known one-shot answer
(exposed, sealed-vault, split) are re-drawn until the oracle agrees, so
the corpus has a known mix of solvable and unsolvable levels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .level import Block, Level, validate
from .oracle import OracleConstants, oracle_solvable
from .level import LevelState
from .trajectory import TrajectoryParams

STYLES = ("exposed", "tower", "shelf", "sealed-vault", "lattice", "split")
# One-shot solvability each style must have; None means whatever the oracle says.
EXPECTED = {"exposed": True, "sealed-vault": False, "split": False,
            "tower": None, "shelf": None, "lattice": None}

WORLD = (30.0, 15.0)
SLING = (1.0, 3.0)
GROUND_TOP = 1.0
_MAX_REDRAWS = 50


@dataclass(frozen=True)
class CorpusParams:
    count: int = 20
    blocks: tuple[int, int] = (3, 14)
    pigs: tuple[int, int] = (1, 3)
    birds: tuple[int, int] = (1, 3)
    styles: tuple[str, ...] = STYLES

    def __post_init__(self):
        for name in ("blocks", "pigs", "birds"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise ValueError(f"{name} range is empty")
        if self.pigs[0] < 1 or self.birds[0] < 1:
            raise ValueError("levels need at least one pig and one bird")
        if not self.styles:
            raise ValueError("no structure styles")
        unknown = set(self.styles) - set(STYLES)
        if unknown:
            raise ValueError(f"unknown styles: {', '.join(sorted(unknown))}")


@dataclass(frozen=True)
class GeneratedLevel:
    level: Level
    style: str
    solvable: bool


def _r(v: float) -> float:
    return round(v, 3)


class _Builder:
    def __init__(self):
        self.parts: list[tuple[str, float, float, float, float]] = []

    def add(self, material, x, y, w, h):
        self.parts.append((material, _r(x), _r(y), _r(w), _r(h)))
        return _r(y + h)

    def level(self, birds) -> Level:
        blocks = [Block(0, 0.0, 0.0, WORLD[0], GROUND_TOP, "ground")]
        blocks += [Block(i, x, y, w, h, m) for i, (m, x, y, w, h) in enumerate(self.parts, start=1)]
        return Level(sling=SLING, birds=tuple(birds), blocks=tuple(blocks), bounds=WORLD)


def _pig_row(b: _Builder, rng, x, n) -> float:
    size = _r(rng.uniform(0.6, 0.9))
    for i in range(n):
        b.add("pig", x + i * size, GROUND_TOP, size, size)
    return x + n * size


def _exposed(b, rng, x, pigs):
    return _pig_row(b, rng, x, pigs)


def _tower(b, rng, x, pigs):
    top = GROUND_TOP
    w = _r(rng.uniform(0.8, 1.4))
    for _ in range(rng.randint(1, 3)):
        top = b.add(rng.choice(("wood", "ice", "stone")), x, top, w, _r(rng.uniform(0.8, 1.5)))
    size = 0.7
    for i in range(pigs):
        if i == 0:
            b.add("pig", x + (w - size) / 2, top, size, size)
        else:
            b.add("pig", x + w + 0.3 + (i - 1) * size, GROUND_TOP, size, size)
    return x + w + 0.3 + max(pigs - 1, 0) * size


def _shelf(b, rng, x, pigs):
    col_w, col_h = 0.5, _r(rng.uniform(1.2, 2.0))
    size = 0.7
    inner = _r(0.3 + pigs * size + 0.3)
    material = rng.choice(("wood", "ice", "stone"))
    b.add(material, x, GROUND_TOP, col_w, col_h)
    b.add(material, x + col_w + inner, GROUND_TOP, col_w, col_h)
    b.add(rng.choice(("wood", "stone")), x, GROUND_TOP + col_h, 2 * col_w + inner, 0.4)
    for i in range(pigs):
        b.add("pig", x + col_w + 0.3 + i * size, GROUND_TOP, size, size)
    return x + 2 * col_w + inner


def _vault(b, rng, x, pigs):
    wall_w, wall_h = 0.7, _r(rng.uniform(1.6, 2.0))
    size = 0.8
    # pig sits farther than a wall height from the left wall, so no fall arc reaches it
    pig_x = x + wall_w + wall_h + 0.2
    right_x = pig_x + size + 0.4
    b.add("stone", x, GROUND_TOP, wall_w, wall_h)
    b.add("stone", right_x, GROUND_TOP, wall_w, wall_h)
    b.add("stone", x, GROUND_TOP + wall_h, right_x + wall_w - x, 0.5)
    b.add("pig", pig_x, GROUND_TOP, size, size)
    end = right_x + wall_w
    for _ in range(pigs - 1):
        end += 0.5
        b.add("pig", end, GROUND_TOP, 0.7, 0.7)
        end += 0.7
    return end


def _lattice(b, rng, x, pigs):
    # A two-row block lattice inside an enclosure: force reaches the pig only
    # by crossing every column, losing a share at each one.
    cols = rng.randint(4, 6)
    wall_w, wall_h = 0.7, 2.2
    material = rng.choice(("wood", "ice", "stone"))
    b.add("stone", x, GROUND_TOP, wall_w, wall_h)
    lx = x + wall_w
    for c in range(cols):
        for row in range(2):
            b.add(material, lx + c, GROUND_TOP + row, 1.0, 1.0)
    pig_x = lx + cols
    b.add("pig", pig_x, GROUND_TOP, 0.8, 0.8)
    post_x = pig_x + 0.8 + 0.2
    b.add("stone", post_x, GROUND_TOP, 0.6, wall_h)
    b.add("stone", x, GROUND_TOP + wall_h, post_x + 0.6 - x, 0.4)
    end = post_x + 0.6
    for _ in range(pigs - 1):
        end += 0.5
        b.add("pig", end, GROUND_TOP, 0.7, 0.7)
        end += 0.7
    return end


def _split(b, rng, x, pigs):
    size = 0.7
    b.add("pig", x, GROUND_TOP, size, size)
    far = x + size + rng.uniform(6.0, 9.0)
    for i in range(max(pigs - 1, 1)):
        b.add("pig", far + i * 1.5, GROUND_TOP, size, size)
    return far + max(pigs - 1, 1) * 1.5


_STYLE_BUILDERS = {
    "exposed": _exposed, "tower": _tower, "shelf": _shelf,
    "sealed-vault": _vault, "lattice": _lattice, "split": _split,
}


def _decor(b: _Builder, rng, x, blocks_needed) -> float:
    """A pig-free stack of up to ``blocks_needed`` blocks starting at ``x``."""
    w = _r(rng.uniform(0.6, 1.2))
    top = GROUND_TOP
    for _ in range(min(blocks_needed, 3)):
        top = b.add(rng.choice(("wood", "ice", "stone")), x, top, w, _r(rng.uniform(0.6, 1.2)))
    return x + w


def _draw(rng: random.Random, style: str, params: CorpusParams) -> Level:
    b = _Builder()
    pigs = rng.randint(*params.pigs)
    if style == "split":
        pigs = max(pigs, 2)
    target_blocks = rng.randint(*params.blocks)
    main_x = _r(rng.uniform(10.0, 14.0))
    end = _STYLE_BUILDERS[style](b, rng, main_x, pigs)
    x = end + 1.0
    while len(b.parts) < target_blocks and x < WORLD[0] - 2.5:
        before = len(b.parts)
        x = _decor(b, rng, x, target_blocks - before) + rng.uniform(0.8, 1.5)
    birds = [rng.choice(("red", "red", "blue", "yellow", "black")) for _ in range(rng.randint(*params.birds))]
    return b.level(birds)


def generate_labeled(params: CorpusParams, seed: int, oracle: OracleConstants | None = None,
                     trajectory: TrajectoryParams | None = None) -> list[GeneratedLevel]:
    oracle = oracle or OracleConstants()
    trajectory = trajectory or TrajectoryParams()
    out = []
    for index in range(params.count):
        rng = random.Random(f"corpus:{seed}:{index}")
        style = params.styles[index % len(params.styles)]
        for _ in range(_MAX_REDRAWS):
            level = _draw(rng, style, params)
            if validate(level):
                continue
            solvable = oracle_solvable(LevelState.initial(level), oracle, trajectory)
            if EXPECTED[style] is None or EXPECTED[style] == solvable:
                break
        else:
            raise RuntimeError(f"could not draw a {style} level for seed {seed}, index {index}")
        out.append(GeneratedLevel(level, style, solvable))
    return out


def generate_corpus(params: CorpusParams, seed: int, **kwargs) -> list[Level]:
    """Deterministic levels for ``seed``; styles cycle in the order given."""
    return [g.level for g in generate_labeled(params, seed, **kwargs)]
