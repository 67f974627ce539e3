"""Parabolic shots from the sling and which blocks they can reach."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .level import Block

TOP_CENTER = "top-center"
LEFT_CENTER = "left-center"
TARGET_POINTS = (TOP_CENTER, LEFT_CENTER)
LOW, HIGH = "low", "high"


@dataclass(frozen=True)
class TrajectoryParams:
    """Launch and sampling settings.

    ``speed=None`` picks the speed whose flat-ground range is
    ``range_factor`` times the level width.
    """

    gravity: float = 9.81
    speed: float | None = None
    range_factor: float = 1.5
    step: float = 0.02
    eps_hit: float = 0.1

    def __post_init__(self):
        if not self.gravity > 0:
            raise ValueError("gravity must be positive")
        if self.speed is not None and not self.speed > 0:
            raise ValueError("speed must be positive")
        if not self.range_factor > 0:
            raise ValueError("range_factor must be positive")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.eps_hit > 0:
            raise ValueError("eps_hit must be positive")

    def speed_for(self, level) -> float:
        if self.speed is not None:
            return self.speed
        return math.sqrt(self.range_factor * level.bounds[0] * self.gravity)


@dataclass(frozen=True)
class Shot:
    angle: float
    speed: float
    target_block: int
    target_point: str
    arc: str
    gravity: float = 9.81

    def __post_init__(self):
        if not 0 < self.angle < math.pi / 2:
            raise ValueError(f"shot angle {self.angle} outside (0, pi/2)")
        if self.target_point not in TARGET_POINTS:
            raise ValueError(f"unknown target point {self.target_point!r}")

    def height_at(self, dx: float) -> float:
        """Height above the sling after ``dx`` horizontal units."""
        cos = math.cos(self.angle)
        return dx * math.tan(self.angle) - self.gravity * dx * dx / (2 * self.speed ** 2 * cos * cos)


def launch_angles(target, speed: float, gravity: float, origin) -> list[float]:
    """Angles (radians, low arc first) whose parabola passes through ``target``."""
    dx = target[0] - origin[0]
    dy = target[1] - origin[1]
    if dx <= 0:
        raise ValueError("target must lie to the right of the origin")
    if not (speed > 0 and gravity > 0):
        raise ValueError("speed and gravity must be positive")
    # a T^2 - dx T + (a + dy) = 0 with T = tan(angle)
    a = gravity * dx * dx / (2 * speed * speed)
    disc = dx * dx - 4 * a * (a + dy)
    tol = 1e-12 * dx * dx
    if disc < -tol:
        return []
    if disc <= tol:
        return [math.atan(dx / (2 * a))]
    q = (dx + math.sqrt(disc)) / 2
    t_high = q / a
    t_low = (a + dy) / q
    return [math.atan(t_low), math.atan(t_high)]


def _arrays(blocks: tuple[Block, ...]):
    return (
        np.array([b.x for b in blocks], dtype=np.float64),
        np.array([b.y for b in blocks], dtype=np.float64),
        np.array([b.right for b in blocks], dtype=np.float64),
        np.array([b.top for b in blocks], dtype=np.float64),
    )


def _trace(shot: Shot, blocks, arrays, sling, x_max, step, backend=None):
    impl = kernels.backend(backend)
    cos = math.cos(shot.angle)
    curv = shot.gravity / (2 * shot.speed ** 2 * cos * cos)
    idx, px, py = impl.trace_first_hit(
        *arrays, sling[0], sling[1], math.tan(shot.angle), curv, step, x_max
    )
    if idx < 0 or blocks[idx].is_ground:
        return None
    return blocks[idx].id, (px, py)


def trace(shot: Shot, level, step: float = 0.02, backend: str | None = None):
    """First block the shot strikes and the sample point inside it.

    Returns None when the bird leaves the world or lands on the ground
    before touching anything else.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    blocks = tuple(level.blocks)
    return _trace(shot, blocks, _arrays(blocks), level.sling, level.bounds[0], step, backend)


def entry_point(shot: Shot, block: Block, sling, x_hit: float, step: float) -> tuple[float, float]:
    """Where the path first crosses into ``block``, between the last miss and ``x_hit``."""

    def inside(px):
        py = sling[1] + shot.height_at(px - sling[0])
        return block.x <= px <= block.right and block.y <= py <= block.top

    lo, hi = max(x_hit - step, sling[0]), x_hit
    if inside(lo):
        return lo, sling[1] + shot.height_at(lo - sling[0])
    for _ in range(60):
        mid = (lo + hi) / 2
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return hi, sling[1] + shot.height_at(hi - sling[0])


def target_point(block: Block, which: str) -> tuple[float, float]:
    return block.top_center() if which == TOP_CENTER else block.left_center()


@lru_cache(maxsize=8192)
def _reachable(blocks: tuple[Block, ...], sling, bounds, speed, gravity, step, eps_hit):
    arrays = _arrays(blocks)
    out: dict[int, tuple[Shot, ...]] = {}
    for block in blocks:
        if block.is_ground:
            continue
        shots = []
        for which in TARGET_POINTS:
            point = target_point(block, which)
            if point[0] <= sling[0]:
                continue
            angles = launch_angles(point, speed, gravity, sling)
            arcs = (LOW, HIGH) if len(angles) == 2 else (LOW,)
            for angle, arc in zip(angles, arcs):
                if not 0 < angle < math.pi / 2:
                    continue
                shot = Shot(angle, speed, block.id, which, arc, gravity)
                hit = _trace(shot, blocks, arrays, sling, bounds[0], step)
                if hit is None or hit[0] != block.id:
                    continue
                entry = entry_point(shot, block, sling, hit[1][0], step)
                if math.dist(entry, point) <= eps_hit:
                    shots.append(shot)
        out[block.id] = tuple(shots)
    return out


def reachable_blocks(level, speed: float, gravity: float, step: float = 0.02,
                     eps_hit: float = 0.1) -> dict[int, tuple[Shot, ...]]:
    """Shots at each block's top-center and left-center that really hit it first.

    Keys are all non-ground block ids in id order; a block is reachable
    when its tuple is non-empty.
    """
    return dict(_reachable(tuple(level.blocks), level.sling, level.bounds,
                           float(speed), float(gravity), float(step), float(eps_hit)))


def reachable_for(level, params: TrajectoryParams) -> dict[int, tuple[Shot, ...]]:
    return reachable_blocks(level, params.speed_for(level), params.gravity, params.step, params.eps_hit)


def scan_shots(level, params: TrajectoryParams) -> list[Shot]:
    """Every admissible shot in scan order: block id, target point, arc."""
    return [shot for shots in reachable_for(level, params).values() for shot in shots]
