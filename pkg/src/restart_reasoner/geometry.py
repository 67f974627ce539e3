"""Rectangle predicates, the contact graph, fall arcs and support structures.

The scalar helpers (``placement_code``, ``arc_hits_rect``) work on raw
coordinates; the pure-Python kernels call them directly and the compiled
kernels mirror them line for line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .level import DEFAULT_K, Block

LEFT_OF = "left-of"
RIGHT_OF = "right-of"
ABOVE = "above"
BELOW = "below"

RIGHTWARD = "rightward"
LEFTWARD = "leftward"

# Integer codes shared with the kernels.
NO_CONTACT, CODE_LEFT, CODE_RIGHT, CODE_ABOVE, CODE_BELOW = 0, 1, 2, 3, 4
CODE_NAMES = {CODE_LEFT: LEFT_OF, CODE_RIGHT: RIGHT_OF, CODE_ABOVE: ABOVE, CODE_BELOW: BELOW}
CONVERSE = {LEFT_OF: RIGHT_OF, RIGHT_OF: LEFT_OF, ABOVE: BELOW, BELOW: ABOVE}

# Overlaps thinner than this count as touching, not overlapping.
AXIS_TOL = 1e-9


def overlaps_1d(a_lo: float, a_hi: float, b_lo: float, b_hi: float) -> bool:
    """True iff the closed intervals share at least one point."""
    return a_lo <= b_hi and b_lo <= a_hi


def placement_code(ax0, ay0, ax1, ay1, bx0, by0, bx1, by1, k):
    """Placement of rectangle b relative to rectangle a, as an integer code.

    Rectangles are in contact when dilating both by k/2 makes them
    intersect. Contacts that touch only diagonally at a corner carry no
    placement and return NO_CONTACT.
    """
    ox = min(ax1, bx1) - max(ax0, bx0)
    oy = min(ay1, by1) - max(ay0, by0)
    if ox < -k or oy < -k:
        return NO_CONTACT
    if ox > AXIS_TOL and oy > AXIS_TOL:
        # interpenetrating: separate along the axis of least overlap
        horizontal = ox < oy
    elif oy > AXIS_TOL:
        horizontal = True
    elif ox > AXIS_TOL:
        horizontal = False
    else:
        return NO_CONTACT
    if horizontal:
        return CODE_RIGHT if bx0 + bx1 > ax0 + ax1 else CODE_LEFT
    return CODE_ABOVE if by0 + by1 > ay0 + ay1 else CODE_BELOW


def placement(a: Block, b: Block, k: float = DEFAULT_K) -> str | None:
    code = placement_code(a.x, a.y, a.right, a.top, b.x, b.y, b.right, b.top, k)
    return CODE_NAMES.get(code)


def arc_hits_rect(px, py, r, rightward, x0, y0, x1, y1):
    """Whether a quarter disc and a rectangle share interior area."""
    if rightward:
        cx0, cx1 = max(x0, px), x1
    else:
        cx0, cx1 = x0, min(x1, px)
    cy0, cy1 = max(y0, py), y1
    if cx1 - cx0 <= AXIS_TOL or cy1 - cy0 <= AXIS_TOL:
        return False
    nx = min(max(px, cx0), cx1)
    ny = min(max(py, cy0), cy1)
    return (nx - px) ** 2 + (ny - py) ** 2 < r * r


@dataclass(frozen=True)
class Region:
    """Quarter disc above ``pivot``, opening toward ``direction``."""

    pivot: tuple[float, float]
    radius: float
    direction: str = RIGHTWARD

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.direction not in (RIGHTWARD, LEFTWARD):
            raise ValueError(f"unknown direction {self.direction!r}")

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2 / 4

    def contains(self, x: float, y: float) -> bool:
        px, py = self.pivot
        if y < py:
            return False
        if self.direction == RIGHTWARD and x < px:
            return False
        if self.direction == LEFTWARD and x > px:
            return False
        return (x - px) ** 2 + (y - py) ** 2 <= self.radius ** 2

    def intersects(self, block: Block) -> bool:
        return arc_hits_rect(
            self.pivot[0], self.pivot[1], self.radius, self.direction == RIGHTWARD,
            block.x, block.y, block.right, block.top,
        )


def fall_arc(block: Block, direction: str = RIGHTWARD) -> Region:
    """Region swept by ``block`` toppling about its bottom corner on the fall side."""
    if block.is_ground:
        raise ValueError(f"ground block {block.id} cannot fall")
    pivot_x = block.right if direction == RIGHTWARD else block.x
    return Region(pivot=(pivot_x, block.y), radius=block.height, direction=direction)


def intersects(region: Region, block: Block) -> bool:
    return region.intersects(block)


@dataclass(frozen=True)
class ContactGraph:
    """``adjacency[a][b]`` is the placement of block b relative to block a."""

    adjacency: dict[int, dict[int, str]] = field(default_factory=dict)

    def neighbors(self, block_id: int, label: str | None = None) -> list[int]:
        edges = self.adjacency.get(block_id, {})
        return sorted(b for b, lab in edges.items() if label is None or lab == label)

    def label(self, a: int, b: int) -> str | None:
        return self.adjacency.get(a, {}).get(b)

    def edge_count(self) -> int:
        return sum(len(v) for v in self.adjacency.values()) // 2


def contact_graph(level, k: float = DEFAULT_K) -> ContactGraph:
    blocks = level.blocks
    adjacency: dict[int, dict[int, str]] = {b.id: {} for b in blocks}
    for i, a in enumerate(blocks):
        for b in blocks[i + 1:]:
            lab = placement(a, b, k)
            if lab is not None:
                adjacency[a.id][b.id] = lab
                adjacency[b.id][a.id] = CONVERSE[lab]
    return ContactGraph(adjacency)


def supp(block: Block, level, k: float = DEFAULT_K, graph: ContactGraph | None = None) -> frozenset[Block]:
    """Everything holding ``block`` up: the closure of below-contacts, minus ground."""
    if graph is None:
        graph = contact_graph(level, k)
    by_id = {b.id: b for b in level.blocks}
    seen: set[int] = set()
    stack = [block.id]
    while stack:
        current = stack.pop()
        for other in graph.neighbors(current, BELOW):
            if other in seen or other == block.id or by_id[other].is_ground:
                continue
            seen.add(other)
            stack.append(other)
    return frozenset(by_id[i] for i in seen)
