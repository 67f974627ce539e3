"""Force propagation through a block layout.

Four rules move a rightward impact force from block to block: direct
contact, toppling into a neighbour (falling), collapse of the support
structure, and small blocks thrown across a gap. Each rule scales the
source force by a factor that depends only on the layout, so a layout
compiles to a weighted edge list (:class:`Network`) and propagation is a
best-first max-product search over it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import kernels
from .geometry import (
    ABOVE,
    AXIS_TOL,
    BELOW,
    RIGHT_OF,
    RIGHTWARD,
    contact_graph,
    fall_arc,
    overlaps_1d,
    supp,
)
from .level import DEFAULT_K, Block

DEFAULT_KILL = {"ice": 0.2, "wood": 0.3, "stone": 0.7, "pig": 0.1}

RULE_NAMES = {1: "direct", 2: "falling", 3: "structure", 4: "thrown"}
THROWN_LAWS = ("exponential", "literal")


@dataclass(frozen=True)
class PropagationConstants:
    """Loss factors, reach thresholds and kill thresholds for the rules.

    ``kill`` may be given as a mapping; it is stored as a sorted tuple of
    ``(material, force)`` pairs so instances stay hashable.
    """

    c: float = 1.0
    c1: float = 1.0
    c_l: float = 1.0
    k: float = DEFAULT_K
    s1: float = 1.0
    d_max: float = 3.0
    h_max: float = 2.0
    f_floor: float = 0.01
    kill: tuple[tuple[str, float], ...] | Mapping[str, float] = field(
        default_factory=lambda: tuple(sorted(DEFAULT_KILL.items()))
    )
    thrown_force_law: str = "exponential"

    def __post_init__(self):
        if isinstance(self.kill, Mapping):
            object.__setattr__(self, "kill", tuple(sorted(self.kill.items())))
        else:
            object.__setattr__(self, "kill", tuple(sorted(tuple(p) for p in self.kill)))
        for name in ("c", "c1", "c_l"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        if not self.f_floor > 0:
            raise ValueError("f_floor must be positive")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if not self.kill_threshold("pig") > 0:
            raise ValueError("kill threshold for pigs must be positive")
        if self.thrown_force_law not in THROWN_LAWS:
            raise ValueError(f"thrown_force_law must be one of {THROWN_LAWS}")

    @property
    def kill_map(self) -> dict[str, float]:
        return dict(self.kill)

    def kill_threshold(self, material: str) -> float:
        """Minimum force that destroys ``material``; ground never breaks."""
        return dict(self.kill).get(material, math.inf)


@dataclass(frozen=True)
class ForceMap:
    impact_block: int
    forces: Mapping[int, float]
    destroyed: frozenset[int]

    def force(self, block_id: int) -> float:
        return self.forces.get(block_id, 0.0)


# -- single rules --------------------------------------------------------------

def direct_targets(o1: Block, level, k: float = DEFAULT_K) -> frozenset[Block]:
    """Blocks pushed by ``o1`` when it takes a rightward force.

    Every contact to the right of, above or below ``o1`` qualifies; contacts
    to its left and the ground do not.
    """
    if o1.is_ground:
        return frozenset()
    graph = contact_graph(level, k)
    by_id = {b.id: b for b in level.blocks}
    out = set()
    for other, label in graph.adjacency.get(o1.id, {}).items():
        o2 = by_id[other]
        if o2.is_ground or label not in (RIGHT_OF, ABOVE, BELOW):
            continue
        if overlaps_1d(o1.y - k, o1.top + k, o2.y, o2.top):
            out.add(o2)
    return frozenset(out)


def direct_force(f1: float, n: int, constants: PropagationConstants) -> float:
    if n < 1:
        raise ValueError("direct force needs at least one target")
    return (f1 / n) * constants.c


def _gap_right(o1: Block, o2: Block) -> float:
    return o2.x - o1.right


def falling_applies(o1: Block, o2: Block, level, k: float = DEFAULT_K) -> bool:
    if o1.id == o2.id or o1.is_ground or o2.is_ground:
        return False
    if o2 in direct_targets(o1, level, k):
        return False
    gap = _gap_right(o1, o2)
    if gap < -k or max(gap, 0.0) >= o1.height:
        return False
    return fall_arc(o1, RIGHTWARD).intersects(o2)


def falling_force(f1: float, d: float, h: float, constants: PropagationConstants) -> float:
    if h <= 0:
        raise ValueError("falling block has no height")
    return max(f1 * constants.c1 * math.sin(math.pi * d / h), 0.0)


def structure_falling_applies(o1: Block, o2: Block, level, k: float = DEFAULT_K) -> bool:
    """Whether ``o2`` lies under a rightward fall arc of anything holding ``o1`` up."""
    if o1.id == o2.id or o1.is_ground or o2.is_ground:
        return False
    return any(fall_arc(s, RIGHTWARD).intersects(o2) for s in supp(o1, level, k))


def thrown_applies(o1: Block, o2: Block, constants: PropagationConstants) -> bool:
    if o1.id == o2.id or o1.is_ground or o2.is_ground:
        return False
    # the tolerance keeps the gate stable when area is computed from edge coordinates
    if not o1.area < constants.s1 - AXIS_TOL:
        return False
    gap = _gap_right(o1, o2)
    if gap < -constants.k:
        return False
    return max(gap, 0.0) < constants.d_max and o2.y < o1.y + constants.h_max


def thrown_force(f1: float, travel: float, constants: PropagationConstants) -> float:
    if constants.thrown_force_law == "literal":
        return f1 * constants.c * constants.c_l * travel
    return f1 * constants.c * constants.c_l ** travel


# -- compiled network ------------------------------------------------------------

@dataclass(frozen=True)
class Network:
    """Rule edges of one layout in CSR form, indexed by block position."""

    ids: tuple[int, ...]
    indptr: np.ndarray
    dst: np.ndarray
    rule: np.ndarray
    mult: np.ndarray

    def index(self, block_id: int) -> int:
        return self.ids.index(block_id)

    def edges(self, block_id: int) -> list[tuple[int, str, float]]:
        i = self.index(block_id)
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return [
            (self.ids[int(self.dst[e])], RULE_NAMES[int(self.rule[e])], float(self.mult[e]))
            for e in range(lo, hi)
        ]


def layout_arrays(blocks: tuple[Block, ...]):
    x = np.array([b.x for b in blocks], dtype=np.float64)
    y = np.array([b.y for b in blocks], dtype=np.float64)
    x1 = np.array([b.right for b in blocks], dtype=np.float64)
    y1 = np.array([b.top for b in blocks], dtype=np.float64)
    ground = np.array([b.is_ground for b in blocks], dtype=np.uint8)
    return x, y, x1, y1, ground


def _network_from_edges(ids, src, dst, rule, mult) -> Network:
    n = len(ids)
    src = np.asarray(src, dtype=np.int64)
    counts = np.bincount(src, minlength=n) if len(src) else np.zeros(n, dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Network(
        ids=tuple(ids),
        indptr=indptr,
        dst=np.asarray(dst, dtype=np.int64),
        rule=np.asarray(rule, dtype=np.int64),
        mult=np.asarray(mult, dtype=np.float64),
    )


def build_network(blocks: tuple[Block, ...], constants: PropagationConstants, backend: str | None = None) -> Network:
    impl = kernels.backend(backend)
    x, y, x1, y1, ground = layout_arrays(blocks)
    src, dst, rule, mult = impl.build_edges(
        x, y, x1, y1, ground,
        constants.k, constants.c, constants.c1, constants.c_l,
        constants.s1, constants.d_max, constants.h_max,
        constants.thrown_force_law == "literal",
    )
    return _network_from_edges([b.id for b in blocks], src, dst, rule, mult)


@lru_cache(maxsize=8192)
def _cached_network(blocks: tuple[Block, ...], constants: PropagationConstants) -> Network:
    return build_network(blocks, constants)


def network(level, constants: PropagationConstants) -> Network:
    return _cached_network(tuple(level.blocks), constants)


def reference_network(level, constants: PropagationConstants) -> Network:
    """The same edges as :func:`build_network`, assembled from the rule predicates.

    Slow; exists so the kernels can be checked against the readable rules.
    """
    blocks = tuple(level.blocks)
    k = constants.k
    graph = contact_graph(level, k)
    supports = {b.id: supp(b, level, k, graph) for b in blocks}
    index = {b.id: i for i, b in enumerate(blocks)}
    src, dst, rule, mult = [], [], [], []
    for o1 in blocks:
        if o1.is_ground:
            continue
        i = index[o1.id]
        direct = sorted(direct_targets(o1, level, k), key=lambda b: b.id)
        for o2 in direct:
            src.append(i); dst.append(index[o2.id]); rule.append(1)
            mult.append(direct_force(1.0, len(direct), constants))
        direct_ids = {b.id for b in direct}
        for o2 in blocks:
            if o2.id in direct_ids or not falling_applies(o1, o2, level, k):
                continue
            m = falling_force(1.0, max(_gap_right(o1, o2), 0.0), o1.height, constants)
            if m > 0:
                src.append(i); dst.append(index[o2.id]); rule.append(2); mult.append(m)
        if supports[o1.id]:
            for o2 in blocks:
                if o2.id == o1.id or o2.is_ground:
                    continue
                if any(fall_arc(s).intersects(o2) for s in supports[o1.id]):
                    src.append(i); dst.append(index[o2.id]); rule.append(3); mult.append(1.0)
        for o2 in blocks:
            if thrown_applies(o1, o2, constants):
                m = thrown_force(1.0, max(_gap_right(o1, o2), 0.0), constants)
                if m > 0:
                    src.append(i); dst.append(index[o2.id]); rule.append(4); mult.append(m)
    return _network_from_edges([b.id for b in blocks], src, dst, rule, mult)


# -- propagation -------------------------------------------------------------------

def expand(net: Network, block_id: int, f1: float) -> list[tuple[int, str, float]]:
    """Forces one expansion of ``block_id`` hands to its targets, per rule."""
    return [(target, name, f1 * m) for target, name, m in net.edges(block_id)]


def propagate(level, impact_block: Block | int, f0: float, constants: PropagationConstants,
              backend: str | None = None) -> ForceMap:
    """Spread an impact of ``f0`` on ``impact_block`` through ``level``.

    A block's recorded force is the largest it receives over every rule
    chain whose forces all stay at or above ``constants.f_floor``.
    """
    if f0 < constants.f_floor:
        raise ValueError(f"initial force {f0} is below the floor {constants.f_floor}")
    impact_id = impact_block if isinstance(impact_block, int) else impact_block.id
    if backend is None:
        net = network(level, constants)
    else:
        net = build_network(tuple(level.blocks), constants, backend)
    impl = kernels.backend(backend)
    raw = impl.propagate_csr(net.indptr, net.dst, net.mult, net.index(impact_id), float(f0), constants.f_floor)
    forces = {int(net.ids[i]): float(f) for i, f in enumerate(raw) if f > 0.0}
    by_id = {b.id: b for b in level.blocks}
    destroyed = frozenset(
        bid for bid, f in forces.items() if f >= constants.kill_threshold(by_id[bid].material)
    )
    return ForceMap(impact_block=impact_id, forces=forces, destroyed=destroyed)


def propagation_matrix(level, constants: PropagationConstants) -> tuple[tuple[int, ...], np.ndarray]:
    """Forces reaching every block from a unit impact on every block.

    Returns the block ids (row and column order) and the matrix; ground
    rows and columns are zero.
    """
    ids = tuple(b.id for b in level.blocks)
    col = {bid: j for j, bid in enumerate(ids)}
    out = np.zeros((len(ids), len(ids)))
    for i, b in enumerate(level.blocks):
        if b.is_ground:
            continue
        for bid, f in propagate(level, b, 1.0, constants).forces.items():
            out[i, col[bid]] = f
    return ids, out
