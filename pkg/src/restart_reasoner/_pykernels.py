"""Pure-Python kernels. Same signatures and results as ``_ckernels``."""

from __future__ import annotations

import heapq
import math

from .geometry import (
    AXIS_TOL,
    CODE_ABOVE,
    CODE_BELOW,
    CODE_RIGHT,
    NO_CONTACT,
    arc_hits_rect,
    overlaps_1d,
    placement_code,
)

RULE_DIRECT, RULE_FALLING, RULE_STRUCTURE, RULE_THROWN = 1, 2, 3, 4
QUANTUM = 1e6


def _as_list(seq):
    return seq.tolist() if hasattr(seq, "tolist") else list(seq)


def _quantize(f):
    return math.floor(f * QUANTUM + 0.5)


def build_edges(x, y, x1, y1, ground, k, c, c1, c_l, s1, d_max, h_max, literal):
    """All rule edges of one block layout.

    Returns parallel lists ``(src, dst, rule, mult)`` ordered by source,
    then rule, then target. A target's force along an edge is
    ``source force * mult``.
    """
    x, y, x1, y1 = _as_list(x), _as_list(y), _as_list(x1), _as_list(y1)
    ground = [bool(g) for g in _as_list(ground)]
    n = len(x)
    code = [[NO_CONTACT] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            cij = placement_code(x[i], y[i], x1[i], y1[i], x[j], y[j], x1[j], y1[j], k)
            if cij != NO_CONTACT:
                code[i][j] = cij
                code[j][i] = placement_code(x[j], y[j], x1[j], y1[j], x[i], y[i], x1[i], y1[i], k)

    direct = [[False] * n for _ in range(n)]
    for i in range(n):
        if ground[i]:
            continue
        for j in range(n):
            if j == i or ground[j]:
                continue
            if code[i][j] in (CODE_RIGHT, CODE_ABOVE, CODE_BELOW) and overlaps_1d(
                y[i] - k, y1[i] + k, y[j], y1[j]
            ):
                direct[i][j] = True

    support = []
    for i in range(n):
        seen = [False] * n
        stack = [i]
        members = []
        while stack:
            cur = stack.pop()
            for j in range(n):
                if code[cur][j] == CODE_BELOW and not ground[j] and not seen[j] and j != i:
                    seen[j] = True
                    members.append(j)
                    stack.append(j)
        members.sort()
        support.append(members)

    src, dst, rule, mult = [], [], [], []
    for i in range(n):
        if ground[i]:
            continue
        h = y1[i] - y[i]
        targets = [j for j in range(n) if direct[i][j]]
        if targets:
            share = c / len(targets)
            for j in targets:
                src.append(i); dst.append(j); rule.append(RULE_DIRECT); mult.append(share)

        for j in range(n):
            if j == i or ground[j] or direct[i][j]:
                continue
            gap = x[j] - x1[i]
            if gap < -k:
                continue
            d = gap if gap > 0.0 else 0.0
            if d < h and arc_hits_rect(x1[i], y[i], h, True, x[j], y[j], x1[j], y1[j]):
                m = c1 * math.sin(math.pi * d / h)
                if m > 0.0:
                    src.append(i); dst.append(j); rule.append(RULE_FALLING); mult.append(m)

        if support[i]:
            for j in range(n):
                if j == i or ground[j]:
                    continue
                for s in support[i]:
                    if arc_hits_rect(x1[s], y[s], y1[s] - y[s], True, x[j], y[j], x1[j], y1[j]):
                        src.append(i); dst.append(j); rule.append(RULE_STRUCTURE); mult.append(1.0)
                        break

        if (x1[i] - x[i]) * h < s1 - AXIS_TOL:
            for j in range(n):
                if j == i or ground[j]:
                    continue
                gap = x[j] - x1[i]
                if gap < -k:
                    continue
                travel = gap if gap > 0.0 else 0.0
                if travel < d_max and y[j] < y[i] + h_max:
                    if literal:
                        m = c * c_l * travel
                    else:
                        m = c * c_l ** travel
                    if m > 0.0:
                        src.append(i); dst.append(j); rule.append(RULE_THROWN); mult.append(m)
    return src, dst, rule, mult


def propagate_csr(indptr, dst, mult, source, f0, f_floor):
    """Best-first force spreading; returns a per-block force list (0 = untouched).

    The largest pending force is expanded first. A target is re-queued only
    when its force improves at 1e-6 resolution, so the loop terminates.
    """
    indptr, dst, mult = _as_list(indptr), _as_list(dst), _as_list(mult)
    n = len(indptr) - 1
    forces = [0.0] * n
    forces[source] = f0
    heap = [(-f0, source)]
    while heap:
        neg, i = heapq.heappop(heap)
        f = -neg
        if f != forces[i]:
            continue
        for e in range(indptr[i], indptr[i + 1]):
            nf = f * mult[e]
            if nf > f0:
                nf = f0
            if nf < f_floor:
                continue
            t = dst[e]
            if _quantize(nf) > _quantize(forces[t]):
                forces[t] = nf
                heapq.heappush(heap, (-nf, t))
    return forces


def trace_first_hit(x, y, x1, y1, x0, y0, tan_t, curv, step, x_max):
    """March ``y = y0 + X tan - curv X^2`` in steps of ``step`` from ``x0``.

    Returns ``(index, px, py)`` for the first rectangle containing a sample
    (lowest index on ties) or ``(-1, px, py)`` at the last sample when the
    path leaves ``x <= x_max, y >= 0``.
    """
    x, y, x1, y1 = _as_list(x), _as_list(y), _as_list(x1), _as_list(y1)
    n = len(x)
    i = 0
    px, py = x0, y0
    while True:
        dx = i * step
        px = x0 + dx
        py = y0 + dx * tan_t - curv * dx * dx
        if px > x_max or py < 0.0:
            return -1, px, py
        for j in range(n):
            if x[j] <= px <= x1[j] and y[j] <= py <= y1[j]:
                return j, px, py
        i += 1
