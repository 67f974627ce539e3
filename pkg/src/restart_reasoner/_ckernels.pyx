# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels. Mirrors ``_pykernels`` exactly; see there for docs."""

from libc.math cimport sin, pow, floor, M_PI
from libcpp.vector cimport vector
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair

cdef int NO_CONTACT = 0
cdef int CODE_LEFT = 1
cdef int CODE_RIGHT = 2
cdef int CODE_ABOVE = 3
cdef int CODE_BELOW = 4
cdef double AXIS_TOL = 1e-9
cdef double QUANTUM = 1e6

RULE_DIRECT, RULE_FALLING, RULE_STRUCTURE, RULE_THROWN = 1, 2, 3, 4


cdef inline double dmin(double a, double b) nogil:
    return a if a < b else b


cdef inline double dmax(double a, double b) nogil:
    return a if a > b else b


cdef int placement_code(double ax0, double ay0, double ax1, double ay1,
                        double bx0, double by0, double bx1, double by1,
                        double k) nogil:
    cdef double ox = dmin(ax1, bx1) - dmax(ax0, bx0)
    cdef double oy = dmin(ay1, by1) - dmax(ay0, by0)
    cdef bint horizontal
    if ox < -k or oy < -k:
        return NO_CONTACT
    if ox > AXIS_TOL and oy > AXIS_TOL:
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


cdef bint arc_hits_rect(double px, double py, double r, bint rightward,
                        double x0, double y0, double x1, double y1) nogil:
    cdef double cx0, cx1, cy0, cy1, nx, ny
    if rightward:
        cx0 = dmax(x0, px)
        cx1 = x1
    else:
        cx0 = x0
        cx1 = dmin(x1, px)
    cy0 = dmax(y0, py)
    cy1 = y1
    if cx1 - cx0 <= AXIS_TOL or cy1 - cy0 <= AXIS_TOL:
        return False
    nx = dmin(dmax(px, cx0), cx1)
    ny = dmin(dmax(py, cy0), cy1)
    return (nx - px) * (nx - px) + (ny - py) * (ny - py) < r * r


cdef inline long long quantize(double f) nogil:
    return <long long>floor(f * QUANTUM + 0.5)


def build_edges(double[::1] x, double[::1] y, double[::1] x1, double[::1] y1,
                unsigned char[::1] ground, double k, double c, double c1, double c_l,
                double s1, double d_max, double h_max, bint literal):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, s, cur, t
    cdef vector[int] code = vector[int](n * n, NO_CONTACT)
    cdef vector[char] direct = vector[char](n * n, 0)
    cdef vector[char] seen
    cdef vector[int] stack
    cdef vector[vector[int]] support = vector[vector[int]](n)
    cdef vector[int] targets
    cdef vector[int] src_v, dst_v, rule_v
    cdef vector[double] mult_v
    cdef int cij
    cdef double h, gap, d, m, share, travel

    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                cij = placement_code(x[i], y[i], x1[i], y1[i], x[j], y[j], x1[j], y1[j], k)
                if cij != NO_CONTACT:
                    code[i * n + j] = cij
                    code[j * n + i] = placement_code(x[j], y[j], x1[j], y1[j],
                                                     x[i], y[i], x1[i], y1[i], k)

        for i in range(n):
            if ground[i]:
                continue
            for j in range(n):
                if j == i or ground[j]:
                    continue
                cij = code[i * n + j]
                if (cij == CODE_RIGHT or cij == CODE_ABOVE or cij == CODE_BELOW) and \
                        y[i] - k <= y1[j] and y[j] <= y1[i] + k:
                    direct[i * n + j] = 1

        for i in range(n):
            seen.assign(n, 0)
            stack.clear()
            stack.push_back(i)
            while stack.size() > 0:
                cur = stack.back()
                stack.pop_back()
                for j in range(n):
                    if code[cur * n + j] == CODE_BELOW and not ground[j] and not seen[j] and j != i:
                        seen[j] = 1
                        stack.push_back(j)
            for j in range(n):
                if seen[j]:
                    support[i].push_back(j)

        for i in range(n):
            if ground[i]:
                continue
            h = y1[i] - y[i]
            targets.clear()
            for j in range(n):
                if direct[i * n + j]:
                    targets.push_back(j)
            if targets.size() > 0:
                share = c / targets.size()
                for t in range(<Py_ssize_t>targets.size()):
                    src_v.push_back(i)
                    dst_v.push_back(targets[t])
                    rule_v.push_back(1)
                    mult_v.push_back(share)

            for j in range(n):
                if j == i or ground[j] or direct[i * n + j]:
                    continue
                gap = x[j] - x1[i]
                if gap < -k:
                    continue
                d = gap if gap > 0.0 else 0.0
                if d < h and arc_hits_rect(x1[i], y[i], h, True, x[j], y[j], x1[j], y1[j]):
                    m = c1 * sin(M_PI * d / h)
                    if m > 0.0:
                        src_v.push_back(i)
                        dst_v.push_back(j)
                        rule_v.push_back(2)
                        mult_v.push_back(m)

            if support[i].size() > 0:
                for j in range(n):
                    if j == i or ground[j]:
                        continue
                    for t in range(<Py_ssize_t>support[i].size()):
                        s = support[i][t]
                        if arc_hits_rect(x1[s], y[s], y1[s] - y[s], True, x[j], y[j], x1[j], y1[j]):
                            src_v.push_back(i)
                            dst_v.push_back(j)
                            rule_v.push_back(3)
                            mult_v.push_back(1.0)
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
                            m = c * pow(c_l, travel)
                        if m > 0.0:
                            src_v.push_back(i)
                            dst_v.push_back(j)
                            rule_v.push_back(4)
                            mult_v.push_back(m)

    return list(src_v), list(dst_v), list(rule_v), list(mult_v)


def propagate_csr(long[::1] indptr, long[::1] dst, double[::1] mult,
                  long source, double f0, double f_floor):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef vector[double] forces = vector[double](n, 0.0)
    cdef priority_queue[pair[double, long]] heap
    cdef pair[double, long] top
    cdef double f, nf
    cdef long i, t
    cdef Py_ssize_t e
    with nogil:
        forces[source] = f0
        heap.push(pair[double, long](f0, -source))
        while not heap.empty():
            top = heap.top()
            heap.pop()
            f = top.first
            i = -top.second
            if f != forces[i]:
                continue
            for e in range(indptr[i], indptr[i + 1]):
                nf = f * mult[e]
                if nf > f0:
                    nf = f0
                if nf < f_floor:
                    continue
                t = dst[e]
                if quantize(nf) > quantize(forces[t]):
                    forces[t] = nf
                    heap.push(pair[double, long](nf, -t))
    return list(forces)


def trace_first_hit(double[::1] x, double[::1] y, double[::1] x1, double[::1] y1,
                    double x0, double y0, double tan_t, double curv, double step,
                    double x_max):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j
    cdef long long i = 0
    cdef double dx, px, py
    cdef long hit = -1
    with nogil:
        while True:
            dx = i * step
            px = x0 + dx
            py = y0 + dx * tan_t - curv * dx * dx
            if px > x_max or py < 0.0:
                break
            for j in range(n):
                if x[j] <= px and px <= x1[j] and y[j] <= py and py <= y1[j]:
                    hit = j
                    break
            if hit >= 0:
                break
            i += 1
    return hit, px, py
