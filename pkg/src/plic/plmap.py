"""Canonical piecewise-linear maps on [-1,1] or [0,1] and their calculus.

A PLMap is stored as its canonical breakpoint list: strictly increasing
abscissae spanning the domain, values in [-1,1], no three consecutive
breakpoints collinear.  Equality of maps is equality of canonical lists,
so pointwise-equal maps compare equal.  All arithmetic is exact.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right

from .errors import (
    EmptyIntersection,
    InfinitePreimage,
    NotHomeomorphism,
    OutOfDomain,
)
from .geometry import IntervalQ
from .grid import FiniteGrid, v_close_points
from .rational import NEG_ONE, ONE, Q, ZERO, format_rational


class Domain:
    __slots__ = ("lo", "hi", "label")

    def __init__(self, lo: int, hi: int, label: str):
        self.lo = lo
        self.hi = hi
        self.label = label

    def __repr__(self):
        return self.label

    def __eq__(self, other):
        return isinstance(other, Domain) and (self.lo, self.hi) == (other.lo, other.hi)

    def __hash__(self):
        return hash((self.lo, self.hi))

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi


SYMMETRIC = Domain(-1, 1, "[-1,1]")
UNIT = Domain(0, 1, "[0,1]")

_DOMAINS = {"[-1,1]": SYMMETRIC, "[0,1]": UNIT}


def domain_from_label(label: str) -> Domain:
    try:
        return _DOMAINS[label]
    except KeyError:
        raise ValueError(f"unknown domain {label!r}") from None


def _collinear(p0, p1, p2) -> bool:
    return (p1[1] - p0[1]) * (p2[0] - p1[0]) == (p2[1] - p1[1]) * (p1[0] - p0[0])


def canonicalize(points):
    """Merge collinear runs; idempotent."""
    out = []
    for p in points:
        out.append(p)
        while len(out) >= 3 and _collinear(out[-3], out[-2], out[-1]):
            del out[-2]
    return out


class PLMap:
    __slots__ = ("domain", "points", "xs", "ys", "_hash")

    def __init__(self, domain: Domain, points):
        pts = canonicalize([(Q(x), Q(y)) for x, y in points])
        if len(pts) < 2:
            raise ValueError("a PL map needs at least two breakpoints")
        xs = tuple(p[0] for p in pts)
        ys = tuple(p[1] for p in pts)
        for a, b in zip(xs, xs[1:]):
            if a >= b:
                raise ValueError("breakpoint abscissae must be strictly increasing")
        if xs[0] != domain.lo or xs[-1] != domain.hi:
            raise ValueError(
                f"breakpoints must span {domain}: got [{xs[0]}, {xs[-1]}]"
            )
        for y in ys:
            if y < NEG_ONE or y > ONE:
                raise ValueError(f"value {y} outside [-1,1]")
        self.domain = domain
        self.points = tuple(pts)
        self.xs = xs
        self.ys = ys
        self._hash = hash((domain, self.points))

    # -- basics ---------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, PLMap)
            and self.domain == other.domain
            and self.points == other.points
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(
            f"({format_rational(x)},{format_rational(y)})" for x, y in self.points
        )
        return f"PLMap({self.domain}; {body})"

    @classmethod
    def identity(cls, domain: Domain = SYMMETRIC) -> "PLMap":
        return cls(domain, [(domain.lo, domain.lo), (domain.hi, domain.hi)])

    @classmethod
    def negation(cls) -> "PLMap":
        return cls(SYMMETRIC, [(-1, 1), (1, -1)])

    @classmethod
    def constant(cls, domain: Domain, value) -> "PLMap":
        return cls(domain, [(domain.lo, value), (domain.hi, value)])

    def segments(self):
        return zip(self.points, self.points[1:])

    def eval(self, x):
        if x < self.domain.lo or x > self.domain.hi:
            raise OutOfDomain(f"{x} outside {self.domain}")
        i = bisect_right(self.xs, x) - 1
        if i == len(self.xs) - 1:
            return self.ys[-1]
        x0, y0 = self.xs[i], self.ys[i]
        x1, y1 = self.xs[i + 1], self.ys[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def __call__(self, x):
        return self.eval(x)

    def is_nowhere_constant(self) -> bool:
        return all(a != b for a, b in zip(self.ys, self.ys[1:]))

    def fixes_zero(self) -> bool:
        return self.domain.contains(ZERO) and self.eval(ZERO) == ZERO

    def max_abs_slope(self):
        best = ZERO
        for (x0, y0), (x1, y1) in self.segments():
            s = abs((y1 - y0) / (x1 - x0))
            if s > best:
                best = s
        return best

    def image(self) -> IntervalQ:
        return IntervalQ(min(self.ys), max(self.ys))

    def image_on(self, a, b, include_a: bool = True, include_b: bool = True) -> IntervalQ:
        """Exact image of the (half-)open interval between a and b."""
        if a > b:
            raise ValueError("interval endpoints out of order")
        if not (self.domain.contains(a) and self.domain.contains(b)):
            raise OutOfDomain(f"[{a},{b}] outside {self.domain}")
        fa, fb = self.eval(a), self.eval(b)
        if a == b:
            return IntervalQ(fa, fa)
        lo_i = bisect_right(self.xs, a)
        hi_i = bisect_left(self.xs, b)
        inner = self.ys[lo_i:hi_i]
        m = min([fa, fb, *inner])
        M = max([fa, fb, *inner])
        m_attained = any(y == m for y in inner) or (fa == m and include_a) or (
            fb == m and include_b
        )
        M_attained = any(y == M for y in inner) or (fa == M and include_a) or (
            fb == M and include_b
        )
        if m == M:
            # constant on the stretch; attained iff any point is included,
            # which is always the case for a nondegenerate parameter interval
            return IntervalQ(m, M)
        return IntervalQ(m, M, not m_attained, not M_attained)

    def reflected(self) -> "PLMap":
        """x -> f(-x); only for the symmetric domain."""
        if self.domain != SYMMETRIC:
            raise OutOfDomain("reflection needs domain [-1,1]")
        return PLMap(SYMMETRIC, [(-x, y) for x, y in reversed(self.points)])

    def right_half(self) -> "PLMap":
        """Restriction to [0,1] as a map on [0,1]."""
        return self._restrict_unit(False)

    def left_half_reflected(self) -> "PLMap":
        """u -> f(-u) on [0,1]; the left restriction composed with reflection."""
        return self._restrict_unit(True)

    def _restrict_unit(self, reflect: bool) -> "PLMap":
        if self.domain != SYMMETRIC:
            raise OutOfDomain("restriction needs domain [-1,1]")
        pts = [(ZERO, self.eval(ZERO))]
        if reflect:
            sel = [(-x, y) for x, y in reversed(self.points) if x < ZERO]
        else:
            sel = [(x, y) for x, y in self.points if x > ZERO]
        pts.extend(sel)
        return PLMap(UNIT, pts)


def compose(f: PLMap, g: PLMap) -> PLMap:
    """f after g.  Breakpoints fall at g's breakpoints and wherever g crosses
    a breakpoint abscissa of f; the result is re-canonicalized."""
    img = g.image()
    if img.lo < f.domain.lo or img.hi > f.domain.hi:
        raise OutOfDomain(f"range of g {img} escapes domain of f {f.domain}")
    xs = []
    for (x0, y0), (x1, y1) in g.segments():
        xs.append(x0)
        if y0 != y1:
            lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
            i = bisect_right(f.xs, lo)
            while i < len(f.xs) and f.xs[i] < hi:
                level = f.xs[i]
                xs.append(x0 + (level - y0) * (x1 - x0) / (y1 - y0))
                i += 1
    xs.append(g.xs[-1])
    xs = sorted(set(xs))
    return PLMap(g.domain, [(x, f.eval(g.eval(x))) for x in xs])


def preimage_finite(f: PLMap, grid: FiniteGrid) -> FiniteGrid:
    """All x with f(x) in the grid; errors if a plateau makes this infinite
    or the image misses the grid entirely."""
    sols = set()
    for (x0, y0), (x1, y1) in f.segments():
        if y0 == y1:
            if y0 in grid:
                raise InfinitePreimage(
                    f"f is constant at {format_rational(y0)} on [{x0},{x1}]"
                )
            continue
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        i = bisect_left(grid.points, lo)
        while i < len(grid.points) and grid.points[i] <= hi:
            v = grid.points[i]
            sols.add(x0 + (v - y0) * (x1 - x0) / (y1 - y0))
            i += 1
    if not sols:
        raise EmptyIntersection("f(domain) misses the grid")
    return FiniteGrid(sols)


def sup_deviation(f: PLMap, g: PLMap):
    """Exact sup |f-g|; attained at a breakpoint of either map."""
    if f.domain != g.domain:
        raise OutOfDomain("sup deviation needs equal domains")
    best = ZERO
    for x in sorted(set(f.xs) | set(g.xs)):
        d = abs(f.eval(x) - g.eval(x))
        if d > best:
            best = d
    return best


def eps_close(f: PLMap, g: PLMap, eps) -> bool:
    return sup_deviation(f, g) <= eps


def v_close_maps(f: PLMap, g: PLMap, grid: FiniteGrid) -> bool:
    """Pointwise V-closeness, decided exactly.

    Candidates are the breakpoints of both maps together with all preimages
    of grid values, plus midpoints of consecutive candidates: between two
    consecutive candidates both f-v and g-v keep constant sign for every
    grid value v, so the midpoint decides the whole open interval.  (The
    endpoints alone do not suffice: a grid value can separate f and g on an
    open interval while touching one of them at both of its ends.)
    """
    if f.domain != g.domain:
        raise OutOfDomain("V-closeness needs equal domains")
    cands = set(f.xs) | set(g.xs)
    for h in (f, g):
        for (x0, y0), (x1, y1) in h.segments():
            if y0 == y1:
                continue
            lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
            i = bisect_left(grid.points, lo)
            while i < len(grid.points) and grid.points[i] <= hi:
                v = grid.points[i]
                cands.add(x0 + (v - y0) * (x1 - x0) / (y1 - y0))
                i += 1
    xs = sorted(cands)
    probe = list(xs)
    for a, b in zip(xs, xs[1:]):
        probe.append((a + b) / 2)
    for x in probe:
        if not v_close_points(f.eval(x), g.eval(x), grid):
            return False
    return True


def _check_homeo(h: PLMap) -> None:
    if h.domain != SYMMETRIC:
        raise NotHomeomorphism("homeomorphisms act on [-1,1]")
    slopes_pos = all(b > a for a, b in zip(h.ys, h.ys[1:]))
    slopes_neg = all(b < a for a, b in zip(h.ys, h.ys[1:]))
    if not (slopes_pos or slopes_neg):
        raise NotHomeomorphism("map is not strictly monotone")
    if {h.ys[0], h.ys[-1]} != {Q(-1), Q(1)}:
        raise NotHomeomorphism("endpoints must map onto {-1,1}")


def invert_homeo(h: PLMap) -> PLMap:
    _check_homeo(h)
    pts = [(y, x) for x, y in h.points]
    if pts[0][0] > pts[-1][0]:
        pts.reverse()
    return PLMap(SYMMETRIC, pts)


def conjugate(f: PLMap, h_out: PLMap, h_in: PLMap) -> PLMap:
    """h_out o f o h_in^{-1}."""
    _check_homeo(h_out)
    return compose(h_out, compose(f, invert_homeo(h_in)))
