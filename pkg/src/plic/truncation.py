"""Truncation of a PL map with respect to a finite grid, and the lemmas
that govern how truncation interacts with departures, contours, refinement
and composition.

Truncating flattens every component of the complement of f^{-1}(V) whose
boundary (taken inside the domain) carries a single value; components whose
two boundary values differ, and the preimage itself, keep f.  The output is
re-canonicalized, so plateaus introduced by truncation may merge segments.
"""

from __future__ import annotations

from dataclasses import dataclass

from .contour import (
    ContourPoint,
    contour_points,
    departures,
    is_departure,
    radial_contour_factor,
    _is_constant_map,
)
from .errors import (
    EmptyIntersection,
    FixedPointViolated,
    InfinitePreimage,
    InvariantViolation,
    PreconditionViolated,
)
from .geometry import IntervalQ
from .grid import FiniteGrid
from .plmap import PLMap, SYMMETRIC, UNIT, compose, preimage_finite
from .rational import ONE, Q, ZERO


def _preimage_regions(f: PLMap, grid: FiniteGrid):
    """Maximal closed intervals (possibly degenerate) forming f^{-1}(V)."""
    from bisect import bisect_left

    regions = []
    for (x0, y0), (x1, y1) in f.segments():
        if y0 == y1:
            if y0 in grid:
                regions.append((x0, x1))
            continue
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        i = bisect_left(grid.points, lo)
        while i < len(grid.points) and grid.points[i] <= hi:
            v = grid.points[i]
            x = x0 + (v - y0) * (x1 - x0) / (y1 - y0)
            regions.append((x, x))
            i += 1
    if not regions:
        raise EmptyIntersection("f(domain) misses the grid")
    regions.sort()
    merged = [regions[0]]
    for a, b in regions[1:]:
        la, lb = merged[-1]
        if a <= lb:
            merged[-1] = (la, max(lb, b))
        else:
            merged.append((a, b))
    return merged


@dataclass(frozen=True)
class Component:
    """A connected component of domain \\ f^{-1}(V)."""

    interval: IntervalQ  # open against the preimage, closed at domain ends
    boundary_in_domain: tuple
    boundary_values: tuple


@dataclass(frozen=True)
class ComponentDecomposition:
    components: tuple[Component, ...]


def _gaps(f: PLMap, grid: FiniteGrid):
    """(lo, hi, boundary points) for each complement component, in order.

    The boundary is taken inside the domain, so a component touching a
    domain endpoint has a one-point boundary.
    """
    regions = _preimage_regions(f, grid)
    lo_dom, hi_dom = f.xs[0], f.xs[-1]
    out = []
    if regions[0][0] > lo_dom:
        out.append((lo_dom, regions[0][0], (regions[0][0],)))
    for (a0, b0), (a1, b1) in zip(regions, regions[1:]):
        out.append((b0, a1, (b0, a1)))
    if regions[-1][1] < hi_dom:
        out.append((regions[-1][1], hi_dom, (regions[-1][1],)))
    return regions, out


def components(f: PLMap, grid: FiniteGrid) -> ComponentDecomposition:
    for (x0, y0), (x1, y1) in f.segments():
        if y0 == y1 and y0 in grid:
            raise InfinitePreimage(
                f"f is constant at a grid value on [{x0},{x1}]"
            )
    regions, gaps = _gaps(f, grid)
    comps = []
    for lo, hi, boundary in gaps:
        comps.append(
            Component(
                IntervalQ(lo, hi, lo in boundary, hi in boundary),
                boundary,
                tuple(sorted({f.eval(b) for b in boundary})),
            )
        )
    return ComponentDecomposition(tuple(comps))


def truncate(f: PLMap, grid: FiniteGrid) -> PLMap:
    regions, gaps = _gaps(f, grid)
    # interleaved zones covering the domain: keep f on the preimage and on
    # two-valued gaps, flatten one-valued gaps to their boundary value
    zones = [(a, b, None) for a, b in regions]
    for lo, hi, boundary in gaps:
        vals = {f.eval(b) for b in boundary}
        zones.append((lo, hi, vals.pop() if len(vals) == 1 else None))
    zones.sort()

    xs = sorted(set(f.xs) | {e for a, b in regions for e in (a, b)})
    pts = []
    zi = 0
    for x in xs:
        while zones[zi][1] < x:
            zi += 1
        flat = zones[zi][2]
        pts.append((x, f.eval(x) if flat is None else flat))
    return PLMap(f.domain, pts)


def component_of(f: PLMap, grid: FiniteGrid, x):
    """The complement component containing x, or None if f(x) in V."""
    regions, gaps = _gaps(f, grid)
    for a, b in regions:
        if a <= x <= b:
            return None
    for lo, hi, boundary in gaps:
        if lo <= x <= hi:
            return lo, hi, boundary
    raise InvariantViolation("x escaped both preimage and complement")


@dataclass(frozen=True)
class TruncDepartureReport:
    x: object
    is_departure: bool
    clause: str | None  # 'a' or 'b' when it is one
    image: IntervalQ | None  # exact trunc(f,V)([0,x)) when it is one


def trunc_departures(f: PLMap, grid: FiniteGrid, x) -> TruncDepartureReport:
    """Decide whether x is a departure of trunc(f,V) by the (a)/(b)
    dichotomy on f itself, and return the exact image interval."""
    if f.domain != UNIT:
        raise PreconditionViolated("trunc departure classification works on [0,1]")
    if f.ys[0] != ZERO:
        raise FixedPointViolated(f"f(0) = {f.ys[0]} != 0")
    if ZERO not in grid:
        raise PreconditionViolated("grid must contain 0")
    if not ZERO < x <= ONE:
        return TruncDepartureReport(x, False, None, None)
    fx = f.eval(x)
    if fx in grid:
        if is_departure(f, x):
            return TruncDepartureReport(x, True, "a", _lemma_image(f, grid, x))
        return TruncDepartureReport(x, False, None, None)
    comp = component_of(f, grid, x)
    if comp is None:
        raise InvariantViolation("f(x) not in V yet x in preimage")
    lo, hi, boundary = comp
    if len(boundary) < 2 or f.eval(boundary[0]) == f.eval(boundary[-1]):
        return TruncDepartureReport(x, False, None, None)
    c1, c2 = boundary
    if f.image_on(c1, x, True, False).contains(fx):
        return TruncDepartureReport(x, False, None, None)
    if not is_departure(f, c2):
        return TruncDepartureReport(x, False, None, None)
    return TruncDepartureReport(x, True, "b", _lemma_image(f, grid, x))


def _lemma_image(f: PLMap, grid: FiniteGrid, x) -> IntervalQ:
    fx = f.eval(x)
    before = f.image_on(ZERO, x, True, False)
    if fx > ZERO:
        m = grid.min_in(before)
        return IntervalQ(m, fx, False, True)
    M = grid.max_in(before)
    return IntervalQ(fx, M, True, False)


@dataclass(frozen=True)
class ContourWitness:
    point: ContourPoint
    value_in_grid: bool
    departure_of_f: bool


def trunc_contour_witness(f: PLMap, grid: FiniteGrid) -> list[ContourWitness]:
    """Each contour point of trunc(f,V) takes a grid value and departs f."""
    if f.domain != UNIT:
        raise PreconditionViolated("contour witnesses work on [0,1]")
    if f.ys[0] != ZERO:
        raise FixedPointViolated(f"f(0) = {f.ys[0]} != 0")
    if ZERO not in grid:
        raise PreconditionViolated("grid must contain 0")
    t = truncate(f, grid)
    out = []
    for cp in contour_points(t).points:
        w = ContourWitness(
            cp,
            f.eval(cp.alpha) in grid,
            bool(is_departure(f, cp.alpha)),
        )
        if not (w.value_in_grid and w.departure_of_f):
            raise InvariantViolation(f"contour witness fails at {cp.alpha}")
        out.append(w)
    return out


def trunc_has_wd_rcf(f: PLMap, grid: FiniteGrid) -> bool:
    """Well-definedness of the radial contour factor of trunc(f,V), via the
    image criterion: each half-image must meet V away from 0."""
    if f.domain != SYMMETRIC or f.eval(ZERO) != ZERO:
        return False
    for half in (f.right_half(), f.left_half_reflected()):
        img = half.image()
        if not any(v != ZERO and img.contains(v) for v in grid):
            return False
    return True


@dataclass(frozen=True)
class ClauseVerdict:
    clause: int
    holds: bool
    hypothesis_held: bool = True


@dataclass(frozen=True)
class CompareTruncReport:
    verdicts: tuple[ClauseVerdict, ...]

    @property
    def all_hold(self) -> bool:
        return all(v.holds for v in self.verdicts)


def compare_trunc(f: PLMap, g: PLMap, V: FiniteGrid, W: FiniteGrid) -> CompareTruncReport:
    """Evaluate the five truncation-comparison identities exactly.

    (1) trunc(f,V) o trunc(g, f^{-1}(V)) = trunc(f o g, V)
    (2) rcf(f) = rcf(g)  =>  rcf(trunc(f,V)) = rcf(trunc(g,V))
    (3) rcf(trunc(f,V)) = rcf(trunc(trunc(f,V), W))
    (4) trunc(trunc(f,V), W) = trunc(trunc(f,W), V)
    (5) rcf(trunc(f,V)) = rcf(trunc(rcf(trunc(f,W)), V))
    """
    if f.domain != SYMMETRIC or g.domain != SYMMETRIC:
        raise PreconditionViolated("comparison needs maps on [-1,1]")
    if f.eval(ZERO) != ZERO or g.eval(ZERO) != ZERO:
        raise FixedPointViolated("both maps must fix 0")
    if ZERO not in V:
        raise PreconditionViolated("0 must belong to V")
    if not V.issubset(W):
        raise PreconditionViolated("V must be a subset of W")
    if not trunc_has_wd_rcf(f, V) or not trunc_has_wd_rcf(g, V):
        raise PreconditionViolated(
            "trunc(f,V) and trunc(g,V) must have well-defined radial contour factors"
        )

    verdicts = []

    # (1) composition; needs f^{-1}(V) finite
    try:
        fiV = preimage_finite(f, V)
    except InfinitePreimage:
        raise PreconditionViolated("clause 1 needs f^{-1}(V) finite") from None
    lhs = compose(truncate(f, V), truncate(g, fiV))
    rhs = truncate(compose(f, g), V)
    verdicts.append(ClauseVerdict(1, lhs == rhs))

    # (2) same rcf transfers to truncations
    hyp = radial_contour_factor(f) == radial_contour_factor(g)
    if hyp:
        concl = radial_contour_factor(truncate(f, V)) == radial_contour_factor(
            truncate(g, V)
        )
        verdicts.append(ClauseVerdict(2, concl, hypothesis_held=True))
    else:
        verdicts.append(ClauseVerdict(2, True, hypothesis_held=False))

    tfV = truncate(f, V)
    tfW = truncate(f, W)

    # (3)
    verdicts.append(
        ClauseVerdict(
            3, radial_contour_factor(tfV) == radial_contour_factor(truncate(tfV, W))
        )
    )
    # (4)
    verdicts.append(ClauseVerdict(4, truncate(tfV, W) == truncate(tfW, V)))
    # (5)
    verdicts.append(
        ClauseVerdict(
            5,
            radial_contour_factor(tfV)
            == radial_contour_factor(truncate(radial_contour_factor(tfW), V)),
        )
    )
    return CompareTruncReport(tuple(verdicts))


@dataclass(frozen=True)
class ContourMatch:
    alpha: object
    gamma: object
    orientation: int
    f_alpha: object
    f_gamma: object


def refine_contours(f: PLMap, V: FiniteGrid, W: FiniteGrid) -> list[ContourMatch]:
    """Match each contour point of trunc(f,V) to one of trunc(f,W) with the
    same orientation, not before it, and before the next V-contour point."""
    if f.domain != UNIT or f.ys[0] != ZERO:
        raise PreconditionViolated("refinement matching works on [0,1] maps fixing 0")
    if ZERO not in V or not V.issubset(W):
        raise PreconditionViolated("need 0 in V and V a subset of W")
    tV = truncate(f, V)
    tW = truncate(f, W)
    if _is_constant_map(tV) or _is_constant_map(tW):
        raise PreconditionViolated("truncations must be non-constant")
    cps_V = contour_points(tV).points
    runs_W = departures(tW).runs
    cps_W = contour_points(tW).points

    matches = []
    for i, cp in enumerate(cps_V):
        # alpha is a departure of trunc(f,W); find its run, then the end of
        # the same-orientation block extending forward from it.
        run_idx = next(
            j
            for j, r in enumerate(runs_W)
            if r.x_interval.contains(cp.alpha) and r.orientation == cp.orientation
        )
        j = run_idx
        while j + 1 < len(runs_W) and runs_W[j + 1].orientation == cp.orientation:
            j += 1
        gamma = runs_W[j].x_interval.hi
        nxt = cps_V[i + 1].alpha if i + 1 < len(cps_V) else None
        if gamma < cp.alpha or (nxt is not None and not gamma < nxt):
            raise InvariantViolation(f"refinement match out of place at {cp.alpha}")
        matches.append(
            ContourMatch(cp.alpha, gamma, cp.orientation, f.eval(cp.alpha), f.eval(gamma))
        )
    if len(cps_V) == len(cps_W):
        for m, cw in zip(matches, cps_W):
            if cw.orientation != m.orientation or not abs(m.f_alpha) <= abs(cw.value):
                raise InvariantViolation("pairing comparison fails on equal counts")
    return matches
