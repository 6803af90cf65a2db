"""Departures, contour points and factors, and the radial variants.

For a map f on [0,1] with f(0) = 0, a departure is an x > 0 whose value
escapes the image of [0,x).  Because that image is an interval containing 0,
the departures are exactly the strict record points of f, and the departure
set decomposes into finitely many maximal intervals ("runs") over which the
running record extends strictly in one direction.  That run decomposition is
the finite representation everything else is computed from.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import (
    FixedPointViolated,
    HalfConstant,
    InvariantViolation,
    NoDepartures,
    OrderViolated,
    OutOfDomain,
)
from .geometry import IntervalQ, intersect_intervals, union_covers, union_normalize
from .plmap import PLMap, SYMMETRIC, UNIT, compose
from .rational import ONE, Q, ZERO


class Census(Enum):
    NONE = "none"
    ALL_POSITIVE = "all_positive"
    ALL_NEGATIVE = "all_negative"
    MIXED = "mixed"


@dataclass(frozen=True)
class Run:
    """One maximal departure interval (x_lo, x_hi] with its realized values.

    ``opposite_record`` is the record on the other side of 0 at the moment
    the run starts: the running min for a positive run, the running max for
    a negative one.  It is constant along the run and is exactly the data
    needed to pair runs into radial departures.
    """

    x_interval: IntervalQ
    values: IntervalQ
    orientation: int  # +1 or -1
    opposite_record: object

    @property
    def record(self):
        return self.values.hi if self.orientation > 0 else self.values.lo


@dataclass(frozen=True)
class DepartureProfile:
    runs: tuple[Run, ...]


@dataclass(frozen=True)
class ContourPoint:
    alpha: object
    value: object
    orientation: int


@dataclass(frozen=True)
class ContourData:
    points: tuple[ContourPoint, ...]

    def __post_init__(self):
        pts = self.points
        for a, b in zip(pts, pts[1:]):
            if not a.alpha < b.alpha:
                raise InvariantViolation("contour abscissae must increase")
            if a.orientation == b.orientation:
                raise InvariantViolation("contour orientations must alternate")
        for cls in (1, -1):
            vals = [abs(p.value) for p in pts if p.orientation == cls]
            for u, v in zip(vals, vals[1:]):
                if not u < v:
                    raise InvariantViolation(
                        "contour amplitudes must grow within an orientation class"
                    )


def _require_unit_fixing_zero(f: PLMap) -> None:
    if f.domain != UNIT:
        raise OutOfDomain("departures are defined for maps on [0,1]")
    if f.ys[0] != ZERO:
        raise FixedPointViolated(f"f(0) = {f.ys[0]} != 0")


def departures(f: PLMap) -> DepartureProfile:
    """Run decomposition of the departure set via a single record sweep."""
    _require_unit_fixing_zero(f)
    runs: list[Run] = []
    hi_rec = ZERO
    lo_rec = ZERO
    for (x0, y0), (x1, y1) in f.segments():
        if y1 > y0 and y1 > hi_rec:
            xc = x0 if y0 >= hi_rec else x0 + (hi_rec - y0) * (x1 - x0) / (y1 - y0)
            prev = runs[-1] if runs else None
            if prev is not None and prev.orientation > 0 and prev.x_interval.hi == xc:
                runs[-1] = Run(
                    IntervalQ(prev.x_interval.lo, x1, True, False),
                    IntervalQ(prev.values.lo, y1, True, False),
                    1,
                    prev.opposite_record,
                )
            else:
                runs.append(
                    Run(
                        IntervalQ(xc, x1, True, False),
                        IntervalQ(hi_rec, y1, True, False),
                        1,
                        lo_rec,
                    )
                )
            hi_rec = y1
        elif y1 < y0 and y1 < lo_rec:
            xc = x0 if y0 <= lo_rec else x0 + (lo_rec - y0) * (x1 - x0) / (y1 - y0)
            prev = runs[-1] if runs else None
            if prev is not None and prev.orientation < 0 and prev.x_interval.hi == xc:
                runs[-1] = Run(
                    IntervalQ(prev.x_interval.lo, x1, True, False),
                    IntervalQ(y1, prev.values.hi, False, True),
                    -1,
                    prev.opposite_record,
                )
            else:
                runs.append(
                    Run(
                        IntervalQ(xc, x1, True, False),
                        IntervalQ(y1, lo_rec, False, True),
                        -1,
                        hi_rec,
                    )
                )
            lo_rec = y1
    return DepartureProfile(tuple(runs))


def is_departure(f: PLMap, x) -> int:
    """Definition-level check: 0 if not a departure, else the orientation."""
    _require_unit_fixing_zero(f)
    if not ZERO < x <= ONE:
        return 0
    fx = f.eval(x)
    if f.image_on(ZERO, x, True, False).contains(fx):
        return 0
    return 1 if fx > ZERO else -1


def contour_points(f: PLMap) -> ContourData:
    """Last departure of each maximal same-orientation block preceding an
    opposite-orientation departure, plus the overall last departure."""
    profile = departures(f)
    if not profile.runs:
        raise NoDepartures("map has no departures (identically zero)")
    pts = []
    runs = profile.runs
    for i, run in enumerate(runs):
        if i == len(runs) - 1 or runs[i + 1].orientation != run.orientation:
            pts.append(ContourPoint(run.x_interval.hi, run.record, run.orientation))
    return ContourData(tuple(pts))


def contour_factor(f: PLMap) -> PLMap:
    """The canonical zigzag through the contour values at i/n."""
    data = contour_points(f)
    n = len(data.points)
    pts = [(ZERO, ZERO)]
    pts.extend((Q(i + 1, n), p.value) for i, p in enumerate(data.points))
    return PLMap(UNIT, pts)


def _require_symmetric_fixing_zero(f: PLMap) -> None:
    if f.domain != SYMMETRIC:
        raise OutOfDomain("radial notions are defined for maps on [-1,1]")
    if f.eval(ZERO) != ZERO:
        raise FixedPointViolated(f"f(0) = {f.eval(ZERO)} != 0")


def _is_constant_map(f: PLMap) -> bool:
    return all(y == f.ys[0] for y in f.ys)


def has_well_defined_rcf(f: PLMap) -> bool:
    """Piecewise-linear, fixes 0, and both restrictions are non-constant."""
    if f.domain != SYMMETRIC or f.eval(ZERO) != ZERO:
        return False
    return not _is_constant_map(f.right_half()) and not _is_constant_map(
        f.left_half_reflected()
    )


def radial_contour_factor(f: PLMap) -> PLMap:
    """Glue the right-half contour factor with the reflected left one."""
    _require_symmetric_fixing_zero(f)
    right = f.right_half()
    left = f.left_half_reflected()
    if _is_constant_map(right):
        raise HalfConstant("right")
    if _is_constant_map(left):
        raise HalfConstant("left")
    t_right = contour_factor(right)
    t_left = contour_factor(left)
    pts = [(-x, y) for x, y in reversed(t_left.points)]
    pts.extend(t_right.points[1:])
    return PLMap(SYMMETRIC, pts)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned product of value intervals in the (y1, y2) plane."""

    y1: IntervalQ
    y2: IntervalQ


@dataclass(frozen=True)
class RadialDepartureSet:
    """Realized value pairs of radial departures, per orientation.

    A pair <x1, x2> with x1 < 0 < x2 is a positive radial departure iff
    x1 is a negative left departure, x2 a positive right departure, and
    each value clears the record accumulated on the opposite side; those
    constraints make the realized (f(x1), f(x2)) set a finite union of
    rectangles, one per compatible pair of runs.
    """

    positive: tuple[Rect, ...]
    negative: tuple[Rect, ...]

    def canonical(self):
        return (_canonical_rect_union(self.positive), _canonical_rect_union(self.negative))


def _canonical_rect_union(rects) -> tuple:
    """Normal form of a union of rectangles: slab decomposition over y1."""
    rects = [r for r in rects if r.y1 is not None and r.y2 is not None]
    if not rects:
        return ()
    cuts = sorted({r.y1.lo for r in rects} | {r.y1.hi for r in rects})
    atoms = []
    for i, c in enumerate(cuts):
        atoms.append(IntervalQ(c, c))
        if i + 1 < len(cuts):
            atoms.append(IntervalQ(c, cuts[i + 1], True, True))
    slabs = []
    for atom in atoms:
        probe = atom.lo if atom.is_degenerate else (atom.lo + atom.hi) / 2
        covering = [r.y2 for r in rects if r.y1.contains(probe)]
        sig = tuple(
            (iv.lo, iv.hi, iv.lo_open, iv.hi_open) for iv in union_normalize(covering)
        )
        slabs.append((atom, sig))
    merged = []
    for atom, sig in slabs:
        if not sig:
            continue
        if merged and merged[-1][1] == sig and merged[-1][0].hi == atom.lo:
            prev_atom = merged[-1][0]
            merged[-1] = (
                IntervalQ(prev_atom.lo, atom.hi, prev_atom.lo_open, atom.hi_open),
                sig,
            )
        else:
            merged.append((atom, sig))
    return tuple(
        ((a.lo, a.hi, a.lo_open, a.hi_open), sig) for a, sig in merged
    )


def radial_departures(f: PLMap) -> RadialDepartureSet:
    _require_symmetric_fixing_zero(f)
    right = departures(f.right_half()).runs
    left = departures(f.left_half_reflected()).runs
    positive = []
    negative = []
    for lj in left:
        for ri in right:
            if lj.orientation < 0 and ri.orientation > 0:
                y1 = intersect_intervals(
                    lj.values, IntervalQ(Q(-1), ri.opposite_record, False, True)
                )
                y2 = intersect_intervals(
                    ri.values, IntervalQ(lj.opposite_record, ONE, True, False)
                )
                if y1 is not None and y2 is not None:
                    positive.append(Rect(y1, y2))
            elif lj.orientation > 0 and ri.orientation < 0:
                y1 = intersect_intervals(
                    lj.values, IntervalQ(ri.opposite_record, ONE, True, False)
                )
                y2 = intersect_intervals(
                    ri.values, IntervalQ(Q(-1), lj.opposite_record, False, True)
                )
                if y1 is not None and y2 is not None:
                    negative.append(Rect(y1, y2))
    return RadialDepartureSet(tuple(positive), tuple(negative))


def same_radial_departures(f: PLMap, g: PLMap) -> bool:
    return radial_departures(f).canonical() == radial_departures(g).canonical()


def orientation_census(f: PLMap) -> Census:
    rd = radial_departures(f)
    has_pos = bool(_canonical_rect_union(rd.positive))
    has_neg = bool(_canonical_rect_union(rd.negative))
    if has_pos and has_neg:
        return Census.MIXED
    if has_pos:
        return Census.ALL_POSITIVE
    if has_neg:
        return Census.ALL_NEGATIVE
    return Census.NONE


def classify_radial_pair(f: PLMap, x1, x2) -> int:
    """Definition-level classification of one pair: +1, -1 or 0."""
    _require_symmetric_fixing_zero(f)
    if not (Q(-1) <= x1 and x1 < ZERO < x2 and x2 <= ONE):
        raise OrderViolated(f"need -1 <= x1 < 0 < x2 <= 1, got {x1}, {x2}")
    img = f.image_on(x1, x2, False, False)
    f1, f2 = f.eval(x1), f.eval(x2)
    if f1 < f2 and img == IntervalQ(f1, f2, True, True):
        return 1
    if f2 < f1 and img == IntervalQ(f2, f1, True, True):
        return -1
    return 0


_PROP_B_LABELS = {1: "positive", -1: "negative", 0: "not_departure"}


@dataclass(frozen=True)
class CompDepResult:
    classification: str
    clause: int | None  # which composition clause decided it, if any


def comp_dep_check(f: PLMap, g: PLMap, x1, x2) -> CompDepResult:
    """Classify <x1,x2> for f o g twice: directly from the definition and
    via the two-clause case split on g's classification; assert agreement."""
    _require_symmetric_fixing_zero(f)
    _require_symmetric_fixing_zero(g)
    direct = classify_radial_pair(compose(f, g), x1, x2)
    cls_g = classify_radial_pair(g, x1, x2)
    clause = None
    if cls_g == 0:
        derived = 0
    elif cls_g > 0:
        # clause 1: inner pair <g(x1), g(x2)> keeps the orientation of f on it
        clause = 1
        derived = classify_radial_pair(f, g.eval(x1), g.eval(x2))
    else:
        # clause 2: swapped inner pair; a negative inner departure yields positive
        clause = 2
        derived = -classify_radial_pair(f, g.eval(x2), g.eval(x1))
    if derived != direct:
        raise InvariantViolation(
            f"composition clause mismatch at <{x1},{x2}>: direct "
            f"{_PROP_B_LABELS[direct]}, clauses {_PROP_B_LABELS[derived]}"
        )
    return CompDepResult(_PROP_B_LABELS[direct], clause if direct != 0 else None)


# -- equality of contour factors via three routes ----------------------------


def _run_images(runs) -> list[tuple[int, object, IntervalQ]]:
    """(orientation, opposite record, realized values) per run.

    For a departure x in a run, f([0,x)) is [opposite_record, f(x)) for a
    positive run and (f(x), opposite_record] for a negative one, so a run's
    images are determined by (orientation, opposite_record, value range).
    """
    return [(r.orientation, r.opposite_record, r.values) for r in runs]


def _departure_matching_one_way(runs_f, runs_g) -> bool:
    for orient, opp, vals in _run_images(runs_f):
        cover = [v for o, p, v in _run_images(runs_g) if o == orient and p == opp]
        if not union_covers(cover, vals):
            return False
    return True


def _contour_matching_one_way(f_runs, f_contours, g_runs) -> bool:
    for cp in f_contours.points:
        # the run ending at this contour point carries its image data
        run = next(
            r for r in f_runs if r.x_interval.hi == cp.alpha and r.orientation == cp.orientation
        )
        found = any(
            o == cp.orientation and p == run.opposite_record and v.contains(cp.value)
            for o, p, v in _run_images(g_runs)
        )
        if not found:
            return False
    return True


def same_contour(f: PLMap, g: PLMap, method: str = "factor_equality") -> bool:
    """Decide t_f = t_g by one of three equivalent routes."""
    for h in (f, g):
        _require_unit_fixing_zero(h)
        if _is_constant_map(h):
            raise NoDepartures("constant map has no contour factor")
    if method == "factor_equality":
        return contour_factor(f) == contour_factor(g)
    if method == "departure_matching":
        rf, rg = departures(f).runs, departures(g).runs
        return _departure_matching_one_way(rf, rg) and _departure_matching_one_way(rg, rf)
    if method == "contour_matching":
        rf, rg = departures(f).runs, departures(g).runs
        cf, cg = contour_points(f), contour_points(g)
        return _contour_matching_one_way(rf, cf, rg) and _contour_matching_one_way(
            rg, cg, rf
        )
    raise ValueError(f"unknown method {method!r}")
