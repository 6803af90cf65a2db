"""Rational intervals and exact planar segment predicates."""

from __future__ import annotations

from dataclasses import dataclass

from .rational import Q


@dataclass(frozen=True)
class IntervalQ:
    """Interval with rational endpoints and open/closed flags per side.

    Degenerate intervals must be closed on both sides; an interval with
    lo == hi and an open side is empty and rejected.
    """

    lo: object
    hi: object
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")
        if self.lo == self.hi and (self.lo_open or self.hi_open):
            raise ValueError("degenerate interval must be closed")

    @classmethod
    def closed(cls, a, b) -> "IntervalQ":
        return cls(a, b)

    @classmethod
    def open_between(cls, a, b) -> "IntervalQ | None":
        """Open interval between two values in either order; None if equal."""
        if a == b:
            return None
        lo, hi = (a, b) if a < b else (b, a)
        return cls(lo, hi, True, True)

    def contains(self, x) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and self.lo_open:
            return False
        if x == self.hi and self.hi_open:
            return False
        return True

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def diameter(self):
        return self.hi - self.lo

    def subset_of(self, other: "IntervalQ") -> bool:
        if self.lo < other.lo or (self.lo == other.lo and other.lo_open and not self.lo_open):
            return False
        if self.hi > other.hi or (self.hi == other.hi and other.hi_open and not self.hi_open):
            return False
        return True

    def __str__(self):
        l = "(" if self.lo_open else "["
        r = ")" if self.hi_open else "]"
        return f"{l}{self.lo}, {self.hi}{r}"


def intersect_intervals(a: IntervalQ, b: IntervalQ) -> IntervalQ | None:
    lo, lo_open = max((a.lo, a.lo_open), (b.lo, b.lo_open))
    if a.lo == b.lo:
        lo, lo_open = a.lo, a.lo_open or b.lo_open
    hi, hi_open = (a.hi, a.hi_open) if a.hi < b.hi else (b.hi, b.hi_open)
    if a.hi == b.hi:
        hi, hi_open = a.hi, a.hi_open or b.hi_open
    if lo > hi or (lo == hi and (lo_open or hi_open)):
        return None
    return IntervalQ(lo, hi, lo_open, hi_open)


def union_normalize(intervals: list[IntervalQ]) -> tuple[IntervalQ, ...]:
    """Canonical form of a finite union: maximal, disjoint, sorted pieces."""
    if not intervals:
        return ()
    items = sorted(intervals, key=lambda i: (i.lo, i.lo_open))
    out: list[IntervalQ] = []
    cur = items[0]
    for nxt in items[1:]:
        # Merge when nxt attaches to cur: overlapping, or touching with at
        # least one closed side at the junction.
        if nxt.lo < cur.hi or (nxt.lo == cur.hi and not (nxt.lo_open and cur.hi_open)):
            if (nxt.hi, not nxt.hi_open) > (cur.hi, not cur.hi_open):
                cur = IntervalQ(cur.lo, nxt.hi, cur.lo_open, nxt.hi_open)
        else:
            out.append(cur)
            cur = nxt
    out.append(cur)
    return tuple(out)


def union_covers(cover: list[IntervalQ], target: IntervalQ) -> bool:
    """Does the union of `cover` contain every point of `target`?"""
    merged = union_normalize(cover)
    for piece in merged:
        if target.subset_of(piece):
            return True
    return False


# -- planar segment predicates (all exact) ----------------------------------


def cross(o, a, b):
    """Signed area*2 of (o,a,b); >0 counterclockwise."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _bbox_overlap(p1, p2, q1, q2) -> bool:
    return (
        min(p1[0], p2[0]) <= max(q1[0], q2[0])
        and min(q1[0], q2[0]) <= max(p1[0], p2[0])
        and min(p1[1], p2[1]) <= max(q1[1], q2[1])
        and min(q1[1], q2[1]) <= max(p1[1], p2[1])
    )


def on_segment(p, a, b) -> bool:
    """p collinear-with and within segment [a,b]."""
    if cross(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed-segment intersection test (touching counts)."""
    if not _bbox_overlap(p1, p2, q1, q2):
        return False
    d1 = cross(q1, q2, p1)
    d2 = cross(q1, q2, p2)
    d3 = cross(p1, p2, q1)
    d4 = cross(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and on_segment(p1, q1, q2):
        return True
    if d2 == 0 and on_segment(p2, q1, q2):
        return True
    if d3 == 0 and on_segment(q1, p1, p2):
        return True
    if d4 == 0 and on_segment(q2, p1, p2):
        return True
    return False


def adjacent_segments_ok(prev_pt, shared, next_pt) -> bool:
    """Consecutive polyline segments must meet only in their shared vertex.

    Two segments on distinct lines sharing an endpoint intersect exactly
    there; the only failure mode is a collinear double-back.
    """
    if prev_pt == shared or next_pt == shared:
        return False
    if cross(prev_pt, shared, next_pt) != 0:
        return True
    dot = (next_pt[0] - shared[0]) * (prev_pt[0] - shared[0]) + (
        next_pt[1] - shared[1]
    ) * (prev_pt[1] - shared[1])
    return dot < 0
