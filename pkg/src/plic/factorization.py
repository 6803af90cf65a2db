"""Factoring maps through (radial) contour factors by PL path lifting.

A lift of ``target`` through ``t`` is a continuous s with t o s = target.
Away from the fold points of t the lift is forced (each monotone lap of t is
invertible); a choice arises exactly when the lifted point sits on a fold and
the target re-enters, where the lift may reflect back into the current lap or
cross into the adjacent one.  The search enumerates that finite choice tree
depth-first (stay-on-lap first, then adjacent laps in index order), so results
are reproducible; every returned certificate is re-verified by exact
composition, never trusted from the search.
"""

from __future__ import annotations

import os
from bisect import bisect_right
from dataclasses import dataclass

from .contour import Census, orientation_census, radial_contour_factor
from .errors import (
    HypothesisFailed,
    InvariantViolation,
    NoLift,
    PreconditionViolated,
    SearchExhausted,
)
from .plmap import PLMap, SYMMETRIC, UNIT, compose
from .rational import ONE, ZERO

DEFAULT_MAX_NODES = 10**6


def _max_nodes_from_env() -> int:
    raw = os.environ.get("PLIC_MAX_NODES")
    if raw is None:
        return DEFAULT_MAX_NODES
    return int(raw)


@dataclass(frozen=True)
class Lap:
    """One maximal monotone stretch of t."""

    index: int
    pts: tuple  # t's breakpoints spanning the lap, increasing x
    rising: bool

    @property
    def x_lo(self):
        return self.pts[0][0]

    @property
    def x_hi(self):
        return self.pts[-1][0]

    @property
    def y_min(self):
        return self.pts[0][1] if self.rising else self.pts[-1][1]

    @property
    def y_max(self):
        return self.pts[-1][1] if self.rising else self.pts[0][1]

    def covers_value(self, y) -> bool:
        return self.y_min <= y <= self.y_max

    def inverse(self, y):
        """Unique x in the lap with t(x) = y; y must be covered."""
        pts = self.pts
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
            if lo <= y <= hi:
                return x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        raise InvariantViolation(f"value {y} not covered by lap {self.index}")


def laps_of(t: PLMap) -> list[Lap]:
    if not t.is_nowhere_constant():
        raise PreconditionViolated("lifting needs a nowhere-constant fold map")
    groups = []
    cur = [t.points[0], t.points[1]]
    cur_sign = t.points[1][1] > t.points[0][1]
    for p0, p1 in list(t.segments())[1:]:
        sign = p1[1] > p0[1]
        if sign == cur_sign:
            cur.append(p1)
        else:
            groups.append((tuple(cur), cur_sign))
            cur = [p0, p1]
            cur_sign = sign
    groups.append((tuple(cur), cur_sign))
    return [Lap(i, pts, rising) for i, (pts, rising) in enumerate(groups)]


class _Budget:
    __slots__ = ("left", "spent")

    def __init__(self, max_nodes: int):
        self.left = max_nodes
        self.spent = 0

    def tick(self):
        if self.left <= 0:
            raise SearchExhausted(self.spent)
        self.left -= 1
        self.spent += 1


def _half_segments(target: PLMap, mirror: bool, fold_values):
    """Critical subdivision of one march direction, as (m0,y0,m1,y1) tuples.

    m is the forward march parameter; for the mirrored (left) half,
    m = -x.  Segments are cut at every point where the target takes a
    fold value, so within each open piece the lifted point stays strictly
    inside one lap.
    """
    if mirror:
        sel = [(-x, y) for x, y in reversed(target.points) if x < ZERO]
    else:
        sel = [(x, y) for x, y in target.points if x > ZERO]
    pts = [(ZERO, target.eval(ZERO))] + sel
    cut = []
    for (m0, y0), (m1, y1) in zip(pts, pts[1:]):
        cut.append(m0)
        if y0 != y1:
            lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
            for v in fold_values:
                if lo < v < hi:
                    cut.append(m0 + (v - y0) * (m1 - m0) / (y1 - y0))
        cut.append(m1)
    ms = sorted(set(cut))

    def value(m):
        for (m0, y0), (m1, y1) in zip(pts, pts[1:]):
            if m0 <= m <= m1:
                if m == m0:
                    return y0
                return y0 + (y1 - y0) * (m - m0) / (m1 - m0)
        raise InvariantViolation("march parameter out of range")

    return [
        (m0, value(m0), m1, value(m1)) for m0, m1 in zip(ms, ms[1:])
    ]


def _laps_at(laps: list[Lap], u) -> list[int]:
    return [lap.index for lap in laps if lap.x_lo <= u <= lap.x_hi]


def _march(laps, segs, idx, u, lap_idx, prev_lap, trail, choices, budget):
    """Yield (stretches, fold choices) for every lift of the remaining segs.

    ``lap_idx`` is None when u sits on a lap boundary; the next moving
    segment then selects a lap (a recorded fold choice, branching when two
    laps fit).
    """
    budget.tick()
    if idx == len(segs):
        yield trail, choices
        return
    m0, y0, m1, y1 = segs[idx]
    if y0 == y1:
        yield from _march(
            laps, segs, idx + 1, u, lap_idx, prev_lap,
            trail + [(m0, u, m1, u, None)], choices, budget,
        )
        return
    direction = 1 if y1 > y0 else -1
    if lap_idx is None:
        # u sits on a lap boundary; entering lap L moves t upward iff the
        # entry end is the rising end of L
        candidates = []
        for li in _laps_at(laps, u):
            lap = laps[li]
            enter_dir_up = lap.rising if u == lap.x_lo else not lap.rising
            if (direction > 0) == enter_dir_up:
                candidates.append(li)
        if prev_lap in candidates:
            candidates.remove(prev_lap)
            candidates.insert(0, prev_lap)
        for li in candidates:
            yield from _advance(laps, segs, idx, u, li, trail,
                                choices + [(m0, li)], budget)
        return
    yield from _advance(laps, segs, idx, u, lap_idx, trail, choices, budget)


def _advance(laps, segs, idx, u, lap_idx, trail, choices, budget):
    m0, y0, m1, y1 = segs[idx]
    lap = laps[lap_idx]
    if not lap.covers_value(y1):
        return  # dead branch: value escapes every reachable lap
    u1 = lap.inverse(y1)
    at_boundary = u1 == lap.x_lo or u1 == lap.x_hi
    yield from _march(
        laps, segs, idx + 1, u1,
        None if at_boundary else lap_idx,
        lap_idx if at_boundary else None,
        trail + [(m0, u, m1, u1, lap_idx)], choices, budget,
    )


def _emit_half(t: PLMap, segs_trail, mirror: bool):
    """Exact breakpoints of s over one half from a completed march."""
    verts = []
    for m0, u0, m1, u1, lap_idx in segs_trail:
        verts.append((m0, u0))
        if lap_idx is not None and u0 != u1:
            lo, hi = (u0, u1) if u0 < u1 else (u1, u0)
            y0, y1 = t.eval(u0), t.eval(u1)
            for bx, by in t.points:
                if lo < bx < hi:
                    # target is linear on the stretch; solve target(m) = by
                    verts.append((m0 + (by - y0) * (m1 - m0) / (y1 - y0), bx))
        verts.append((m1, u1))
    verts = sorted(set(verts))
    if mirror:
        verts = sorted((-m, u) for m, u in verts)
    return verts


@dataclass(frozen=True)
class LiftCertificate:
    s: PLMap
    fold_choices: tuple


def iter_lifts(t: PLMap, target: PLMap, budget: _Budget, origin_only: bool = False):
    """All continuous PL lifts of target through t, s(0) = 0 explored first.

    Yields LiftCertificate objects; every certificate is verified by exact
    composition before being yielded.  With ``origin_only`` the start point
    is pinned to 0 (requires t(0) = target(0) = 0).
    """
    laps = laps_of(t)
    fold_values = sorted({lap.pts[0][1] for lap in laps} | {lap.pts[-1][1] for lap in laps})
    y_start = target.eval(ZERO)
    img = target.image()
    t_img = t.image()
    if img.lo < t_img.lo or img.hi > t_img.hi:
        raise NoLift(
            f"target values {img} escape the range {t_img} of the fold map"
        )
    starts = []
    for lap in laps:
        if lap.covers_value(y_start):
            u = lap.inverse(y_start)
            if u not in starts:
                starts.append(u)
    starts.sort()
    if t.domain.contains(ZERO) and t.eval(ZERO) == y_start == ZERO and ZERO in starts:
        starts.remove(ZERO)
        starts.insert(0, ZERO)
    if origin_only:
        if not starts or starts[0] != ZERO:
            raise PreconditionViolated("origin-pinned lift needs t(0) = target(0) = 0")
        starts = [ZERO]
    two_sided = target.domain == SYMMETRIC
    segs_right = _half_segments(target, False, fold_values)
    segs_left = _half_segments(target, True, fold_values) if two_sided else None

    for u0 in starts:
        lap_here = _laps_at(laps, u0)
        lap0 = None
        if len(lap_here) == 1:
            lap = laps[lap_here[0]]
            if lap.x_lo < u0 < lap.x_hi:
                lap0 = lap.index
        for trail_r, choices_r in _march(
            laps, segs_right, 0, u0, lap0, None, [], [], budget
        ):
            right = _emit_half(t, trail_r, False)
            if not two_sided:
                s = PLMap(target.domain, right)
                if compose(t, s) != target:
                    raise InvariantViolation("lift certificate failed composition")
                yield LiftCertificate(s, tuple(choices_r))
                continue
            for trail_l, choices_l in _march(
                laps, segs_left, 0, u0, lap0, None, [], [], budget
            ):
                left = _emit_half(t, trail_l, True)
                pts = left[:-1] + right
                s = PLMap(SYMMETRIC, pts)
                if compose(t, s) != target:
                    raise InvariantViolation("lift certificate failed composition")
                choice_record = tuple(
                    sorted([(-m, li) for m, li in choices_l] + list(choices_r))
                )
                yield LiftCertificate(s, choice_record)


def lift_through(t: PLMap, target: PLMap, max_nodes: int | None = None) -> LiftCertificate:
    """First lift in the deterministic search order; NoLift if none exists."""
    budget = _Budget(max_nodes if max_nodes is not None else _max_nodes_from_env())
    for cert in iter_lifts(t, target, budget):
        return cert
    raise NoLift("no continuous lift exists")


def factor_contour(f: PLMap) -> tuple[PLMap, PLMap]:
    """f = t o s through the radial contour factor; exact by construction."""
    t = radial_contour_factor(f)
    try:
        cert = lift_through(t, f)
    except NoLift:
        raise InvariantViolation(
            "contour factorization must admit a lift; search found none"
        ) from None
    return t, cert.s


def bridged_s(
    f1: PLMap, f2: PLMap, f3: PLMap, max_nodes: int | None = None
) -> PLMap:
    """Search for s with rcf(f1) o s = f1 o f2 such that s o rcf(f3) has no
    negative radial departures; hypotheses on contour-factor stability are
    checked first and every hit is certified before being returned."""
    t1 = radial_contour_factor(f1)
    if t1 != radial_contour_factor(compose(f1, f2)):
        raise HypothesisFailed("rcf(f1) != rcf(f1 o f2)")
    t2 = radial_contour_factor(f2)
    if t2 != radial_contour_factor(compose(f2, f3)):
        raise HypothesisFailed("rcf(f2) != rcf(f2 o f3)")
    t3 = radial_contour_factor(f3)
    target = compose(f1, f2)
    budget = _Budget(max_nodes if max_nodes is not None else _max_nodes_from_env())
    for cert in iter_lifts(t1, target, budget, origin_only=True):
        census = orientation_census(compose(cert.s, t3))
        if census in (Census.NONE, Census.ALL_POSITIVE):
            return cert.s
    raise SearchExhausted(budget.spent)
