"""Deterministic SVG renderers: map plots and nested-snake approximations.

The snake renderer is a heuristic illustration of the accessibility
mechanism, not a certified embedding: its honesty comes from the exact
postconditions (polyline simplicity, clear access segment), which are
checked on rationals before any decimal conversion and fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .contour import Census, orientation_census
from .errors import (
    AccessBlocked,
    MixedOrientations,
    PreconditionViolated,
    SimplicityViolated,
)
from .geometry import adjacent_segments_ok, segments_intersect
from .grid import FiniteGrid
from .plmap import PLMap, SYMMETRIC
from .rational import ONE, Q, ZERO, to_decimal_string
from .systems import InverseSystemPrefix, _RangeCache

PALETTE = ("#1f5fa8", "#c23b22", "#2e8b57", "#8b5a2b", "#6a3d9a", "#444444")

_VIEW = 480  # svg pixels per world unit square side
_MARGIN = 40


def _px(q) -> str:
    """World [-1,1] to SVG x pixels, exact until the final decimal."""
    return to_decimal_string((q + 1) * Q(_VIEW, 2) + _MARGIN)


def _py(q) -> str:
    return to_decimal_string((ONE - q) * Q(_VIEW, 2) + _MARGIN)


def _polyline(points, style: str) -> str:
    coords = " ".join(f"{_px(x)},{_py(y)}" for x, y in points)
    return f'<polyline fill="none" {style} points="{coords}"/>'


@dataclass(frozen=True)
class PlotSpec:
    maps: tuple  # (PLMap, style index) pairs
    grids: tuple = ()
    annotations: tuple = ()  # (kind, x, y); kind in {"departure", "contour"}


def plot_map(spec: PlotSpec) -> str:
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_VIEW + 2 * _MARGIN}" '
        f'height="{_VIEW + 2 * _MARGIN}" viewBox="0 0 {_VIEW + 2 * _MARGIN} {_VIEW + 2 * _MARGIN}">',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_VIEW}" height="{_VIEW}" '
        'fill="white" stroke="#999999" stroke-width="1"/>',
        # axes through 0
        f'<line x1="{_px(Q(-1))}" y1="{_py(ZERO)}" x2="{_px(ONE)}" y2="{_py(ZERO)}" '
        'stroke="#cccccc" stroke-width="1"/>',
        f'<line x1="{_px(ZERO)}" y1="{_py(Q(-1))}" x2="{_px(ZERO)}" y2="{_py(ONE)}" '
        'stroke="#cccccc" stroke-width="1"/>',
    ]
    for grid in spec.grids:
        for v in grid:
            out.append(
                f'<line x1="{_px(Q(-1))}" y1="{_py(v)}" x2="{_px(ONE)}" y2="{_py(v)}" '
                'stroke="#888888" stroke-width="1" stroke-dasharray="3,5"/>'
            )
    for f, style_idx in spec.maps:
        color = PALETTE[style_idx % len(PALETTE)]
        out.append(
            _polyline(f.points, f'stroke="{color}" stroke-width="2"')
        )
    for kind, x, y in spec.annotations:
        r = "5" if kind == "contour" else "3"
        fill = "#c23b22" if kind == "contour" else "#1f5fa8"
        out.append(f'<circle cx="{_px(x)}" cy="{_py(y)}" r="{r}" fill="{fill}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class SnakeSpec:
    system: InverseSystemPrefix
    depth: int
    tube_widths: tuple = ()  # defaults derived from slopes when empty
    reflect_left: bool = False

    def __post_init__(self):
        if self.depth < 1:
            raise PreconditionViolated("depth must be positive")
        if self.depth - 1 > len(self.system):
            raise PreconditionViolated(
                f"depth {self.depth} exceeds system length {len(self.system)} + 1"
            )


def _default_widths(sys: InverseSystemPrefix, depth: int):
    cache = _RangeCache(sys)
    widths = []
    w = Q(1, 4)
    for k in range(1, depth):
        slope = cache.get(1, k + 1).max_abs_slope()
        w = w / (4 * max(ONE, slope))
        widths.append(w)
    return tuple(widths)


def _check_widths(sys: InverseSystemPrefix, widths, depth: int) -> None:
    cache = _RangeCache(sys)
    for a, b in zip(widths, widths[1:]):
        if not b < a:
            raise PreconditionViolated("tube widths must strictly decrease")
    for k in range(1, len(widths)):
        slope = max(ONE, cache.get(1, k + 2).max_abs_slope())
        if widths[k] * slope * 4 > widths[k - 1]:
            raise PreconditionViolated(
                f"nesting guard fails at stage {k + 1}: "
                f"width {widths[k]} too large for slope {slope}"
            )


@dataclass(frozen=True)
class SnakeResult:
    vertices: tuple
    svg: str
    marked: tuple
    access: tuple  # the clear horizontal approach segment


def snake_vertices(spec: SnakeSpec, widths=None):
    """Exact vertex list of the stage-`depth` polyline.

    The stage-d curve is parametrized by the deepest coordinate u: its height
    is the root coordinate f_1^d(u) and its horizontal position accumulates
    one transverse offset per level, scaled by that level's tube width.  With
    reflect_left the offsets use |coordinate|, folding the left half onto the
    right lobe while preserving heights.
    """
    sys = spec.system
    sys.require_fix_zero()
    depth = spec.depth
    widths = widths if widths is not None else (
        tuple(spec.tube_widths) or _default_widths(sys, depth)
    )
    if len(widths) < depth - 1:
        raise PreconditionViolated(
            f"need {depth - 1} tube widths, got {len(widths)}"
        )
    cache = _RangeCache(sys)
    if spec.reflect_left:
        allowed = {Census.NONE, Census.ALL_POSITIVE}
        allowed_neg = {Census.NONE, Census.ALL_NEGATIVE}
        censuses = [
            orientation_census(cache.get(k, l))
            for k in range(1, depth)
            for l in range(k + 1, depth + 1)
        ]
        if not (
            all(c in allowed for c in censuses)
            or all(c in allowed_neg for c in censuses)
        ):
            raise MixedOrientations(
                "reflect_left needs uniformly oriented composed bonding maps"
            )

    def offset(v):
        return abs(v) if spec.reflect_left else (v + 1) / 2

    if spec.tube_widths:
        _check_widths(sys, widths, depth)
    coord_maps = [cache.get(k, depth) for k in range(1, depth + 1)]
    params = {ZERO}  # the thread point <0,0,...> is always sampled
    for gm in coord_maps:
        params.update(gm.xs)
        if spec.reflect_left:
            # |coordinate| kinks wherever a coordinate map crosses zero
            for (x0, y0), (x1, y1) in gm.segments():
                if y0 != y1 and min(y0, y1) < ZERO < max(y0, y1):
                    params.add(x0 + (ZERO - y0) * (x1 - x0) / (y1 - y0))
    # The horizontal position is carried by the level-2 coordinate alone;
    # each deeper level contributes a small vertical offset.  Vertical
    # offsets of a graph cannot cross each other, so strands over a shared
    # spine portion stay ordered whenever their offset bands are disjoint.
    verts = []
    for u in sorted(params):
        x = widths[0] * offset(coord_maps[1].eval(u)) if depth >= 2 else ZERO
        y = coord_maps[0].eval(u)
        for k in range(3, depth + 1):
            y += widths[k - 2] * offset(coord_maps[k - 1].eval(u))
        verts.append((x, y))
    # collinear cleanup keeps the polyline canonical
    cleaned = []
    for p in verts:
        cleaned.append(p)
        while len(cleaned) >= 2 and cleaned[-1] == cleaned[-2]:
            del cleaned[-1]
        while len(cleaned) >= 3 and _collinear(cleaned[-3], cleaned[-2], cleaned[-1]):
            del cleaned[-2]
    return cleaned, widths


def _collinear(p0, p1, p2) -> bool:
    return (p1[1] - p0[1]) * (p2[0] - p1[0]) == (p2[1] - p1[1]) * (p1[0] - p0[0])


def check_simple(verts) -> None:
    n = len(verts)
    for i in range(n - 1):
        if verts[i] == verts[i + 1]:
            raise SimplicityViolated(f"zero-length segment at vertex {i}")
    for i in range(1, n - 1):
        if not adjacent_segments_ok(verts[i - 1], verts[i], verts[i + 1]):
            raise SimplicityViolated(f"double-back at vertex {i}")
    for i in range(n - 1):
        for j in range(i + 2, n - 1):
            if segments_intersect(verts[i], verts[i + 1], verts[j], verts[j + 1]):
                raise SimplicityViolated(f"segments {i} and {j} intersect")


def _check_access(verts, marked) -> tuple:
    xs = [p[0] for p in verts]
    start = (min(xs) - 1, marked[1])
    seg = (start, marked)
    for i in range(len(verts) - 1):
        a, b = verts[i], verts[i + 1]
        if segments_intersect(seg[0], seg[1], a, b):
            # touching exactly at the marked point is the allowed contact
            hits_only_marked = (
                (a == marked or b == marked or _on(seg, marked))
                and not _crosses_elsewhere(seg, a, b, marked)
            )
            if not hits_only_marked:
                raise AccessBlocked(f"segment {i} blocks the approach")
    return seg


def _on(seg, p) -> bool:
    from .geometry import on_segment

    return on_segment(p, seg[0], seg[1])


def _crosses_elsewhere(seg, a, b, marked) -> bool:
    """Does [a,b] meet seg at any point besides `marked`?"""
    from .geometry import cross, on_segment

    if cross(seg[0], seg[1], a) == 0 and cross(seg[0], seg[1], b) == 0:
        # collinear with the horizontal approach: overlap beyond a point?
        return a != marked or b != marked
    for p in (a, b):
        if p != marked and on_segment(p, seg[0], seg[1]):
            return True
    # proper crossing: the single intersection point must be `marked`
    d1 = cross(a, b, seg[0])
    d2 = cross(a, b, seg[1])
    d3 = cross(seg[0], seg[1], a)
    d4 = cross(seg[0], seg[1], b)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return not on_segment(marked, a, b)
    return False


def snake_embedding(spec: SnakeSpec) -> SnakeResult:
    from .geometry import on_segment

    verts, widths = snake_vertices(spec)
    check_simple(verts)
    off0 = ZERO if spec.reflect_left else Q(1, 2)
    marked_x = widths[0] * off0 if spec.depth >= 2 else ZERO
    marked_y = ZERO
    for k in range(3, spec.depth + 1):
        marked_y += widths[k - 2] * off0
    marked = (marked_x, marked_y)
    if not any(
        on_segment(marked, verts[i], verts[i + 1]) for i in range(len(verts) - 1)
    ):
        raise AccessBlocked("marked point does not lie on the polyline")
    access = _check_access(verts, marked)
    svg = _snake_svg(verts, marked, access)
    return SnakeResult(tuple(verts), svg, marked, access)


def _snake_svg(verts, marked, access) -> str:
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_VIEW + 2 * _MARGIN}" '
        f'height="{_VIEW + 2 * _MARGIN}" viewBox="0 0 {_VIEW + 2 * _MARGIN} {_VIEW + 2 * _MARGIN}">',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_VIEW}" height="{_VIEW}" '
        'fill="white" stroke="#999999" stroke-width="1"/>',
        _polyline(verts, f'stroke="{PALETTE[0]}" stroke-width="2"'),
        f'<line x1="{_px(access[0][0])}" y1="{_py(access[0][1])}" '
        f'x2="{_px(access[1][0])}" y2="{_py(access[1][1])}" '
        'stroke="#2e8b57" stroke-width="1" stroke-dasharray="6,4"/>',
        f'<circle cx="{_px(marked[0])}" cy="{_py(marked[1])}" r="4" fill="#c23b22"/>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"
