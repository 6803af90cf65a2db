"""Finite grids in [-1,1]: mesh and V-closeness of points."""

from __future__ import annotations

from bisect import bisect_left, bisect_right

from .rational import NEG_ONE, ONE, Q, format_rational


class FiniteGrid:
    """Sorted finite set of rationals in [-1,1]; non-empty, no duplicates."""

    __slots__ = ("points", "_hash")

    def __init__(self, points):
        pts = sorted(set(points))
        if not pts:
            raise ValueError("grid must be non-empty")
        if pts[0] < NEG_ONE or pts[-1] > ONE:
            raise ValueError("grid points must lie in [-1,1]")
        self.points = tuple(pts)
        self._hash = hash(self.points)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __contains__(self, x):
        i = bisect_left(self.points, x)
        return i < len(self.points) and self.points[i] == x

    def __eq__(self, other):
        return isinstance(other, FiniteGrid) and self.points == other.points

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "FiniteGrid({%s})" % ", ".join(format_rational(p) for p in self.points)

    def union(self, other) -> "FiniteGrid":
        return FiniteGrid(self.points + tuple(other))

    def issubset(self, other: "FiniteGrid") -> bool:
        return all(p in other for p in self.points)

    def count_strictly_between(self, a, b) -> int:
        lo, hi = (a, b) if a <= b else (b, a)
        return bisect_left(self.points, hi) - bisect_right(self.points, lo)

    def min_in(self, interval):
        """Smallest grid point inside `interval` (IntervalQ), or None."""
        i = bisect_left(self.points, interval.lo)
        while i < len(self.points) and self.points[i] <= interval.hi:
            if interval.contains(self.points[i]):
                return self.points[i]
            i += 1
        return None

    def max_in(self, interval):
        i = bisect_right(self.points, interval.hi) - 1
        while i >= 0 and self.points[i] >= interval.lo:
            if interval.contains(self.points[i]):
                return self.points[i]
            i -= 1
        return None


def dyadic_grid(level: int) -> FiniteGrid:
    """All j/2^level in [-1,1]."""
    den = 2**level
    return FiniteGrid([Q(j, den) for j in range(-den, den + 1)])


def mesh(grid: FiniteGrid, domain) -> object:
    """Largest gap between consecutive points of V with domain ends adjoined."""
    pts = sorted(set(grid.points) | {Q(domain.lo), Q(domain.hi)})
    return max(b - a for a, b in zip(pts, pts[1:]))


def v_close_points(x, y, grid: FiniteGrid) -> bool:
    """No grid point strictly between x and y."""
    return grid.count_strictly_between(x, y) == 0
