"""Seeded random generators for maps, grids and systems.

Used both by the test suite and by the ``prop-test`` CLI subcommand; each
checked case derives its own RNG from (seed, suite name, case index) so runs
are reproducible and shardable.
"""

from __future__ import annotations

import hashlib
import random

from .contour import has_well_defined_rcf, radial_contour_factor
from .grid import FiniteGrid
from .plmap import PLMap, SYMMETRIC, UNIT, Domain, compose
from .rational import Q, ZERO
from .truncation import trunc_has_wd_rcf


def case_rng(seed: int, suite: str, index: int) -> random.Random:
    digest = hashlib.blake2b(
        f"{seed}:{suite}:{index}".encode(), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def rational_in(rng: random.Random, lo: int, hi: int, max_den: int = 16):
    den = rng.randint(1, max_den)
    num = rng.randint(lo * den, hi * den)
    return Q(num, den)


def _breakpoint_count(rng: random.Random, cap: int) -> int:
    # skew small: most maps stay cheap, the tail exercises size limits
    if rng.random() < 0.9:
        return rng.randint(2, min(10, cap))
    return rng.randint(2, cap)


def random_plmap(
    rng: random.Random,
    domain: Domain = SYMMETRIC,
    max_breakpoints: int = 50,
    fix_zero: bool = True,
    nowhere_constant: bool = True,
    max_den: int = 16,
) -> PLMap:
    n = _breakpoint_count(rng, max_breakpoints)
    xs = {Q(domain.lo), Q(domain.hi)}
    while len(xs) < n + 1:
        xs.add(rational_in(rng, domain.lo, domain.hi, max_den))
    pin = fix_zero and domain.contains(ZERO)
    if pin:
        xs.add(ZERO)
    xs = sorted(xs)
    pts = []
    for i, x in enumerate(xs):
        if pin and x == ZERO:
            y = ZERO
        else:
            forbidden = set()
            if nowhere_constant:
                if pts:
                    forbidden.add(pts[-1][1])
                if pin and i + 1 < len(xs) and xs[i + 1] == ZERO:
                    forbidden.add(ZERO)
            y = rational_in(rng, -1, 1, max_den)
            while y in forbidden:
                y = rational_in(rng, -1, 1, max_den)
        pts.append((x, y))
    return PLMap(domain, pts)


def random_grid(
    rng: random.Random,
    max_points: int = 33,
    include_zero: bool = True,
    max_den: int = 16,
) -> FiniteGrid:
    n = rng.randint(1, max_points)
    pts = {rational_in(rng, -1, 1, max_den) for _ in range(n)}
    if include_zero:
        pts.add(ZERO)
    return FiniteGrid(pts)


def random_refinement(rng: random.Random, grid: FiniteGrid, extra: int = 6) -> FiniteGrid:
    pts = set(grid.points)
    for _ in range(rng.randint(0, extra)):
        pts.add(rational_in(rng, -1, 1, 16))
    return FiniteGrid(pts)


def _distinct_between(rng: random.Random, lo, hi, count: int) -> list:
    vals: set = set()
    while len(vals) < count:
        v = rational_in(rng, -1, 1)
        if lo < v < hi:
            vals.add(v)
    return sorted(vals)


def random_homeo(rng: random.Random, domain: Domain = SYMMETRIC, fix_zero: bool = True) -> PLMap:
    """Increasing PL self-homeomorphism; optionally pins 0 -> 0."""
    n = rng.randint(0, 4)
    xs = {Q(domain.lo), Q(domain.hi)}
    while len(xs) < n + 2:
        xs.add(rational_in(rng, domain.lo, domain.hi))
    pin_zero = fix_zero and domain.lo < 0
    if pin_zero:
        xs.add(ZERO)
    xs = sorted(xs)
    if pin_zero:
        k = xs.index(ZERO)
        ys = (
            [Q(domain.lo)]
            + _distinct_between(rng, Q(domain.lo), ZERO, k - 1)
            + [ZERO]
            + _distinct_between(rng, ZERO, Q(domain.hi), len(xs) - k - 2)
            + [Q(domain.hi)]
        )
    else:
        ys = (
            [Q(domain.lo)]
            + _distinct_between(rng, Q(domain.lo), Q(domain.hi), len(xs) - 2)
            + [Q(domain.hi)]
        )
    return PLMap(domain, list(zip(xs, ys)))


def random_map_with_wd_rcf(rng: random.Random, max_breakpoints: int = 50) -> PLMap:
    while True:
        f = random_plmap(rng, SYMMETRIC, max_breakpoints, fix_zero=True)
        if has_well_defined_rcf(f):
            return f


def random_trunc_ready(
    rng: random.Random, max_breakpoints: int = 30, max_grid: int = 16
):
    """A map and nested grids V in W with both truncations rcf-well-defined."""
    while True:
        f = random_plmap(rng, SYMMETRIC, max_breakpoints, fix_zero=True)
        V = random_grid(rng, max_grid, include_zero=True)
        if trunc_has_wd_rcf(f, V):
            W = random_refinement(rng, V)
            return f, V, W


def random_shared_factor_pair(rng: random.Random):
    """Two maps on [0,1] sharing a contour factor by construction."""
    from .contour import contour_factor

    f = random_plmap(rng, UNIT, 20, fix_zero=True)
    t = contour_factor(f)
    h = random_homeo(rng, UNIT, fix_zero=False)
    g = compose(t, h)
    return f, g


def random_system(
    rng: random.Random, n_maps: int, max_breakpoints: int = 4, max_den: int = 8
) -> list[PLMap]:
    """Short-lap bonding maps fixing 0 (composition growth stays tame)."""
    return [
        random_plmap(rng, SYMMETRIC, max_breakpoints, fix_zero=True, max_den=max_den)
        for _ in range(n_maps)
    ]


def random_radial_pair(rng: random.Random, g: PLMap):
    """A straddling pair, biased toward actual radial departures of g."""
    from .contour import departures

    if rng.random() < 0.5:
        right = departures(g.right_half()).runs
        left = departures(g.left_half_reflected()).runs
        if right and left:
            r = rng.choice(right)
            l = rng.choice(left)
            x2 = _pick_in(rng, r.x_interval)
            x1 = -_pick_in(rng, l.x_interval)
            return x1, x2
    x1 = rational_in(rng, -1, 0)
    while x1 == ZERO:
        x1 = rational_in(rng, -1, 0)
    x2 = rational_in(rng, 0, 1)
    while x2 == ZERO:
        x2 = rational_in(rng, 0, 1)
    return x1, x2


def _pick_in(rng: random.Random, interval):
    lo, hi = interval.lo, interval.hi
    t = Q(rng.randint(1, 8), 8)
    return lo + (hi - lo) * t
