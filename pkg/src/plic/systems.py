"""Finite inverse-system prefixes and the recursive stage construction.

Everything here is a desk-scale analogue of machinery that, in full
generality, quantifies over infinite index sets: infinite subsets become
finite index windows with explicit exhaustion errors, and the pigeonhole
over an infinite family becomes largest-group selection over the window.
A window pass does not certify any infinite hypothesis; reports carry the
window size so that limitation stays visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .contour import Census, orientation_census, radial_contour_factor
from .errors import (
    DiameterGuardFailed,
    EndpointCoordinate,
    FixedPointViolated,
    IndexOutOfRange,
    InvariantViolation,
    LadderExhausted,
    LengthMismatch,
    NotAThread,
    PreconditionViolated,
    WindowTooShort,
)
from .factorization import bridged_s
from .grid import FiniteGrid, dyadic_grid, mesh
from .plmap import (
    PLMap,
    SYMMETRIC,
    compose,
    conjugate,
    preimage_finite,
    sup_deviation,
)
from .rational import ONE, Q, ZERO, format_rational
from .truncation import trunc_has_wd_rcf, truncate


@dataclass(frozen=True)
class InverseSystemPrefix:
    """Bonding maps f_1, ..., f_N, each [-1,1] -> [-1,1]."""

    maps: tuple[PLMap, ...]

    def __post_init__(self):
        for i, f in enumerate(self.maps):
            if f.domain != SYMMETRIC:
                raise PreconditionViolated(f"map {i + 1} not on [-1,1]")

    def __len__(self):
        return len(self.maps)

    @property
    def nowhere_constant(self) -> tuple[bool, ...]:
        return tuple(f.is_nowhere_constant() for f in self.maps)

    def require_fix_zero(self) -> None:
        for i, f in enumerate(self.maps):
            if f.eval(ZERO) != ZERO:
                raise FixedPointViolated(f"map {i + 1} does not fix 0")


def compose_range(sys: InverseSystemPrefix, j: int, l: int) -> PLMap:
    """f_j^l = f_j o ... o f_{l-1}; the identity when j = l."""
    n = len(sys)
    if not 1 <= j <= l <= n + 1:
        raise IndexOutOfRange(f"need 1 <= {j} <= {l} <= {n + 1}")
    out = PLMap.identity(SYMMETRIC)
    for i in range(l - 1, j - 1, -1):
        out = compose(sys.maps[i - 1], out)
    return out


class _RangeCache:
    """Memoized f_j^l over one system, composed right to left."""

    def __init__(self, sys: InverseSystemPrefix):
        self.sys = sys
        self.cache: dict[tuple[int, int], PLMap] = {}

    def get(self, j: int, l: int) -> PLMap:
        key = (j, l)
        if key not in self.cache:
            if j == l:
                self.cache[key] = PLMap.identity(SYMMETRIC)
            else:
                self.cache[key] = compose(self.sys.maps[j - 1], self.get(j + 1, l))
        return self.cache[key]


def normalize_point_to_zero(sys: InverseSystemPrefix, coords) -> InverseSystemPrefix:
    """Conjugate so every map fixes 0, moving the given thread to zeros."""
    coords = list(coords)
    if len(coords) != len(sys) + 1:
        raise LengthMismatch(
            f"need {len(sys) + 1} thread coordinates, got {len(coords)}"
        )
    for i, f in enumerate(sys.maps):
        if f.eval(coords[i + 1]) != coords[i]:
            raise NotAThread(i + 1)
    for x in coords:
        if x == ONE or x == -ONE:
            raise EndpointCoordinate(f"coordinate {format_rational(x)} is an endpoint")
    homeos = [
        PLMap(SYMMETRIC, [(-1, -1), (x, 0), (1, 1)])
        if x != ZERO
        else PLMap.identity(SYMMETRIC)
        for x in coords
    ]
    return InverseSystemPrefix(
        tuple(
            conjugate(f, homeos[i], homeos[i + 1]) for i, f in enumerate(sys.maps)
        )
    )


@dataclass(frozen=True)
class DeviationRow:
    j: int
    k: int
    l: int
    dev_forward: object  # sup |f_j^l - f_j^k o g_k^l|
    dev_backward: object  # sup |g_j^l - g_j^k o f_k^l|
    bound: object | None
    passed: bool | None


@dataclass(frozen=True)
class MioReport:
    rows: tuple[DeviationRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.rows if r.passed is not None)

    def worst(self):
        devs = [max(r.dev_forward, r.dev_backward) for r in self.rows]
        return max(devs) if devs else ZERO

    def first_failure(self) -> DeviationRow | None:
        for r in self.rows:
            if r.passed is False:
                return r
        return None


def mioduszewski_report(
    sysF: InverseSystemPrefix, sysG: InverseSystemPrefix, eps
) -> MioReport:
    """Exact sup-deviations of the two almost-commutativity conditions for
    every j <= k <= l, judged against eps[k-1] where that entry is not None."""
    if len(sysF) != len(sysG):
        raise LengthMismatch(f"{len(sysF)} maps vs {len(sysG)}")
    n = len(sysF)
    eps = list(eps)
    if len(eps) < n + 1:
        eps = eps + [None] * (n + 1 - len(eps))
    F = _RangeCache(sysF)
    G = _RangeCache(sysG)
    rows = []
    for j in range(1, n + 2):
        for k in range(j, n + 2):
            for l in range(k, n + 2):
                d1 = sup_deviation(F.get(j, l), compose(F.get(j, k), G.get(k, l)))
                d2 = sup_deviation(G.get(j, l), compose(G.get(j, k), F.get(k, l)))
                bound = eps[k - 1]
                passed = None if bound is None else (d1 <= bound and d2 <= bound)
                rows.append(DeviationRow(j, k, l, d1, d2, bound, passed))
    return MioReport(tuple(rows))


@dataclass(frozen=True)
class NearlyConstantResult:
    applicable: bool
    obstruction_index: int | None
    stage_indices: tuple[int, ...] | None
    composed: InverseSystemPrefix | None  # the F_k row
    transformed: InverseSystemPrefix | None  # the g_k row, 0 on [0,1]
    report: MioReport | None


def _sup_abs_on_unit(f: PLMap):
    img = f.image_on(ZERO, ONE)
    return max(abs(img.lo), abs(img.hi))


def nearly_constant_transform(
    sys: InverseSystemPrefix, eps_schedule
) -> NearlyConstantResult:
    """Detect the finite-depth contraction of the right half and, if it holds
    along the whole schedule, rebuild the prefix with maps collapsing [0,1]
    to 0; NotApplicable is a value (applicable=False), not an error."""
    sys.require_fix_zero()
    eps_schedule = list(eps_schedule)
    if not eps_schedule:
        raise PreconditionViolated("empty contraction schedule")
    n = len(sys)
    cache = _RangeCache(sys)
    indices = [1]
    stages = len(eps_schedule)
    for l in range(2, stages + 2):
        found = None
        for cand in range(indices[-1] + 1, n + 2):
            ok = True
            for j_pos, i_j in enumerate(indices, start=1):
                needed = min(
                    eps_schedule[k - 1] for k in range(j_pos, l) if k - 1 < len(eps_schedule)
                )
                if not _sup_abs_on_unit(cache.get(i_j, cand)) < needed:
                    ok = False
                    break
            if ok:
                found = cand
                break
        if found is None:
            return NearlyConstantResult(False, indices[-1], None, None, None, None)
        indices.append(found)
    F_row = [cache.get(a, b) for a, b in zip(indices, indices[1:])]
    g_row = []
    for Fk in F_row:
        pts = [(x, y) for x, y in Fk.points if x < ZERO]
        pts.extend([(ZERO, ZERO), (ONE, ZERO)])
        g_row.append(PLMap(SYMMETRIC, pts))
    sysF = InverseSystemPrefix(tuple(F_row))
    sysG = InverseSystemPrefix(tuple(g_row))
    report = mioduszewski_report(sysF, sysG, eps_schedule)
    return NearlyConstantResult(True, None, tuple(indices), sysF, sysG, report)


@dataclass(frozen=True)
class PigeonholeGroup:
    factor: PLMap
    members: tuple[PLMap, ...]
    member_keys: tuple


def pigeonhole_contour_group(family, grid: FiniteGrid, keys=None) -> PigeonholeGroup:
    """Group by the radial contour factor of the truncation; largest group
    wins, first-encountered on ties."""
    family = list(family)
    keys = list(keys) if keys is not None else list(range(len(family)))
    groups: dict[PLMap, list[int]] = {}
    order: list[PLMap] = []
    for pos, f in enumerate(family):
        if not trunc_has_wd_rcf(f, grid):
            raise PreconditionViolated(
                f"member {keys[pos]}: truncation lacks well-defined radial contour factor"
            )
        t = radial_contour_factor(truncate(f, grid))
        if t not in groups:
            groups[t] = []
            order.append(t)
        groups[t].append(pos)
    best = max(order, key=lambda t: len(groups[t]))
    sel = groups[best]
    return PigeonholeGroup(
        best, tuple(family[p] for p in sel), tuple(keys[p] for p in sel)
    )


@dataclass(frozen=True)
class GridLadder:
    """Dyadic refinement schedule starting from a base grid."""

    start_level: int = 1
    max_rungs: int = 12

    def rungs(self, base: FiniteGrid):
        for m in range(self.start_level, self.start_level + self.max_rungs):
            yield base.union(dyadic_grid(m))


@dataclass(frozen=True)
class SelectionResult:
    grid: FiniteGrid
    members: tuple[PLMap, ...]
    member_keys: tuple
    factor: PLMap
    rung: int
    achieved_mesh: object


def select_V_and_subfamily(
    family,
    base_grid: FiniteGrid,
    delta,
    ladder: GridLadder | None = None,
    keys=None,
    grid_ok=None,
    min_group: int = 1,
) -> SelectionResult:
    """Walk the refinement ladder until the surviving group's common factor t
    satisfies mesh(t^{-1}(V)) < delta; LadderExhausted reports the best mesh
    reached (a finite family cannot guarantee success)."""
    family = list(family)
    ladder = ladder or GridLadder()
    best_mesh = None
    for rung, grid in enumerate(ladder.rungs(base_grid)):
        if not all(trunc_has_wd_rcf(f, grid) for f in family):
            continue
        if grid_ok is not None and not grid_ok(grid):
            continue
        group = pigeonhole_contour_group(family, grid, keys)
        if len(group.members) < min_group:
            continue
        m = mesh(preimage_finite(group.factor, grid), SYMMETRIC)
        if best_mesh is None or m < best_mesh:
            best_mesh = m
        if m < delta:
            return SelectionResult(
                grid, group.members, group.member_keys, group.factor, rung, m
            )
    raise LadderExhausted(best_mesh)


@dataclass(frozen=True)
class StagePolicy:
    family_span: int = 12  # cap on composition depth within one stage family
    ladder: GridLadder = field(default_factory=GridLadder)
    initial_grid_points: tuple = (-1, 0, 1)
    min_group: int = 3  # smallest usable first pigeonhole group


@dataclass(frozen=True)
class StageState:
    k: int
    J: tuple[int, ...]  # J(k), J(k+1), J(k+2), then the retained tail
    V_k: FiniteGrid
    V_next: FiniteGrid  # V_{k+1} = F_k^{-1}(V_k)
    V_prime_next: FiniteGrid  # V'_{k+2} = F_{k+1}^{-1}(V_{k+1})
    F_k: PLMap
    F_next: PLMap  # F_{k+1}
    t_k: PLMap
    t_prime_next: PLMap  # t'_{k+2}
    s_bridge: PLMap
    eps_k: object
    delta_k: object
    window_size: int
    stage_starts: tuple[tuple[int, int], ...]  # (stage index, J_stage(stage))
    prior_lipschitz: tuple  # max |slope| of every s built so far, incl. this


def _gap_intervals(grid: FiniteGrid):
    pts = sorted(set(grid.points) | {Q(-1), ONE})
    return list(zip(pts, pts[1:]))


def build_stage(
    sys: InverseSystemPrefix,
    prev: StageState | None,
    delta_k,
    policy: StagePolicy | None = None,
) -> StageState:
    """One odd stage of the recursive construction.

    Selects the grid and index window by pigeonhole, takes preimage grids
    down the chain, and produces the bridging map; every numbered property
    the stage promises is re-checkable from the returned state alone via
    ``validate_stage``.
    """
    policy = policy or StagePolicy()
    sys.require_fix_zero()
    if not all(sys.nowhere_constant):
        raise PreconditionViolated("stage construction needs nowhere-constant maps")
    n = len(sys)
    cache = _RangeCache(sys)

    if prev is None:
        k = 1
        base_point = 1
        window = list(range(2, n + 2))
        v_base = FiniteGrid([Q(p) for p in policy.initial_grid_points])
        stage_starts: tuple = ()
        prior_lip: tuple = ()
    else:
        k = prev.k + 2
        base_point = prev.J[2]
        window = [m for m in prev.J[3:] if m > base_point]
        v_base = prev.V_prime_next
        stage_starts = prev.stage_starts
        prior_lip = prev.prior_lipschitz

    window = window[: policy.family_span]
    if len(window) < 4:
        raise WindowTooShort(
            f"stage {k}: window {window} cannot supply J(k+1..k+3) plus a tail"
        )

    family = [cache.get(base_point, m) for m in window]
    for m, f in zip(window, family):
        if all(y == f.right_half().ys[0] for y in f.right_half().ys) or all(
            y == f.left_half_reflected().ys[0] for y in f.left_half_reflected().ys
        ):
            raise DiameterGuardFailed(
                f"f_{base_point}^{m} is constant on a half; no grid can work"
            )

    lip = max([ONE, *prior_lip])
    eps_k = delta_k / lip
    starts_here = stage_starts + ((k, base_point),)
    lipschitz = {
        start: cache.get(start, base_point).max_abs_slope() for _, start in starts_here
    }

    def grid_ok(grid: FiniteGrid) -> bool:
        # diameter property: every grid gap must map small under each F_j^k;
        # j = k reduces to mesh(V) < eps_k, so check that first, and a global
        # Lipschitz bound settles most maps without walking the gaps
        m = mesh(grid, SYMMETRIC)
        if not m < eps_k:
            return False
        gaps = None
        for _, start in starts_here:
            if lipschitz[start] * m < eps_k:
                continue
            Fjk = cache.get(start, base_point)
            if gaps is None:
                gaps = _gap_intervals(grid)
            for a, b in gaps:
                if not Fjk.image_on(a, b).diameter() < eps_k:
                    return False
        return True

    sel = select_V_and_subfamily(
        family, v_base, delta_k, policy.ladder, keys=window, grid_ok=grid_ok,
        min_group=policy.min_group,
    )
    V_k, t_k = sel.grid, sel.factor
    group1 = list(sel.member_keys)

    J_k1 = group1[0]
    F_k = cache.get(base_point, J_k1)
    V_next = preimage_finite(F_k, V_k)

    fam2_keys = [m for m in group1 if m > J_k1]
    group2 = pigeonhole_contour_group(
        [cache.get(J_k1, m) for m in fam2_keys], V_next, keys=fam2_keys
    )
    if len(group2.member_keys) < 2:
        raise WindowTooShort(f"stage {k}: second contour group too small")
    J_k2 = group2.member_keys[0]
    F_next = cache.get(J_k1, J_k2)
    V_prime_next = preimage_finite(F_next, V_next)

    fam3_keys = [m for m in group2.member_keys if m > J_k2]
    group3 = pigeonhole_contour_group(
        [cache.get(J_k2, m) for m in fam3_keys], V_prime_next, keys=fam3_keys
    )
    if not group3.member_keys:
        raise WindowTooShort(f"stage {k}: third contour group empty")
    J_k3 = group3.member_keys[0]
    t_prime_next = group3.factor

    f1 = truncate(F_k, V_k)
    f2 = truncate(F_next, V_next)
    f3 = truncate(cache.get(J_k2, J_k3), V_prime_next)
    s = bridged_s(f1, f2, f3)

    return StageState(
        k=k,
        J=(base_point, J_k1, J_k2) + tuple(group3.member_keys),
        V_k=V_k,
        V_next=V_next,
        V_prime_next=V_prime_next,
        F_k=F_k,
        F_next=F_next,
        t_k=t_k,
        t_prime_next=t_prime_next,
        s_bridge=s,
        eps_k=eps_k,
        delta_k=delta_k,
        window_size=len(window),
        stage_starts=starts_here,
        prior_lipschitz=prior_lip + (s.max_abs_slope(),),
    )


def validate_stage(sys: InverseSystemPrefix, stage: StageState) -> list[str]:
    """Re-check every stored stage invariant from scratch; returns the list
    of violated properties (empty = all good)."""
    bad = []
    cache = _RangeCache(sys)
    if cache.get(stage.J[0], stage.J[1]) != stage.F_k:
        bad.append("F_k mismatch with the raw system")
    if cache.get(stage.J[1], stage.J[2]) != stage.F_next:
        bad.append("F_{k+1} mismatch with the raw system")
    if preimage_finite(stage.F_k, stage.V_k) != stage.V_next:
        bad.append("V_{k+1} is not the preimage grid of V_k")
    if preimage_finite(stage.F_next, stage.V_next) != stage.V_prime_next:
        bad.append("V'_{k+2} is not the preimage grid of V_{k+1}")
    if radial_contour_factor(truncate(stage.F_k, stage.V_k)) != stage.t_k:
        bad.append("t_k is not the contour factor of the truncation")
    lhs = compose(stage.t_k, stage.s_bridge)
    rhs = compose(
        truncate(stage.F_k, stage.V_k), truncate(stage.F_next, stage.V_next)
    )
    if lhs != rhs:
        bad.append("bridge identity t_k o s = trunc(F_k) o trunc(F_{k+1}) fails")
    if not mesh(preimage_finite(stage.t_k, stage.V_k), SYMMETRIC) < stage.delta_k:
        bad.append("mesh(t_k^{-1}(V_k)) >= delta_k")
    cen = orientation_census(compose(stage.s_bridge, stage.t_prime_next))
    if cen not in (Census.NONE, Census.ALL_POSITIVE):
        bad.append("s o t'_{k+2} has a negative radial departure")
    if stage.s_bridge.eval(ZERO) != ZERO:
        bad.append("bridge map moves 0")
    return bad


@dataclass(frozen=True)
class CensusEntry:
    label: str
    census: Census
    ok: bool
    witness: tuple | None


@dataclass(frozen=True)
class ClaimReport:
    claim1: MioReport
    claim2: MioReport | None
    claim3: tuple[CensusEntry, ...]
    stage_issues: tuple[tuple[int, tuple[str, ...]], ...]

    @property
    def ok(self) -> bool:
        return (
            self.claim1.ok
            and (self.claim2 is None or self.claim2.ok)
            and all(e.ok for e in self.claim3)
            and all(not issues for _, issues in self.stage_issues)
        )


def _census_entry(label: str, f: PLMap) -> CensusEntry:
    from .contour import radial_departures

    cen = orientation_census(f)
    ok = cen in (Census.NONE, Census.ALL_POSITIVE)
    witness = None
    if not ok:
        rect = radial_departures(f).negative[0]
        witness = (
            (format_rational(rect.y1.lo), format_rational(rect.y1.hi)),
            (format_rational(rect.y2.lo), format_rational(rect.y2.hi)),
        )
    return CensusEntry(label, cen, ok, witness)


def verify_claims(sys: InverseSystemPrefix, stages) -> ClaimReport:
    """Check the three claims of the construction, independently of how the
    stages were built: rows 1-2 by Mioduszewski deviations at the stage
    epsilons, rows 3-4 at the deltas, and the no-negative-departures census
    for every constructible bridged composite."""
    stages = list(stages)
    if not stages:
        raise PreconditionViolated("no stages to verify")
    for a, b in zip(stages, stages[1:]):
        if b.J[0] != a.J[2]:
            raise PreconditionViolated(
                f"stages {a.k} and {b.k} do not chain (J windows disagree)"
            )

    # rows 1-2: F-row vs its truncations
    F_row = []
    V_row = []
    eps_row = []
    for st in stages:
        F_row.extend([st.F_k, st.F_next])
        V_row.extend([st.V_k, st.V_next])
        eps_row.extend([st.eps_k, None])
    G_row = [truncate(F, V) for F, V in zip(F_row, V_row)]
    claim1 = mioduszewski_report(
        InverseSystemPrefix(tuple(F_row)), InverseSystemPrefix(tuple(G_row)), eps_row
    )

    # rows 3-4: phi_k = s o t_{k+2} vs gamma_k = s o trunc(t_{k+2}, V'_{k+2})
    phi = []
    gamma = []
    delta_row = []
    for st, nxt in zip(stages, stages[1:]):
        phi.append(compose(st.s_bridge, nxt.t_k))
        gamma.append(compose(st.s_bridge, truncate(nxt.t_k, st.V_prime_next)))
        delta_row.append(st.delta_k)
    claim2 = None
    if phi:
        claim2 = mioduszewski_report(
            InverseSystemPrefix(tuple(phi)), InverseSystemPrefix(tuple(gamma)), delta_row
        )

    # claim 3: censuses
    entries = []
    for st in stages:
        entries.append(
            _census_entry(
                f"s_{st.k},{st.k + 1} o t'_{st.k + 2}",
                compose(st.s_bridge, st.t_prime_next),
            )
        )
    for st, nxt in zip(stages, stages[1:]):
        entries.append(
            _census_entry(
                f"s_{st.k},{st.k + 1} o trunc(t_{nxt.k}, V'_{nxt.k})",
                compose(st.s_bridge, truncate(nxt.t_k, st.V_prime_next)),
            )
        )

    issues = tuple((st.k, tuple(validate_stage(sys, st))) for st in stages)
    return ClaimReport(claim1, claim2, tuple(entries), issues)
