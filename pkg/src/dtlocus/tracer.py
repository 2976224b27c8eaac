"""Whole-locus orchestration.

Seeds trajectories at open-loop poles (gain 0+) and inward boundary
crossings, advances each by predictor-corrector continuation until it hits a
branching point, the gain cap, the region boundary, or a step failure, then
respawns continuations out of branch points and finally mirrors the upper
half-plane picture onto the lower one (real-coefficient symmetry).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .boundary import (
    CrossingSet,
    RegionSpec,
    boundary_crossings,
    boundary_functions,
)
from .branch import BranchPoint, branch_points, redirect
from .continuation import (
    DELTA_NOM,
    H0,
    H_MAX,
    H_MIN,
    KAPPA_NOM,
    MAX_ITER,
    TOL_CORR,
    CorrectorOutcome,
    LocusPoint,
    StepController,
    _partials,
    correct,
    departure_angles,
    entry_direction_crossing,
    pole_group,
    predict,
    residuals,
    solve2,
    step_update,
    unit3,
)
from .errors import (
    BranchOnBoundary,
    InputError,
    SingularJacobian,
    SingularPointError,
    StepUnderflow,
)
from .plant import Plant, log_eval, wrap_angle

_AXIS_TOL = 1e-9
_SPAWN_ANGLE_TOL = 1e-6
_GAIN_GATE_REL = 1e-2
_FLAT_K_REL = 1e-9
_MATCH_OMEGA = 1e-4
_MATCH_K = 1e-3


@dataclass(frozen=True)
class PoleOrigin:
    index: int


@dataclass(frozen=True)
class CrossingOrigin:
    index: int


@dataclass(frozen=True)
class BranchOrigin:
    index: int
    angle: float


@dataclass(frozen=True)
class GainCap:
    pass


@dataclass(frozen=True)
class LeftRegion:
    matched: int | None


@dataclass(frozen=True)
class ReachedBranch:
    index: int


@dataclass(frozen=True)
class StepFailure:
    reason: str


@dataclass(frozen=True)
class Trajectory:
    """One traced locus branch, gain strictly increasing along points.

    start_marker carries the open-loop pole for pole-seeded trajectories;
    that point belongs to gain k = 0 which has no finite K, so it rides along
    outside the points list.
    """

    origin: PoleOrigin | CrossingOrigin | BranchOrigin
    points: tuple[LocusPoint, ...]
    termination: GainCap | LeftRegion | ReachedBranch | StepFailure
    mirrored: bool = False
    start_marker: complex | None = None


@dataclass(frozen=True)
class TraceOptions:
    tol_corr: float = TOL_CORR
    h0: float = H0
    h_min: float = H_MIN
    h_max: float = H_MAX
    max_iter: int = MAX_ITER
    kappa_nom: float = KAPPA_NOM
    delta_nom: float = DELTA_NOM
    mirror: bool = True
    max_steps: int = 20000
    negative_gains: bool = False


@dataclass(frozen=True)
class Seed:
    origin: PoleOrigin | CrossingOrigin | BranchOrigin
    start: LocusPoint
    direction: tuple[float, float, float]
    start_marker: complex | None = None


@dataclass(frozen=True)
class RootLocusResult:
    plant: Plant
    region: RegionSpec
    crossings: CrossingSet
    branch_points: tuple[BranchPoint, ...]
    trajectories: tuple[Trajectory, ...]
    warnings: tuple[str, ...]
    negative: "RootLocusResult | None" = None


def _polish_frozen_K(plant: Plant, sigma: float, omega: float, Kval: float, tol: float) -> LocusPoint:
    """Drive (M, P) to zero in (sigma, omega) at fixed gain."""
    for _ in range(12):
        try:
            M, P = residuals(plant, LocusPoint(sigma, omega, Kval))
            if max(abs(M), abs(P)) <= tol:
                break
            msig, mom = _partials(plant, sigma, omega)
            dx, dy = solve2(msig, mom, -mom, msig, -M, -P)
        except (SingularJacobian, SingularPointError, InputError):
            break
        sigma += dx
        omega += dy
    return LocusPoint(sigma, omega, Kval)


def _seed_from_ray(plant, origin, anchor: complex, theta: float, tol_corr: float,
                   lift_K: float, start_marker=None) -> Seed:
    """Seed one trajectory a small step along a ray from anchor.

    lift_K is the gain component of the initial lifted direction: 1 for pole
    departures (gain rises steeply off a pole), 0 for branch respawns (gain
    is stationary across a branch point).
    """
    dx, dy = math.cos(theta), math.sin(theta)
    if abs(dy) <= _SPAWN_ANGLE_TOL:
        dx, dy = math.copysign(1.0, dx), 0.0  # keep exactly on axis
    delta = 1e-3 * (1.0 + abs(anchor))
    s1 = anchor + delta * complex(dx, dy)
    K1 = -log_eval(plant, s1).lnmag
    start = _polish_frozen_K(plant, s1.real, s1.imag, K1, 0.01 * tol_corr)
    return Seed(origin, start, unit3((dx, dy, lift_K)), start_marker)


def seed_points(plant: Plant, region: RegionSpec, bf=None, crossings=None,
                options: TraceOptions | None = None) -> list[Seed]:
    """Initial trajectories: one per in-region pole ray, one per inward crossing.

    With mirroring on, seeds whose trajectory is the conjugate image of
    another are omitted; the mirror pass reinstates them.
    """
    options = options or TraceOptions()
    if bf is None:
        bf = boundary_functions(plant, region)
    if crossings is None:
        crossings = boundary_crossings(bf, region)

    seeds: list[Seed] = []
    for i, p in enumerate(plant.poles):
        group = pole_group(plant, i)
        if group[0] != i:
            continue  # one fan per distinct pole location
        if p.real < region.sigma0:
            continue
        if options.mirror and p.imag < -_AXIS_TOL:
            continue
        for theta in departure_angles(plant, i):
            if options.mirror and abs(p.imag) <= _AXIS_TOL and math.sin(theta) < -_AXIS_TOL:
                continue
            seeds.append(
                _seed_from_ray(plant, PoleOrigin(i), p, theta, options.tol_corr,
                               lift_K=1.0, start_marker=p)
            )
    for ci, c in enumerate(crossings.inward):
        d0 = entry_direction_crossing(plant, bf, c)
        seeds.append(
            Seed(
                CrossingOrigin(ci),
                LocusPoint(region.sigma0, c.omega, c.Kval),
                unit3((d0.real, d0.imag, 1.0)),
            )
        )
    return seeds


def _refine_frozen_sigma(plant, sigma0, omega, Kval, tol):
    """Newton in (omega, K) at fixed sigma; returns (point, refined?)."""
    w, K = omega, Kval
    for _ in range(20):
        try:
            M, P = residuals(plant, LocusPoint(sigma0, w, K))
            if max(abs(M), abs(P)) <= tol:
                return LocusPoint(sigma0, w, K), True
            msig, mom = _partials(plant, sigma0, w)
            dw, dK = solve2(mom, 1.0, msig, 0.0, -M, -P)
        except (SingularJacobian, SingularPointError, InputError):
            return LocusPoint(sigma0, omega, Kval), False
        w += dw
        K += dK
    return LocusPoint(sigma0, w, K), False


def _refine_gain_cap(plant, below: LocusPoint, above: LocusPoint, lnkmax: float, tol: float) -> LocusPoint:
    """Point with K exactly at the cap between two accepted points."""
    if abs(below.omega) <= _AXIS_TOL and abs(above.omega) <= _AXIS_TOL:
        # real axis: the magnitude residual is monotone along the segment
        def f(sig):
            return residuals(plant, LocusPoint(sig, 0.0, lnkmax))[0]

        a, b = below.sigma, above.sigma
        try:
            fa, fb = f(a), f(b)
            if (fa < 0.0) == (fb < 0.0):
                return LocusPoint(b, 0.0, lnkmax)
            while abs(b - a) > 1e-12 * (1.0 + abs(b)):
                m = 0.5 * (a + b)
                fm = f(m)
                if fm == 0.0:
                    a = b = m
                elif (fa < 0.0) == (fm < 0.0):
                    a, fa = m, fm
                else:
                    b, fb = m, fm
        except (SingularPointError, InputError):
            pass
        return LocusPoint(0.5 * (a + b), 0.0, lnkmax)

    t = (lnkmax - below.Kval) / (above.Kval - below.Kval)
    sig = below.sigma + t * (above.sigma - below.sigma)
    w = below.omega + t * (above.omega - below.omega)
    for _ in range(20):
        try:
            M, P = residuals(plant, LocusPoint(sig, w, lnkmax))
            if max(abs(M), abs(P)) <= tol:
                break
            msig, mom = _partials(plant, sig, w)
            dx, dy = solve2(msig, mom, -mom, msig, -M, -P)
        except (SingularJacobian, SingularPointError, InputError):
            break
        sig += dx
        w += dy
    return LocusPoint(sig, w, lnkmax)


def _match_outward(point: LocusPoint, w_out, claimed: set[int]) -> int | None:
    """Nearest unclaimed outward crossing within tolerance, else None."""
    best, best_score = None, math.inf
    for wi, c in enumerate(w_out):
        if wi in claimed:
            continue
        dw = abs(abs(point.omega) - c.omega)
        dK = abs(point.Kval - c.Kval)
        if dw <= _MATCH_OMEGA and dK <= _MATCH_K:
            score = dw + dK
            if score < best_score:
                best, best_score = wi, score
    if best is not None:
        claimed.add(best)
    return best


def trace(plant: Plant, region: RegionSpec, seed: Seed, branches,
          w_out, options: TraceOptions | None = None,
          claimed: set[int] | None = None) -> Trajectory:
    """Advance one seed to its termination.

    Every accepted corrector point is screened in order for: branch capture
    (distance and gain both inside their windows), region exit (sigma below
    the boundary), gain cap, and gain monotonicity.  Gain-flat accepted
    points advance the cursor without being recorded so the stored gain
    strictly increases.
    """
    options = options or TraceOptions()
    claimed = claimed if claimed is not None else set()
    lnkmax = region.lnkmax

    points: list[LocusPoint] = [seed.start]
    cursor = seed.start
    d = seed.direction
    ctl = StepController(h=options.h0, kappa_nom=options.kappa_nom,
                         delta_nom=options.delta_nom, h_min=options.h_min,
                         h_max=options.h_max)
    origin_branch = seed.origin.index if isinstance(seed.origin, BranchOrigin) else None
    escaped = origin_branch is None

    def finish(termination):
        return Trajectory(seed.origin, tuple(points), termination,
                          start_marker=seed.start_marker)

    for _ in range(options.max_steps):
        predicted = predict(cursor, d, ctl.h)
        try:
            out = correct(plant, predicted, d, options.tol_corr, options.max_iter)
        except (SingularJacobian, SingularPointError, InputError):
            out = CorrectorOutcome(predicted, options.max_iter, math.inf, math.inf, False)
        h_used = ctl.h
        if out.converged:
            # leash: a converged point far from the prediction is a basin
            # escape onto another sheet, not a continuation of this one
            disp = math.hypot(abs(out.point.s - predicted.s), out.point.Kval - predicted.Kval)
            if disp > 10.0 * h_used * (1.0 + abs(cursor.s)):
                out = CorrectorOutcome(out.point, out.iterations, math.inf, math.inf, False)
        try:
            new_h, repeat = step_update(ctl, out)
        except StepUnderflow as e:
            return finish(StepFailure(f"step underflow: {e}"))
        ctl = replace(ctl, h=new_h)
        if repeat:
            continue
        c = out.point

        # branch capture: the step's gain window brackets a branch gain and
        # the path, interpolated to that gain, passes by the branch point
        captured = None
        best_dist = math.inf
        for bi, bp in enumerate(branches):
            if not bp.active:
                continue
            tol_Kb = _GAIN_GATE_REL * (1.0 + abs(bp.Kval))
            r_cap = max(h_used, 1e-3) * (1.0 + abs(bp.s))
            if bi == origin_branch and not escaped:
                if abs(c.s - bp.s) > r_cap or c.Kval > bp.Kval + 2.0 * tol_Kb:
                    escaped = True
                else:
                    continue
            if cursor.Kval > bp.Kval + tol_Kb or c.Kval < bp.Kval - tol_Kb:
                continue
            span = c.Kval - cursor.Kval
            t = (bp.Kval - cursor.Kval) / span if span > 0.0 else 0.0
            t = min(max(t, 0.0), 1.0)
            pos = cursor.s + t * (c.s - cursor.s)
            dist = abs(pos - bp.s)
            if dist <= r_cap and dist < best_dist:
                captured, best_dist = bi, dist
        if captured is not None:
            bp = branches[captured]
            kept = [pt for pt in points if pt.Kval < bp.Kval - 1e-12]
            if kept:
                kept.append(LocusPoint(bp.s.real, bp.s.imag, bp.Kval))
                points = kept
                return finish(ReachedBranch(captured))
            # no below-gain history: treat as a graze, keep going

        if c.sigma < region.sigma0:
            span = c.sigma - cursor.sigma
            t = (region.sigma0 - cursor.sigma) / span if span != 0.0 else 1.0
            w0 = cursor.omega + t * (c.omega - cursor.omega)
            K0 = cursor.Kval + t * (c.Kval - cursor.Kval)
            exit_pt, refined = _refine_frozen_sigma(plant, region.sigma0, w0, K0, options.tol_corr)
            if not (refined and exit_pt.Kval > lnkmax):
                if exit_pt.Kval > points[-1].Kval:
                    points.append(exit_pt)
                return finish(LeftRegion(_match_outward(points[-1], w_out, claimed)))
            # the cap is reached before the boundary: fall through

        if c.Kval > lnkmax or (c.sigma < region.sigma0):
            cap_pt = _refine_gain_cap(plant, cursor, c, lnkmax, options.tol_corr)
            if cap_pt.Kval > points[-1].Kval:
                points.append(cap_pt)
            return finish(GainCap())

        dK = c.Kval - cursor.Kval
        if dK <= 0.0:
            if dK <= -_FLAT_K_REL * (1.0 + abs(c.Kval)):
                return finish(StepFailure(f"gain reversal at step {len(points)}: dK={dK:.3e}"))
            # flat in gain: move the cursor, record nothing
            try:
                d = unit3((c.sigma - cursor.sigma, c.omega - cursor.omega, dK))
            except InputError:
                pass
            cursor = c
            continue

        try:
            d = unit3((c.sigma - cursor.sigma, c.omega - cursor.omega, dK))
        except InputError:
            pass
        cursor = c
        if c.Kval > points[-1].Kval:
            points.append(c)

    return finish(StepFailure(f"step budget of {options.max_steps} exhausted"))


def _conj_index(items, value: complex) -> int:
    target = value.conjugate()
    return min(range(len(items)), key=lambda i: abs(items[i] - target))


def _mirror_trajectory(plant: Plant, branches, traj: Trajectory) -> Trajectory:
    origin = traj.origin
    if isinstance(origin, PoleOrigin):
        origin = PoleOrigin(_conj_index(list(plant.poles), plant.poles[origin.index]))
    elif isinstance(origin, BranchOrigin):
        bi = _conj_index([b.s for b in branches], branches[origin.index].s)
        origin = BranchOrigin(bi, wrap_angle(-origin.angle))
    termination = traj.termination
    if isinstance(termination, ReachedBranch):
        termination = ReachedBranch(
            _conj_index([b.s for b in branches], branches[termination.index].s)
        )
    return Trajectory(
        origin=origin,
        points=tuple(LocusPoint(p.sigma, -p.omega, p.Kval) for p in traj.points),
        termination=termination,
        mirrored=True,
        start_marker=traj.start_marker.conjugate() if traj.start_marker is not None else None,
    )


def _dedup(trajectories: list[Trajectory]) -> list[Trajectory]:
    """Drop a trajectory when another of the same ending reaches the same
    final point; distinct arrivals at one branch point are kept apart
    (their shared endpoint is the snap, not a duplication)."""
    drop: set[int] = set()
    for i in range(len(trajectories)):
        if i in drop:
            continue
        ti = trajectories[i]
        if isinstance(ti.termination, ReachedBranch):
            continue
        for j in range(i + 1, len(trajectories)):
            if j in drop:
                continue
            tj = trajectories[j]
            if type(ti.termination) is not type(tj.termination):
                continue
            a, b = ti.points[-1], tj.points[-1]
            sep = max(abs(a.sigma - b.sigma), abs(a.omega - b.omega), abs(a.Kval - b.Kval))
            if sep <= 1e-8:
                drop.add(j if len(tj.points) <= len(ti.points) else i)
    return [t for i, t in enumerate(trajectories) if i not in drop]


def run(plant: Plant, region: RegionSpec, options: TraceOptions | None = None) -> RootLocusResult:
    """Complete root locus for the plant inside the region.

    With negative_gains set, a second pass runs with the plant gain sign
    flipped (the locus of negative k values) and lands in result.negative.
    """
    options = options or TraceOptions()
    result = _run_signed(plant, region, options)
    if options.negative_gains:
        neg = _run_signed(plant.flipped_gain(), region, replace(options, negative_gains=False))
        result = replace(result, negative=neg)
    return result


def _run_signed(plant: Plant, region: RegionSpec, options: TraceOptions) -> RootLocusResult:
    bf = boundary_functions(plant, region)
    branches = tuple(branch_points(plant, region))
    for bp in branches:
        if bp.active and abs(bp.s.real - region.sigma0) <= 1e-9 * (1.0 + abs(bp.s)):
            raise BranchOnBoundary(
                f"branch point {bp.s} sits on the line Re(s) = {region.sigma0}; "
                "crossing directions are ill-posed there"
            )
    crossings = boundary_crossings(bf, region)

    claimed: set[int] = set()
    trajectories: list[Trajectory] = []
    queue = seed_points(plant, region, bf, crossings, options)
    spawned: dict[int, list[float]] = {}

    rounds = 0
    while queue and rounds < 64:
        rounds += 1
        arrivals: list[tuple[int, float]] = []
        for seed in queue:
            traj = trace(plant, region, seed, branches, crossings.outward, options, claimed)
            trajectories.append(traj)
            if isinstance(traj.termination, ReachedBranch):
                bp = branches[traj.termination.index]
                ref = traj.points[-2] if len(traj.points) >= 2 else seed.start
                vec = bp.s - ref.s
                if abs(vec) > 0.0:
                    arrivals.append((traj.termination.index, math.atan2(vec.imag, vec.real)))

        specs: list[tuple[float, int, float]] = []
        for bi, theta_in in arrivals:
            bp = branches[bi]
            outs = [redirect(theta_in, bp.multiplicity)]
            real_branch = abs(bp.s.imag) <= _AXIS_TOL
            if options.mirror and real_branch and abs(math.sin(theta_in)) > _SPAWN_ANGLE_TOL:
                # the untraced conjugate arrival redirects too
                outs.append(redirect(wrap_angle(-theta_in), bp.multiplicity))
            for theta_out in outs:
                if options.mirror and real_branch and math.sin(theta_out) < -_SPAWN_ANGLE_TOL:
                    continue
                known = spawned.setdefault(bi, [])
                if any(abs(wrap_angle(theta_out - a)) <= _SPAWN_ANGLE_TOL for a in known):
                    continue
                known.append(theta_out)
                specs.append((bp.Kval, bi, theta_out))
        specs.sort()
        queue = [
            _seed_from_ray(plant, BranchOrigin(bi, theta), branches[bi].s, theta,
                           options.tol_corr, lift_K=0.0)
            for _, bi, theta in specs
        ]

    trajectories = _dedup(trajectories)

    warnings: list[str] = []
    for traj in trajectories:
        if isinstance(traj.termination, LeftRegion) and traj.termination.matched is None:
            p = traj.points[-1]
            warnings.append(
                f"region exit at omega={p.omega:.6g}, k={math.exp(p.Kval):.6g} "
                "has no matching outward crossing"
            )
    if options.mirror:
        mirrored: list[Trajectory] = []
        for traj in trajectories:
            mirrored.append(traj)
            if any(abs(p.omega) > _AXIS_TOL for p in traj.points):
                mirrored.append(_mirror_trajectory(plant, branches, traj))
        trajectories = mirrored

    for bi, bp in enumerate(branches):
        if not bp.active:
            continue
        arr = sum(
            1 for t in trajectories
            if isinstance(t.termination, ReachedBranch) and t.termination.index == bi
        )
        dep = sum(
            1 for t in trajectories
            if isinstance(t.origin, BranchOrigin) and t.origin.index == bi
        )
        if arr < bp.multiplicity or dep < bp.multiplicity:
            warnings.append(
                f"branch point at {bp.s.real:.6g}{bp.s.imag:+.6g}j expects "
                f"{bp.multiplicity} arrivals and departures, traced {arr} and {dep}"
            )

    return RootLocusResult(
        plant=plant,
        region=region,
        crossings=crossings,
        branch_points=branches,
        trajectories=tuple(trajectories),
        warnings=tuple(warnings),
        negative=None,
    )
