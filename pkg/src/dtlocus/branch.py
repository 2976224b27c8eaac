"""Branching points: locations where locus trajectories collide and split.

A branching point is a multiple root of 1 + k*G(s)e^(-hs), i.e. a point where
the delayed plant's log-derivative equals zero while the point itself sits on
the locus.  Candidates are polynomial roots (the delay folds into a
polynomial after clearing denominators); membership is a phase test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .boundary import RegionSpec
from .errors import InputError, SingularPointError
from .plant import Plant, branch_numerator, log_eval, wrap_angle
from .poly import complex_roots

TOL_PHASE = 1e-6


@dataclass(frozen=True)
class BranchPoint:
    """A locus point of multiplicity N >= 2 inside the region.

    `active` marks branch points reachable under the gain cap; inactive ones
    are kept for diagnostics but never traced into.
    """

    s: complex
    k: float
    Kval: float
    multiplicity: int
    active: bool


def redirect(incoming_angle: float, multiplicity: int) -> float:
    """Outgoing trajectory angle after passing through a branch point.

    The direction continues straight for odd multiplicity and rotates by
    -pi/N for even N; the result is reduced to (-pi, pi].
    """
    if multiplicity < 2:
        raise InputError(f"redirect needs multiplicity >= 2, got {multiplicity}")
    if multiplicity % 2 == 1:
        return wrap_angle(incoming_angle)
    return wrap_angle(incoming_angle - math.pi / multiplicity)


def branch_points(plant: Plant, region: RegionSpec) -> list[BranchPoint]:
    """All branch points with Re(s) >= sigma0, sorted by gain.

    A root of the branch polynomial with multiplicity mu meets N = mu + 1
    trajectories.  Roots that coincide with plant poles/zeros are artifacts
    of repeated factors (the gain there is 0 or infinite) and are skipped.
    """
    b = branch_numerator(plant)
    if b.degree < 1:
        return []
    out: list[BranchPoint] = []
    structure = plant.zeros + plant.poles
    for root in complex_roots(b):
        s, mu = root.value, root.multiplicity
        if s.real < region.sigma0 - 1e-9 * (1.0 + abs(s)):
            continue
        if structure and min(abs(s - x) for x in structure) <= 1e-9 * (1.0 + abs(s)):
            continue
        try:
            lv = log_eval(plant, s)
        except SingularPointError:
            continue
        if abs(wrap_angle(lv.phase - math.pi)) > TOL_PHASE:
            continue
        Kval = -lv.lnmag
        out.append(
            BranchPoint(
                s=s,
                k=math.exp(Kval),
                Kval=Kval,
                multiplicity=mu + 1,
                active=Kval <= region.lnkmax,
            )
        )
    out.sort(key=lambda bp: (bp.Kval, bp.s.real, bp.s.imag))
    return out
