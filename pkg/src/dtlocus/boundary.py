"""Everything on the vertical line Re(s) = sigma0.

Roots of 1 + k*G(s)e^(-hs) crossing the line are found by splitting omega >= 0
into pieces where the boundary gain K(omega) = h*sigma0 - ln|G(sigma0+j omega)|
and the continuous phase phi(omega) are monotone (the breakpoints are real
roots of two explicitly assembled polynomials), then bisecting K against the
gain cap and phi against the odd multiples of pi.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import (
    BiProperGainCapViolated,
    DegenerateCrossing,
    InputError,
    PoleOrZeroOnBoundary,
)
from .plant import Plant, log_eval, wrap_angle
from .poly import RealPolynomial, nonneg_real_roots

TOL_BND = 1e-9
TOL_DIR = 1e-9
TOL_BISECT = 1e-10

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RegionSpec:
    """Right half-plane Re(s) >= sigma0 with gain capped at kmax."""

    sigma0: float
    kmax: float

    def __post_init__(self):
        object.__setattr__(self, "sigma0", float(self.sigma0))
        object.__setattr__(self, "kmax", float(self.kmax))
        if not math.isfinite(self.sigma0):
            raise InputError(f"sigma0 must be finite, got {self.sigma0}")
        if not (math.isfinite(self.kmax) and self.kmax > 0.0):
            raise InputError(f"kmax must be a positive finite real, got {self.kmax}")

    @property
    def lnkmax(self) -> float:
        return math.log(self.kmax)


class Direction(enum.Enum):
    INWARD = "inward"
    OUTWARD = "outward"


@dataclass(frozen=True)
class BoundaryCrossing:
    omega: float
    Kval: float
    k: float
    direction: Direction


@dataclass(frozen=True)
class CrossingSet:
    inward: tuple[BoundaryCrossing, ...]
    outward: tuple[BoundaryCrossing, ...]


def _gamma_poly(dsig: float, om: float) -> RealPolynomial:
    # squared distance |sigma0 + j w - root|^2 as a polynomial in w
    return RealPolynomial((dsig * dsig + om * om, -2.0 * om, 1.0))


def _prod(polys) -> RealPolynomial:
    acc = RealPolynomial((1.0,))
    for p in polys:
        acc = acc * p
    return acc


@dataclass(frozen=True)
class BoundaryFunctions:
    """Cached boundary geometry for one plant/line pair.

    dsz/dsp hold the signed horizontal offsets sigma0 - Re(root); omz/omp the
    root imaginary parts.  phi is the continuous phase extension, equal to the
    principal phase of G(sigma0)e^(-h sigma0) at omega = 0 and built from
    single-argument arctangents (safe: no root sits on the line).
    """

    plant: Plant
    sigma0: float
    dsz: tuple[float, ...]
    omz: tuple[float, ...]
    dsp: tuple[float, ...]
    omp: tuple[float, ...]
    phi0: float
    kprime_poly: RealPolynomial = field(repr=False)
    phiprime_poly: RealPolynomial = field(repr=False)

    def K(self, omega: float) -> float:
        h = self.plant.delay
        acc = h * self.sigma0 - math.log(abs(self.plant.alpha))
        for ds, om in zip(self.dsp, self.omp):
            d = omega - om
            acc += 0.5 * math.log(ds * ds + d * d)
        for ds, om in zip(self.dsz, self.omz):
            d = omega - om
            acc -= 0.5 * math.log(ds * ds + d * d)
        return acc

    def Kprime(self, omega: float) -> float:
        acc = 0.0
        for ds, om in zip(self.dsp, self.omp):
            d = omega - om
            acc += d / (ds * ds + d * d)
        for ds, om in zip(self.dsz, self.omz):
            d = omega - om
            acc -= d / (ds * ds + d * d)
        return acc

    def phi(self, omega: float) -> float:
        acc = self.phi0 - self.plant.delay * omega
        for ds, om in zip(self.dsz, self.omz):
            acc += math.atan((omega - om) / ds)
        for ds, om in zip(self.dsp, self.omp):
            acc -= math.atan((omega - om) / ds)
        return acc

    def phiprime(self, omega: float) -> float:
        acc = -self.plant.delay
        for ds, om in zip(self.dsz, self.omz):
            d = omega - om
            acc += ds / (ds * ds + d * d)
        for ds, om in zip(self.dsp, self.omp):
            d = omega - om
            acc -= ds / (ds * ds + d * d)
        return acc


def boundary_functions(plant: Plant, region: RegionSpec) -> BoundaryFunctions:
    s0 = region.sigma0
    for x in plant.zeros + plant.poles:
        if abs(x.real - s0) <= TOL_BND * (1.0 + abs(x)):
            raise PoleOrZeroOnBoundary(
                f"root {x} lies on the line Re(s) = {s0}; shift sigma0"
            )
    if plant.biproper:
        k_inf = plant.delay * s0 - math.log(abs(plant.alpha))
        if region.lnkmax >= k_inf:
            raise BiProperGainCapViolated(
                f"bi-proper plant: kmax must stay below e^(h*sigma0)/|alpha| = "
                f"{math.exp(k_inf):.6g}, got {region.kmax:.6g}"
            )

    dsz = tuple(s0 - z.real for z in plant.zeros)
    omz = tuple(z.imag for z in plant.zeros)
    dsp = tuple(s0 - p.real for p in plant.poles)
    omp = tuple(p.imag for p in plant.poles)

    gz = [_gamma_poly(ds, om) for ds, om in zip(dsz, omz)]
    gp = [_gamma_poly(ds, om) for ds, om in zip(dsp, omp)]
    Gz = _prod(gz)
    Gp = _prod(gp)
    # cofactor products: all gamma factors except the i-th
    Gz_r = [_prod(gz[:r] + gz[r + 1 :]) for r in range(len(gz))]
    Gp_i = [_prod(gp[:i] + gp[i + 1 :]) for i in range(len(gp))]

    zero = RealPolynomial(())
    sum_p = zero
    for i, cof in enumerate(Gp_i):
        sum_p = sum_p + RealPolynomial((-omp[i], 1.0)) * cof
    sum_z = zero
    for r, cof in enumerate(Gz_r):
        sum_z = sum_z + RealPolynomial((-omz[r], 1.0)) * cof
    kprime_poly = Gz * sum_p - Gp * sum_z

    ssum_z = zero
    for r, cof in enumerate(Gz_r):
        ssum_z = ssum_z + dsz[r] * cof
    ssum_p = zero
    for i, cof in enumerate(Gp_i):
        ssum_p = ssum_p + dsp[i] * cof
    phiprime_poly = Gp * ssum_z - Gz * ssum_p - plant.delay * (Gz * Gp)

    phi1_0 = (
        sum(math.atan(-om / ds) for ds, om in zip(dsz, omz))
        - sum(math.atan(-om / ds) for ds, om in zip(dsp, omp))
    )
    phi0 = log_eval(plant, complex(s0, 0.0)).phase - phi1_0

    return BoundaryFunctions(
        plant=plant,
        sigma0=s0,
        dsz=dsz,
        omz=omz,
        dsp=dsp,
        omp=omp,
        phi0=phi0,
        kprime_poly=kprime_poly,
        phiprime_poly=phiprime_poly,
    )


def _bisect(f, a: float, b: float, fa: float, fb: float, tol: float) -> float:
    """Root of monotone f on [a, b] with f(a), f(b) already known."""
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa < 0.0) == (fb < 0.0):
        # rounding pushed an endpoint graze off the bracket; nearest end wins
        return a if abs(fa) <= abs(fb) else b
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def _omega_cap(bf: BoundaryFunctions, region: RegionSpec, kp_roots) -> float:
    """An omega beyond which K(omega) stays above the gain cap.

    Past the largest K' root, K is monotone; strictly proper plants grow
    without bound, bi-proper ones flatten toward their (validated) limit, so
    doubling from beyond the last breakpoint terminates either way.
    """
    plant = bf.plant
    mags = [abs(x) for x in plant.zeros + plant.poles] + [r for r, _ in kp_roots] + [1.0]
    cap = 1.0 + 2.0 * max(mags)
    if plant.biproper:
        k_inf = plant.delay * bf.sigma0 - math.log(abs(plant.alpha))
        target = region.lnkmax + min(1.0, 0.5 * (k_inf - region.lnkmax))
    else:
        target = region.lnkmax + 1.0
    while bf.K(cap) <= target:
        cap *= 2.0
        if cap > 1e12:
            raise InputError("gain cap region unbounded in omega; kmax too large")
    return cap


def magnitude_intervals(bf: BoundaryFunctions, region: RegionSpec) -> list[tuple[float, float]]:
    """The omega >= 0 set where the boundary gain stays within the cap.

    Returned as disjoint closed intervals, ascending.
    """
    L = region.lnkmax
    kp_roots = nonneg_real_roots(bf.kprime_poly)
    cap = _omega_cap(bf, region, kp_roots)
    cuts = [0.0] + [r for r, _ in kp_roots if 0.0 < r < cap] + [cap]

    tol = TOL_BISECT * (1.0 + cap)
    kept: list[tuple[float, float]] = []
    for a, b in zip(cuts, cuts[1:]):
        if b - a <= tol:
            continue
        Ka, Kb = bf.K(a) - L, bf.K(b) - L
        if Ka <= 0.0 and Kb <= 0.0:
            kept.append((a, b))
        elif Ka > 0.0 and Kb > 0.0:
            continue
        else:
            m = _bisect(lambda w: bf.K(w) - L, a, b, Ka, Kb, tol)
            kept.append((a, m) if Ka <= 0.0 else (m, b))

    merged: list[list[float]] = []
    for a, b in kept:
        if merged and a - merged[-1][1] <= tol:
            merged[-1][1] = b
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def boundary_crossings(bf: BoundaryFunctions, region: RegionSpec) -> CrossingSet:
    """All locus roots on the boundary line with gain within the cap.

    Within each interval of admissible gain, the continuous phase is split
    into monotone pieces; each piece meets a given odd-multiple-of-pi phase
    line at most once, so the line count comes from the endpoint phases and
    each hit is a bisection.
    """
    intervals = magnitude_intervals(bf, region)
    pp_roots = [r for r, _ in nonneg_real_roots(bf.phiprime_poly)]

    hits: list[float] = []
    for lo, hi in intervals:
        tol = TOL_BISECT * (1.0 + hi)
        cuts = [lo] + [r for r in pp_roots if lo < r < hi] + [hi]
        for a, b in zip(cuts, cuts[1:]):
            if b - a <= 0.0:
                continue
            pa, pb = bf.phi(a), bf.phi(b)
            pmin, pmax = (pa, pb) if pa <= pb else (pb, pa)
            l_hi = math.floor(pmax / _TWO_PI - 0.5)
            l_lo = math.ceil(pmin / _TWO_PI - 0.5)
            for l in range(l_lo, l_hi + 1):
                target = (2.0 * l + 1.0) * math.pi
                hits.append(
                    _bisect(lambda w: bf.phi(w) - target, a, b, pa - target, pb - target, tol)
                )

    hits.sort()
    inward: list[BoundaryCrossing] = []
    outward: list[BoundaryCrossing] = []
    prev = None
    for w in hits:
        if prev is not None and w - prev <= 2.0 * TOL_BISECT * (1.0 + w):
            continue
        prev = w
        slope = bf.phiprime(w)
        if abs(slope) <= TOL_DIR:
            raise DegenerateCrossing(
                f"phase slope {slope:.3e} at boundary root omega={w:.12g}; "
                "crossing direction is ill-posed"
            )
        Kval = min(bf.K(w), region.lnkmax)
        bc = BoundaryCrossing(
            omega=w,
            Kval=Kval,
            k=math.exp(Kval),
            direction=Direction.INWARD if slope < 0.0 else Direction.OUTWARD,
        )
        (inward if slope < 0.0 else outward).append(bc)

    inward.sort(key=lambda c: c.Kval)
    outward.sort(key=lambda c: c.Kval)
    return CrossingSet(inward=tuple(inward), outward=tuple(outward))
