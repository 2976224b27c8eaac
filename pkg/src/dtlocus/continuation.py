"""Predictor-corrector stepping along one locus trajectory.

Work happens in (sigma, omega, K) space with K = ln k.  The corrector solves
the log-magnitude residual M, the phase residual P, and an affine constraint
pinning the iterate to the plane through the predicted point orthogonal to
the travel direction; the 3x3 Jacobian rows for M and P share their entries
by the Cauchy-Riemann structure of ln G.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .boundary import BoundaryCrossing, BoundaryFunctions
from .errors import (
    DegenerateCrossing,
    InputError,
    SingularJacobian,
    SingularPointError,
    StepUnderflow,
)
from .plant import Plant, log_eval, wrap_angle

TOL_CORR = 1e-6
MAX_ITER = 20
H0 = 1e-2
H_MIN = 1e-8
H_MAX = 0.5
KAPPA_NOM = 1.1
DELTA_NOM = 1e-3
COND_LIMIT = 1e12
TOL_DIR = 1e-9


@dataclass(frozen=True)
class LocusPoint:
    """One point of a trajectory: position sigma + j*omega at gain e^Kval."""

    sigma: float
    omega: float
    Kval: float

    def __post_init__(self):
        for v in (self.sigma, self.omega, self.Kval):
            if not math.isfinite(v):
                raise InputError(f"non-finite locus point ({self.sigma}, {self.omega}, {self.Kval})")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.omega)

    @property
    def k(self) -> float:
        return math.exp(self.Kval)


@dataclass(frozen=True)
class StepController:
    """Adaptive step length with nominal contraction/distance targets."""

    h: float
    kappa_nom: float = KAPPA_NOM
    delta_nom: float = DELTA_NOM
    h_min: float = H_MIN
    h_max: float = H_MAX

    def __post_init__(self):
        if not (self.kappa_nom > 0.0 and self.delta_nom > 0.0):
            raise InputError("nominal contraction and distance must be positive")
        if not (0.0 < self.h_min <= self.h_max):
            raise InputError("step bounds must satisfy 0 < h_min <= h_max")
        object.__setattr__(self, "h", min(max(self.h, self.h_min), self.h_max))


@dataclass(frozen=True)
class CorrectorOutcome:
    point: LocusPoint
    iterations: int
    kappa: float
    delta: float
    converged: bool


def unit3(v) -> tuple[float, float, float]:
    n = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if n == 0.0 or not math.isfinite(n):
        raise InputError(f"cannot normalize direction {v}")
    return (v[0] / n, v[1] / n, v[2] / n)


def residuals(plant: Plant, p: LocusPoint) -> tuple[float, float]:
    """Log-magnitude and phase residuals of 1 + e^K G(s)e^(-hs) = 0.

    Both vanish exactly on the locus; P is the principal distance of the
    phase from pi, so it lives in (-pi, pi].
    """
    lv = log_eval(plant, p.s)
    return lv.lnmag + p.Kval, wrap_angle(lv.phase - math.pi)


def _partials(plant: Plant, sigma: float, omega: float) -> tuple[float, float]:
    """(dM/dsigma, dM/domega) at the running point."""
    msig = -plant.delay
    mom = 0.0
    for z in plant.zeros:
        ds, dw = sigma - z.real, omega - z.imag
        g = ds * ds + dw * dw
        msig += ds / g
        mom += dw / g
    for q in plant.poles:
        ds, dw = sigma - q.real, omega - q.imag
        g = ds * ds + dw * dw
        msig -= ds / g
        mom -= dw / g
    return msig, mom


def jacobian(plant: Plant, p: LocusPoint, d) -> list[list[float]]:
    """Rows: gradient of M, gradient of P (Cauchy-Riemann pair), direction."""
    msig, mom = _partials(plant, p.sigma, p.omega)
    return [
        [msig, mom, 1.0],
        [-mom, msig, 0.0],
        [d[0], d[1], d[2]],
    ]


def predict(prev: LocusPoint, d, h: float) -> LocusPoint:
    return LocusPoint(prev.sigma + h * d[0], prev.omega + h * d[1], prev.Kval + h * d[2])


def solve3(a: list[list[float]], b: list[float]) -> list[float]:
    """3x3 linear solve, partial pivoting; raises on ill-conditioned systems."""
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    scale = max(abs(m[i][j]) for i in range(3) for j in range(3))
    if scale == 0.0:
        raise SingularJacobian("zero Jacobian")
    min_pivot = math.inf
    for col in range(3):
        piv = max(range(col, 3), key=lambda r: abs(m[r][col]))
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        if p == 0.0:
            raise SingularJacobian("exactly singular Jacobian")
        min_pivot = min(min_pivot, abs(p))
        for r in range(col + 1, 3):
            f = m[r][col] / p
            if f != 0.0:
                for c in range(col, 4):
                    m[r][c] -= f * m[col][c]
    if scale / min_pivot > COND_LIMIT:
        raise SingularJacobian(f"Jacobian condition estimate {scale / min_pivot:.3e}")
    x = [0.0, 0.0, 0.0]
    for r in (2, 1, 0):
        acc = m[r][3]
        for c in range(r + 1, 3):
            acc -= m[r][c] * x[c]
        x[r] = acc / m[r][r]
    return x


def solve2(a11: float, a12: float, a21: float, a22: float, b1: float, b2: float):
    det = a11 * a22 - a12 * a21
    norm = max(abs(a11), abs(a12), abs(a21), abs(a22))
    if det == 0.0 or norm * norm / abs(det) > COND_LIMIT:
        raise SingularJacobian("2x2 system ill-conditioned")
    return (b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det


def correct(
    plant: Plant,
    predicted: LocusPoint,
    prev_dir,
    tol: float = TOL_CORR,
    max_iter: int = MAX_ITER,
) -> CorrectorOutcome:
    """Newton-correct a predicted point back onto the locus.

    Convergence is declared on the residuals themselves (|M|, |P| and the
    plane constraint all within tol), so a converged outcome always satisfies
    the locus equations to tolerance.  kappa is the ratio of the first two
    Newton step lengths (0 when fewer than two steps ran); delta is the
    direct locus distance |1 - e^(M+jP)| at the final point.
    """
    x = [predicted.sigma, predicted.omega, predicted.Kval]
    norms: list[float] = []
    converged = False
    M = P = 0.0
    while True:
        pt = LocusPoint(x[0], x[1], x[2])
        M, P = residuals(plant, pt)
        f3 = (
            (x[0] - predicted.sigma) * prev_dir[0]
            + (x[1] - predicted.omega) * prev_dir[1]
            + (x[2] - predicted.Kval) * prev_dir[2]
        )
        if max(abs(M), abs(P), abs(f3)) <= tol:
            converged = True
            break
        if len(norms) >= max_iter:
            break
        J = jacobian(plant, pt, prev_dir)
        dx = solve3(J, [-M, -P, -f3])
        x[0] += dx[0]
        x[1] += dx[1]
        x[2] += dx[2]
        norms.append(math.sqrt(dx[0] ** 2 + dx[1] ** 2 + dx[2] ** 2))
    kappa = norms[1] / norms[0] if len(norms) >= 2 and norms[0] > 0.0 else 0.0
    delta = abs(1.0 - cmath.exp(complex(M, P)))
    return CorrectorOutcome(
        point=LocusPoint(x[0], x[1], x[2]),
        iterations=len(norms),
        kappa=kappa,
        delta=delta,
        converged=converged,
    )


def step_update(ctl: StepController, out: CorrectorOutcome) -> tuple[float, bool]:
    """Next step length and whether the prediction must be redone.

    Converged steps are graded by contraction and locus distance against the
    nominal targets; a failed correction forces the maximum reduction.
    """
    if out.converged:
        k_df = math.sqrt(max(out.kappa, 0.0) / ctl.kappa_nom)
        d_df = math.sqrt(max(out.delta, 0.0) / ctl.delta_nom)
        h_bar = min(max(max(k_df, d_df), 0.5), 2.0)
    else:
        h_bar = 2.0
    repeat = h_bar >= 2.0 or not out.converged
    if repeat and ctl.h <= ctl.h_min * (1.0 + 1e-12):
        raise StepUnderflow(f"step length {ctl.h:.3e} cannot shrink below {ctl.h_min:.3e}")
    new_h = min(max(ctl.h / h_bar, ctl.h_min), ctl.h_max)
    return new_h, repeat


def _phase_rest_at(plant: Plant, p: complex, skip: list[int]) -> float:
    """Phase of G at p with the pole factors named in skip removed."""
    acc = 0.0 if plant.alpha > 0 else math.pi
    for z in plant.zeros:
        d = p - z
        acc += math.atan2(d.imag, d.real)
    for i, q in enumerate(plant.poles):
        if i in skip:
            continue
        d = p - q
        acc -= math.atan2(d.imag, d.real)
    return acc


def pole_group(plant: Plant, pole_index: int) -> list[int]:
    """Indices of poles coinciding with the indexed one (itself included)."""
    p = plant.poles[pole_index]
    tol = 1e-9 * (1.0 + abs(p))
    return [i for i, q in enumerate(plant.poles) if abs(q - p) <= tol]


def departure_angles(plant: Plant, pole_index: int) -> list[float]:
    """All k=0+ departure directions from the pole (one per multiplicity).

    Solves the locus phase condition on a vanishing circle around the pole;
    a mu-fold pole departs along mu rays 2*pi/mu apart.
    """
    group = pole_group(plant, pole_index)
    mu = len(group)
    p = plant.poles[pole_index]
    psi = _phase_rest_at(plant, p, group) - plant.delay * p.imag - math.pi
    return [wrap_angle((psi + 2.0 * math.pi * j) / mu) for j in range(mu)]


def departure_direction_pole(plant: Plant, pole_index: int) -> float:
    """Departure angle from a simple pole; repeated poles are rejected."""
    group = pole_group(plant, pole_index)
    if len(group) > 1:
        raise InputError(
            f"pole {plant.poles[pole_index]} is repeated {len(group)} times; "
            "use departure_angles for the full fan"
        )
    return departure_angles(plant, pole_index)[0]


def entry_direction_crossing(
    plant: Plant, bf: BoundaryFunctions, c: BoundaryCrossing
) -> complex:
    """ds/dk direction (complex, unnormalized) of a boundary entry root."""
    slope = bf.phiprime(c.omega)
    if abs(slope) <= TOL_DIR:
        raise DegenerateCrossing(
            f"phase slope {slope:.3e} at omega={c.omega:.12g}; entry direction undefined"
        )
    return -1.0 / (c.k * complex(slope, bf.Kprime(c.omega)))
