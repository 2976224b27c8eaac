"""SISO dead-time plant G(s)·e^(-h·s) in zero-pole-gain form.

Evaluation works in the log domain throughout: magnitudes as sums of half-log
squared distances and phases as sums of angles, so a large |Re(s)| never
forms e^(-h·s) directly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InputError, SingularPointError
from .poly import RealPolynomial, complex_roots

TOL_SING = 1e-12
_TOL_CONJ = 1e-9


def wrap_angle(x: float) -> float:
    """Reduce an angle to the principal interval (-pi, pi]."""
    w = math.fmod(x, 2.0 * math.pi)
    if w > math.pi:
        w -= 2.0 * math.pi
    elif w <= -math.pi:
        w += 2.0 * math.pi
    return w


def _check_conjugate_closed(roots, what: str) -> None:
    unmatched = [r for r in roots if abs(r.imag) > _TOL_CONJ * (1.0 + abs(r))]
    while unmatched:
        r = unmatched.pop()
        best = None
        for i, o in enumerate(unmatched):
            if abs(o - r.conjugate()) <= _TOL_CONJ * (1.0 + abs(r)):
                best = i
                break
        if best is None:
            raise InputError(f"{what} are not closed under conjugation: {r} has no partner")
        unmatched.pop(best)


@dataclass(frozen=True)
class Plant:
    """Proper rational plant alpha*N(s)/D(s) with input delay.

    zeros/poles are stored with repetition (a double pole appears twice) and
    each list must be closed under complex conjugation.
    """

    alpha: float
    delay: float
    zeros: tuple[complex, ...]
    poles: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "delay", float(self.delay))
        object.__setattr__(self, "zeros", tuple(complex(z) for z in self.zeros))
        object.__setattr__(self, "poles", tuple(complex(p) for p in self.poles))
        if not math.isfinite(self.alpha) or self.alpha == 0.0:
            raise InputError(f"alpha must be a nonzero finite real, got {self.alpha}")
        if not math.isfinite(self.delay) or self.delay <= 0.0:
            raise InputError(f"delay must be > 0, got {self.delay}")
        if len(self.zeros) > len(self.poles):
            raise InputError(
                f"improper plant: {len(self.zeros)} zeros exceed {len(self.poles)} poles"
            )
        for v in self.zeros + self.poles:
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InputError("zeros/poles must be finite")
        _check_conjugate_closed(self.zeros, "zeros")
        _check_conjugate_closed(self.poles, "poles")

    @property
    def n_poles(self) -> int:
        return len(self.poles)

    @property
    def n_zeros(self) -> int:
        return len(self.zeros)

    @property
    def biproper(self) -> bool:
        return len(self.zeros) == len(self.poles)

    def flipped_gain(self) -> "Plant":
        return Plant(-self.alpha, self.delay, self.zeros, self.poles)


@dataclass(frozen=True)
class LogValue:
    """ln-magnitude and principal phase of G(s)e^(-h*s) at one point."""

    lnmag: float
    phase: float


def plant_from_coefficients(num: RealPolynomial, den: RealPolynomial, delay: float) -> Plant:
    """Build a Plant from numerator/denominator coefficients.

    The gain is the ratio of leading coefficients; zeros and poles come from
    the monic factors, with multiplicity expanded to repeated entries.
    """
    if num.degree < 0:
        raise InputError("numerator is the zero polynomial")
    if den.degree < 0:
        raise InputError("denominator is the zero polynomial")
    if num.degree > den.degree:
        raise InputError(f"improper transfer function: deg num {num.degree} > deg den {den.degree}")
    alpha = num.coeffs[-1] / den.coeffs[-1]

    def roots_of(p: RealPolynomial) -> tuple[complex, ...]:
        if p.degree < 1:
            return ()
        out: list[complex] = []
        for r in complex_roots(p):
            out.extend([r.value] * r.multiplicity)
        return tuple(out)

    return Plant(alpha, delay, roots_of(num), roots_of(den))


def _assert_regular(plant: Plant, s: complex) -> None:
    tol = TOL_SING * (1.0 + abs(s))
    for x in plant.zeros + plant.poles:
        if abs(s - x) <= tol:
            raise SingularPointError(f"evaluation at {s} hits the root {x}")


def log_eval(plant: Plant, s: complex) -> LogValue:
    """Log-domain value of G(s)e^(-h*s): never forms the exponential."""
    s = complex(s)
    _assert_regular(plant, s)
    lnmag = math.log(abs(plant.alpha))
    phase = 0.0 if plant.alpha > 0 else math.pi
    for z in plant.zeros:
        d = s - z
        lnmag += 0.5 * math.log(d.real * d.real + d.imag * d.imag)
        phase += math.atan2(d.imag, d.real)
    for p in plant.poles:
        d = s - p
        lnmag -= 0.5 * math.log(d.real * d.real + d.imag * d.imag)
        phase -= math.atan2(d.imag, d.real)
    lnmag -= plant.delay * s.real
    phase -= plant.delay * s.imag
    return LogValue(lnmag, wrap_angle(phase))


def dlog_ratio(plant: Plant, s: complex) -> complex:
    """Logarithmic derivative of the delayed plant: G'(s)/G(s) - h."""
    s = complex(s)
    _assert_regular(plant, s)
    acc = complex(-plant.delay, 0.0)
    for z in plant.zeros:
        acc += 1.0 / (s - z)
    for p in plant.poles:
        acc -= 1.0 / (s - p)
    return acc


def gain_at(plant: Plant, s: complex) -> float:
    """The k > 0 that puts s on the locus magnitude-wise: |k G(s)e^(-hs)| = 1."""
    return math.exp(-log_eval(plant, s).lnmag)


def _poly_from_roots(roots) -> RealPolynomial:
    """Monic polynomial with the given conjugate-closed root multiset.

    Conjugate pairs are folded into real quadratics so the coefficients stay
    exactly real.
    """
    acc = RealPolynomial((1.0,))
    pending = list(roots)
    while pending:
        r = pending.pop()
        if abs(r.imag) <= _TOL_CONJ * (1.0 + abs(r)):
            acc = acc * RealPolynomial((-r.real, 1.0))
            continue
        j = min(
            range(len(pending)),
            key=lambda i: abs(pending[i] - r.conjugate()),
        )
        w = pending.pop(j)
        re = 0.5 * (r.real + w.real)
        mag2 = 0.5 * (abs(r) ** 2 + abs(w) ** 2)
        acc = acc * RealPolynomial((mag2, -2.0 * re, 1.0))
    return acc


def branch_numerator(plant: Plant) -> RealPolynomial:
    """Polynomial whose zeros are the candidate locus branch points.

    With G = alpha*N/D, returns N'D - ND' - h*N*D; the constant alpha scales
    the whole polynomial and is dropped since only the zero set matters.
    """
    N = _poly_from_roots(plant.zeros)
    D = _poly_from_roots(plant.poles)
    return N.derivative() * D - N * D.derivative() - plant.delay * (N * D)
