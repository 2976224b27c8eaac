"""Real-coefficient polynomials and their roots.

Coefficients are stored densely in ascending degree order, so coeffs[d] is the
coefficient of x**d.  Root finding normalizes by the largest coefficient
magnitude, takes companion-matrix eigenvalues, polishes each eigenvalue with a
few Newton steps, and finally clusters nearby values so callers see multiple
roots with an explicit multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

TOL_ROOT = 1e-8
TOL_IMAG = 1e-8
CLUSTER_REL = 1e-6


def _trimmed(coeffs) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    while c and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RealPolynomial:
    """Dense univariate polynomial with real coefficients.

    The zero polynomial is the empty coefficient tuple and has degree -1.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trimmed(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "RealPolynomial":
        return RealPolynomial(tuple(d * c for d, c in enumerate(self.coeffs))[1:])

    def _padded(self, n: int) -> list[float]:
        return list(self.coeffs) + [0.0] * (n - len(self.coeffs))

    def __add__(self, other: "RealPolynomial") -> "RealPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return RealPolynomial(tuple(a + b for a, b in zip(self._padded(n), other._padded(n))))

    def __sub__(self, other: "RealPolynomial") -> "RealPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return RealPolynomial(tuple(a - b for a, b in zip(self._padded(n), other._padded(n))))

    def __neg__(self) -> "RealPolynomial":
        return RealPolynomial(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            if not self.coeffs or not other.coeffs:
                return RealPolynomial(())
            out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RealPolynomial(tuple(out))
        return RealPolynomial(tuple(float(other) * c for c in self.coeffs))

    __rmul__ = __mul__


@dataclass(frozen=True)
class PolyRoot:
    value: complex
    multiplicity: int


def _horner_triple(coeffs, z):
    """Value, first and second derivative at z in one Horner pass."""
    v = 0j
    d1 = 0j
    d2 = 0j
    for c in reversed(coeffs):
        d2 = d2 * z + d1
        d1 = d1 * z + v
        v = v * z + c
    return v, d1, 2.0 * d2


def _polish(coeffs, z, steps=10):
    """Newton iteration on p/p', which has a simple zero at every root.

    Plain Newton stalls on multiple roots (|p| hits the rounding floor while
    the iterates are still spread ~eps^(1/m) apart, too wide for the cluster
    pass); the ratio variant converges quadratically for any multiplicity.
    """
    best, best_prox = z, None
    for _ in range(steps):
        v, d1, d2 = _horner_triple(coeffs, z)
        if v == 0:
            return z
        if d1 != 0:
            prox = abs(v / d1)  # ~ distance/multiplicity
            if best_prox is None or prox < best_prox:
                best, best_prox = z, prox
        den = d1 * d1 - v * d2
        if den == 0:
            break
        step = v * d1 / den
        z = z - step
        if abs(step) <= 1e-16 * (1.0 + abs(z)):
            v, d1, _ = _horner_triple(coeffs, z)
            if d1 != 0 and (best_prox is None or abs(v / d1) < best_prox):
                best = z
            break
    return best

def _cluster(values, rel):
    """Group values whose pairwise distance is within rel*(1 + magnitude)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            tol = rel * (1.0 + max(abs(values[i]), abs(values[j])))
            if abs(values[i] - values[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[complex]] = {}
    for i, v in enumerate(values):
        groups.setdefault(find(i), []).append(v)
    return [(sum(g) / len(g), len(g)) for g in groups.values()]


def complex_roots(p: RealPolynomial, cluster_rel: float = CLUSTER_REL) -> list[PolyRoot]:
    """All complex roots of p with multiplicities.

    The root set is closed under conjugation: complex clusters are paired with
    their mirror cluster and averaged, and clusters with negligible imaginary
    part are snapped onto the real axis.
    """
    if p.degree < 1:
        raise InputError(f"root finding needs degree >= 1, got degree {p.degree}")
    c = list(p.coeffs)
    nzero = 0
    while c and c[0] == 0.0:  # exact roots at the origin
        c.pop(0)
        nzero += 1
    # scale by a power of two: exact division, so multiple roots stay multiple
    scale = 2.0 ** round(math.log2(max(abs(v) for v in c)))
    cs = [v / scale for v in c]
    raw: list[complex] = []
    if len(cs) >= 2:
        raw = [complex(z) for z in np.roots(cs[::-1])]
        raw = [_polish(cs, z) for z in raw]
    raw.extend([0j] * nzero)

    clusters = _cluster(raw, cluster_rel)
    reals: list[tuple[float, int]] = []
    ups: list[tuple[complex, int]] = []
    downs: list[tuple[complex, int]] = []
    for z, m in clusters:
        if abs(z.imag) <= TOL_IMAG * (1.0 + abs(z)):
            reals.append((z.real, m))
        elif z.imag > 0:
            ups.append((z, m))
        else:
            downs.append((z, m))

    out = [PolyRoot(complex(r, 0.0), m) for r, m in reals]
    downs_left = list(downs)
    for z, m in ups:
        if downs_left:
            j = min(range(len(downs_left)), key=lambda i: abs(downs_left[i][0] - z.conjugate()))
            w, mw = downs_left.pop(j)
            avg = (z + w.conjugate()) / 2.0
            out.append(PolyRoot(avg, m))
            out.append(PolyRoot(avg.conjugate(), mw))
        else:
            out.append(PolyRoot(z, m))
    out.extend(PolyRoot(z, m) for z, m in downs_left)
    out.sort(key=lambda r: (r.value.real, r.value.imag))
    return out


def nonneg_real_roots(p: RealPolynomial, tol_imag: float = TOL_IMAG) -> list[tuple[float, int]]:
    """Real roots with Re >= 0, as (value, multiplicity), ascending.

    Roots with |Im| <= tol_imag count as real; small negative reals are
    clamped to 0.  Constant polynomials have no roots.
    """
    if p.degree < 1:
        return []
    picked: list[tuple[float, int]] = []
    for r in complex_roots(p):
        if abs(r.value.imag) <= tol_imag and r.value.real >= -tol_imag:
            picked.append((max(r.value.real, 0.0), r.multiplicity))
    picked.sort()
    merged: list[tuple[float, int]] = []
    for v, m in picked:
        if merged and abs(v - merged[-1][0]) <= 1e-12 * (1.0 + abs(v)):
            merged[-1] = (merged[-1][0], merged[-1][1] + m)
        else:
            merged.append((v, m))
    return merged
