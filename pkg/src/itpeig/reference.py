"""Analytic spectra, degeneracies and eigenfunctions for the model potentials.

Bessel and spherical-Bessel functions are evaluated in-repo (power series
and the closed-form recurrence from j0, j1) and their zeros located by a
sign scan plus bisection, keeping the oracles dependency-free and
bit-reproducible.  Energies are in the dimensionless units of the solver:
the isotropic oscillator spectrum is ``n + 3/2`` with degeneracy
``(n+1)(n+2)/2``, a box of radius ``a`` has ``E = z^2/(2 a^2)`` with ``z``
the appropriate Bessel zero, and the unconfined Coulomb spectrum is
``-1/(2 n^2)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

__all__ = [
    "AnalyticLevel",
    "ho_level",
    "ho_radial_level",
    "ho_cylindrical_level",
    "ho_phi1",
    "spherical_bessel_j",
    "spherical_bessel_zero",
    "sphere_box_level",
    "bessel_j",
    "bessel_j_zero",
    "cylinder_box_level",
    "hydrogen_level",
    "hydrogen_radial_level",
]


@dataclass(frozen=True)
class AnalyticLevel:
    """One closed-form level: energy, multiplicity, quantum-number labels."""

    energy: float
    degeneracy: int
    quantum_numbers: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not math.isfinite(self.energy):
            raise ValueError("energy must be finite")
        if self.degeneracy < 1:
            raise ValueError("degeneracy must be >= 1")


# -- harmonic oscillator ----------------------------------------------------

def ho_level(n: int) -> AnalyticLevel:
    """3D isotropic oscillator: E_n = n + 3/2, g_n = (n+1)(n+2)/2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return AnalyticLevel(n + 1.5, (n + 1) * (n + 2) // 2, {"n": n})


def ho_radial_level(l: int, k: int) -> AnalyticLevel:
    """Radial-sector oscillator level E = 2k + l + 3/2 with 3D weight 2l+1."""
    if l < 0 or k < 0:
        raise ValueError("l and k must be >= 0")
    return AnalyticLevel(2 * k + l + 1.5, 2 * l + 1, {"l": l, "k": k})


def ho_cylindrical_level(m: int, k: int, n_z: int) -> AnalyticLevel:
    """Cylindrical-sector oscillator level E = (2k + |m| + 1) + (n_z + 1/2).

    Weight 1 for m = 0, else 2 for the +-m pair.
    """
    if k < 0 or n_z < 0:
        raise ValueError("k and n_z must be >= 0")
    g = 1 if m == 0 else 2
    return AnalyticLevel(2 * k + abs(m) + 1 + n_z + 0.5, g, {"m": m, "k": k, "n_z": n_z})


def ho_phi1(member: int, r: float, theta: float, phi: float) -> complex:
    """First excited oscillator eigenfunctions (member -1, 0, +1).

    member 0:   sqrt(2) r exp(-r^2/2) cos(theta) / pi^(3/4)   (real)
    member +-1: r exp(-r^2/2) sin(theta) exp(+-i phi) / pi^(3/4)
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    pref = r * math.exp(-0.5 * r * r) / math.pi**0.75
    if member == 0:
        return complex(math.sqrt(2.0) * pref * math.cos(theta))
    if member in (1, -1):
        return pref * math.sin(theta) * cmath.exp(1j * member * phi)
    raise ValueError("member must be -1, 0 or +1")


# -- Bessel machinery ---------------------------------------------------------

def spherical_bessel_j(l: int, x: float) -> float:
    """j_l(x) for x > 0 by the upward recurrence from j0 = sin x / x.

    Stable on the zero-hunting range x > l; not intended for x << l.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    if x <= 0:
        raise ValueError("x must be positive")
    j0 = math.sin(x) / x
    if l == 0:
        return j0
    j1 = math.sin(x) / (x * x) - math.cos(x) / x
    if l == 1:
        return j1
    jm, jc = j0, j1
    for n in range(1, l):
        jm, jc = jc, (2 * n + 1) / x * jc - jm
    return jc


def bessel_j(m: int, x: float) -> float:
    """J_m(x) by the alternating power series; accurate for x up to ~30."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    half = 0.5 * x
    term = 1.0
    for i in range(1, m + 1):
        term *= half / i
    total = term
    j = 0
    while True:
        j += 1
        term *= -(half * half) / (j * (j + m))
        total += term
        if abs(term) <= 1e-18 * (abs(total) + 1e-300) or j > 200:
            return total


def _bisect_zero(f, a: float, b: float) -> float:
    fa = f(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        if b - a <= 1e-13 * max(1.0, abs(b)):
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fa < 0) == (fm < 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _scan_zeros(f, x0: float, k: int, dx: float) -> float:
    """k-th sign change of f on (x0, inf), refined by bisection."""
    x = x0
    fx = f(x)
    found = 0
    for _ in range(100_000):
        xn = x + dx
        fn = f(xn)
        if fx == 0.0:
            found += 1
            if found == k:
                return x
        elif (fx < 0) != (fn < 0):
            found += 1
            if found == k:
                return _bisect_zero(f, x, xn)
        x, fx = xn, fn
    raise RuntimeError("zero scan did not find the requested zero")


def spherical_bessel_zero(l: int, k: int) -> float:
    """k-th positive zero of j_l, to about 1e-13 relative."""
    if l < 0 or k < 1:
        raise ValueError("need l >= 0 and k >= 1")
    # j_l > 0 on (0, z_1); scan upward from just above the origin.
    return _scan_zeros(lambda x: spherical_bessel_j(l, x), 1e-6 + 0.5 * l, k, 0.25)


def bessel_j_zero(m: int, k: int) -> float:
    """k-th positive zero of J_m, to about 1e-13 relative."""
    if m < 0 or k < 1:
        raise ValueError("need m >= 0 and k >= 1")
    return _scan_zeros(lambda x: bessel_j(m, x), 1e-6 + 0.5 * m, k, 0.25)


# -- box and Coulomb spectra --------------------------------------------------

def sphere_box_level(l: int, k: int, a: float) -> AnalyticLevel:
    """Spherical box of radius a: E = z_{l,k}^2 / (2 a^2), degeneracy 2l+1."""
    if a <= 0:
        raise ValueError("box radius must be positive")
    z = spherical_bessel_zero(l, k)
    return AnalyticLevel(z * z / (2 * a * a), 2 * l + 1, {"l": l, "k": k})


def cylinder_box_level(m: int, k: int, n_z: int, rho0: float, length: float) -> AnalyticLevel:
    """Cylindrical box: E = z_{m,k}^2/(2 rho0^2) + (n_z pi)^2/(2 L^2).

    Degeneracy 1 for m = 0, else 2 (the +-m pair).
    """
    if rho0 <= 0 or length <= 0:
        raise ValueError("box dimensions must be positive")
    if n_z < 1:
        raise ValueError("n_z must be >= 1")
    z = bessel_j_zero(abs(m), k)
    energy = z * z / (2 * rho0 * rho0) + (n_z * math.pi) ** 2 / (2 * length * length)
    g = 1 if m == 0 else 2
    return AnalyticLevel(energy, g, {"m": m, "k": k, "n_z": n_z})


def hydrogen_level(n: int) -> AnalyticLevel:
    """Unconfined Coulomb spectrum E_n = -1/(2 n^2), degeneracy n^2."""
    if n < 1:
        raise ValueError("principal quantum number n must be >= 1")
    return AnalyticLevel(-0.5 / (n * n), n * n, {"n": n})


def hydrogen_radial_level(l: int, n: int) -> AnalyticLevel:
    """Coulomb level in the fixed-l radial sector (n > l), 3D weight 2l+1."""
    if l < 0 or n < l + 1:
        raise ValueError("need l >= 0 and n >= l + 1")
    return AnalyticLevel(-0.5 / (n * n), 2 * l + 1, {"l": l, "n": n})
