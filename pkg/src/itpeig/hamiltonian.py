"""Model potentials and the discrete Hamiltonian -1/2 laplacian + V.

The second-derivative terms use conservative (flux-form) central
differences.  On staggered axes the flux through the face at the origin
vanishes identically (the face area ``r^2`` or ``rho`` is zero there),
which realizes the correct regularity condition at the axis; the outer
face at ``r_max`` carries an antisymmetric ghost so the field is pinned to
zero exactly at the domain edge.  Node-aligned axes use plain three-point
differences with zero ghosts.  The resulting operator is exactly
self-adjoint in the midpoint-weighted inner product, which is what makes
the Rayleigh-quotient descent identity hold in the discrete system.

Box and cone models are imposed as Dirichlet masks: the state is forced to
zero at and beyond the wall.  Masks are exact for these models and avoid
the stiffness of large penalty potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .errors import IncompatibleFieldsError, ZeroNormError
from .mesh import Field, Geometry, Grid, inner_product

__all__ = [
    "HarmonicOscillator",
    "SphericalBox",
    "CylindricalBox",
    "ConeDot",
    "HydrogenicDot",
    "PotentialSpec",
    "WALL",
    "HamiltonianSpec",
    "potential_at",
    "apply",
    "expectation_H",
    "expectation_H2",
    "energy_moments",
]

#: Marker returned by :func:`potential_at` where the state is pinned to zero.
WALL = math.inf

# Relative slack when classifying nodes against a wall surface: a node that
# lands on the wall up to float round-off counts as "at the wall" (zero).
_WALL_TOL = 1e-9


@dataclass(frozen=True)
class HarmonicOscillator:
    """V = r^2 / 2 (equivalently (rho^2 + z^2)/2); allowed in every geometry."""

    def describe(self) -> str:
        return "harmonic_oscillator"


@dataclass(frozen=True)
class SphericalBox:
    """V = 0 inside r < a, hard wall outside."""

    a: float

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError("spherical box radius must be positive")

    def describe(self) -> str:
        return f"spherical_box a={self.a:g}"


@dataclass(frozen=True)
class CylindricalBox:
    """V = 0 inside rho < rho0, |z| < length/2; hard wall outside."""

    rho0: float
    length: float

    def __post_init__(self) -> None:
        if not (self.rho0 > 0 and self.length > 0):
            raise ValueError("cylindrical box dimensions must be positive")

    def describe(self) -> str:
        return f"cylindrical_box rho0={self.rho0:g} length={self.length:g}"


@dataclass(frozen=True)
class ConeDot:
    """Hard-wall cone: inside 0 < z < height, rho < base_radius*(1 - z/height)."""

    base_radius: float
    height: float

    def __post_init__(self) -> None:
        if not (self.base_radius > 0 and self.height > 0):
            raise ValueError("cone dimensions must be positive")

    def describe(self) -> str:
        return f"cone_dot base_radius={self.base_radius:g} height={self.height:g}"


@dataclass(frozen=True)
class HydrogenicDot:
    """Attractive Coulomb center V = -1/r, optionally confined to r < box_radius.

    Staggered radial grids never sample r = 0, so no regularization of the
    singularity is needed there.
    """

    box_radius: Optional[float] = None

    def __post_init__(self) -> None:
        if self.box_radius is not None and not self.box_radius > 0:
            raise ValueError("box radius must be positive")

    def describe(self) -> str:
        if self.box_radius is None:
            return "hydrogenic_dot"
        return f"hydrogenic_dot box_radius={self.box_radius:g}"


PotentialSpec = Union[HarmonicOscillator, SphericalBox, CylindricalBox, ConeDot, HydrogenicDot]

# Geometries on which each potential kind makes sense.
_SPHERICAL_KINDS = (HarmonicOscillator, SphericalBox, HydrogenicDot)
_COMPAT = {
    HarmonicOscillator: (Geometry.RADIAL, Geometry.CYLINDRICAL, Geometry.CARTESIAN3),
    SphericalBox: (Geometry.RADIAL, Geometry.CARTESIAN3),
    HydrogenicDot: (Geometry.RADIAL, Geometry.CARTESIAN3),
    CylindricalBox: (Geometry.CYLINDRICAL, Geometry.CARTESIAN3),
    ConeDot: (Geometry.CYLINDRICAL, Geometry.CARTESIAN3),
}


def _radius_from(coords: tuple[float, ...]) -> float:
    return math.sqrt(sum(c * c for c in coords))


def potential_at(p: PotentialSpec, *coords: float) -> float:
    """Point evaluation of a potential in its natural coordinates.

    Spherical kinds take ``r`` or ``(x, y, z)``; cylindrical kinds take
    ``(rho, z)`` or ``(x, y, z)``.  Returns the finite potential value, or
    :data:`WALL` where the state is constrained to zero.
    """
    if isinstance(p, HarmonicOscillator):
        return 0.5 * sum(c * c for c in coords)
    if isinstance(p, SphericalBox):
        r = coords[0] if len(coords) == 1 else _radius_from(coords)
        return 0.0 if r < p.a else WALL
    if isinstance(p, HydrogenicDot):
        r = coords[0] if len(coords) == 1 else _radius_from(coords)
        if p.box_radius is not None and r >= p.box_radius:
            return WALL
        return -1.0 / r
    if isinstance(p, CylindricalBox):
        if len(coords) == 2:
            rho, z = coords
        else:
            rho, z = math.hypot(coords[0], coords[1]), coords[2]
        return 0.0 if (rho < p.rho0 and abs(z) < 0.5 * p.length) else WALL
    if isinstance(p, ConeDot):
        if len(coords) == 2:
            rho, z = coords
        else:
            rho, z = math.hypot(coords[0], coords[1]), coords[2]
        inside = 0.0 < z < p.height and rho < p.base_radius * (1.0 - z / p.height)
        return 0.0 if inside else WALL
    raise TypeError(f"unknown potential kind {type(p).__name__}")


def _spherical_radius(grid: Grid) -> np.ndarray:
    if grid.geometry is Geometry.RADIAL:
        return grid.coordinates[0]
    if grid.geometry is Geometry.CARTESIAN3:
        x, y, z = grid.coordinates
        return np.sqrt(x * x + y * y + z * z)
    raise IncompatibleFieldsError("spherical potential on a non-spherical grid")


def _cylindrical_coords(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    if grid.geometry is Geometry.CYLINDRICAL:
        return grid.coordinates
    if grid.geometry is Geometry.CARTESIAN3:
        x, y, z = grid.coordinates
        return np.hypot(x, y), z
    raise IncompatibleFieldsError("cylindrical potential on an incompatible grid")


def _evaluate_potential(p: PotentialSpec, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (V, inside) on the grid; V is zero on wall nodes."""
    geo = grid.geometry
    if geo not in _COMPAT[type(p)]:
        raise ValueError(
            f"{type(p).__name__} is not compatible with {geo.value} grids"
        )
    if isinstance(p, HarmonicOscillator):
        r2 = sum(c * c for c in grid.coordinates)
        return 0.5 * r2, np.ones(grid.shape, dtype=bool)
    if isinstance(p, SphericalBox):
        r = _spherical_radius(grid)
        inside = r < p.a * (1.0 - _WALL_TOL)
        return np.zeros(grid.shape), inside
    if isinstance(p, HydrogenicDot):
        r = _spherical_radius(grid)
        if np.any(r == 0.0):
            raise ValueError(
                "hydrogenic potential needs a grid with no node at r = 0; "
                "use a radial grid or an even Cartesian node count"
            )
        if p.box_radius is None:
            inside = np.ones(grid.shape, dtype=bool)
        else:
            inside = r < p.box_radius * (1.0 - _WALL_TOL)
        return np.where(inside, -1.0 / r, 0.0), inside
    if isinstance(p, CylindricalBox):
        rho, z = _cylindrical_coords(grid)
        inside = (rho < p.rho0 * (1.0 - _WALL_TOL)) & (
            np.abs(z) < 0.5 * p.length * (1.0 - _WALL_TOL)
        )
        return np.zeros(grid.shape), inside
    if isinstance(p, ConeDot):
        rho, z = _cylindrical_coords(grid)
        zeps = _WALL_TOL * p.height
        inside = (z > zeps) & (z < p.height * (1.0 - _WALL_TOL)) & (
            rho < p.base_radius * (1.0 - z / p.height) * (1.0 - _WALL_TOL)
        )
        return np.zeros(grid.shape), inside
    raise TypeError(f"unknown potential kind {type(p).__name__}")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Grid + potential + mode numbers; defines the discrete operator H.

    Mode numbers follow the field convention: radial grids require
    ``mode_l`` (centrifugal term ``l(l+1)/(2 r^2)``), cylindrical grids
    require ``mode_m`` (``m^2/(2 rho^2)``), Cartesian grids carry neither.
    """

    grid: Grid
    potential: PotentialSpec
    mode_l: Optional[int] = None
    mode_m: Optional[int] = None

    def __post_init__(self) -> None:
        geo = self.grid.geometry
        if geo is Geometry.RADIAL:
            if self.mode_l is None or self.mode_m is not None:
                raise ValueError("radial Hamiltonians carry mode_l and no mode_m")
            if self.mode_l < 0:
                raise ValueError("mode_l must be >= 0")
        elif geo is Geometry.CYLINDRICAL:
            if self.mode_m is None or self.mode_l is not None:
                raise ValueError("cylindrical Hamiltonians carry mode_m and no mode_l")
        else:
            if self.mode_l is not None or self.mode_m is not None:
                raise ValueError("cartesian Hamiltonians carry no mode numbers")
        _ = _evaluate_potential(self.potential, self.grid)  # compat check

    # -- cached per-grid arrays -------------------------------------------

    @cached_property
    def _potential_and_mask(self) -> tuple[np.ndarray, np.ndarray]:
        V, inside = _evaluate_potential(self.potential, self.grid)
        V = np.ascontiguousarray(V, dtype=np.float64)
        V.setflags(write=False)
        inside.setflags(write=False)
        return V, inside

    @property
    def potential_values(self) -> np.ndarray:
        """Finite potential values; zero on wall nodes."""
        return self._potential_and_mask[0]

    @property
    def inside(self) -> np.ndarray:
        """Boolean mask of non-wall nodes."""
        return self._potential_and_mask[1]

    @cached_property
    def centrifugal(self) -> np.ndarray:
        geo = self.grid.geometry
        if geo is Geometry.RADIAL:
            r = self.grid.coordinates[0]
            out = self.mode_l * (self.mode_l + 1) / (2.0 * r * r)
        elif geo is Geometry.CYLINDRICAL:
            rho = self.grid.coordinates[0]
            out = np.broadcast_to(
                (self.mode_m**2 / (2.0 * rho * rho))[:, None], self.grid.shape
            ).copy()
        else:
            out = np.zeros(self.grid.shape)
        out = np.ascontiguousarray(out, dtype=np.float64)
        out.setflags(write=False)
        return out

    @cached_property
    def _local_term(self) -> np.ndarray:
        out = self.potential_values + self.centrifugal
        out = np.where(self.inside, out, 0.0)
        out.setflags(write=False)
        return out

    @cached_property
    def _face_areas(self) -> np.ndarray:
        # Flux-face geometric factor on the staggered axis: r^2 (radial) or
        # rho (cylindrical) evaluated at faces i*h, i = 0..n.  The first
        # entry is exactly zero, which switches off the inner flux.
        h = self.grid.spacings[0]
        n = self.grid.shape[0]
        faces = np.arange(n + 1) * h
        if self.grid.geometry is Geometry.RADIAL:
            return faces**2
        return faces

    @cached_property
    def _inv_cell(self) -> np.ndarray:
        # 1 / (2 * cell_volume_factor * h^2) for the staggered axis.
        h = self.grid.spacings[0]
        c = self.grid.axes[0]
        if self.grid.geometry is Geometry.RADIAL:
            return 1.0 / (2.0 * c * c * h * h)
        return 1.0 / (2.0 * c * h * h)

    # -- operator application ---------------------------------------------

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        """Apply H to raw node values (the kernel behind :func:`apply`)."""
        v = np.where(self.inside, values, 0.0)
        geo = self.grid.geometry
        if geo is Geometry.RADIAL:
            out = self._staggered_kinetic(v)
        elif geo is Geometry.CYLINDRICAL:
            out = self._staggered_kinetic(v)
            out += self._node_axis_kinetic(v, axis=1)
        else:
            out = self._node_axis_kinetic(v, axis=0)
            out += self._node_axis_kinetic(v, axis=1)
            out += self._node_axis_kinetic(v, axis=2)
        out += self._local_term * v
        return np.where(self.inside, out, 0.0)

    def _staggered_kinetic(self, v: np.ndarray) -> np.ndarray:
        # -(1/(2 c)) d/dr [a(r) dv/dr] in flux form along axis 0, with
        # a = r^2 (c = r^2) or a = rho (c = rho).  Antisymmetric ghost at
        # the outer face pins the field to zero exactly at the domain edge.
        n = self.grid.shape[0]
        A = self._face_areas
        d = np.empty((n + 1,) + v.shape[1:])
        d[0] = 0.0
        d[1:n] = v[1:] - v[:-1]
        d[n] = -2.0 * v[-1]
        if v.ndim == 1:
            flux = A * d
            return -(flux[1:] - flux[:-1]) * self._inv_cell
        flux = A[:, None] * d
        return -(flux[1:] - flux[:-1]) * self._inv_cell[:, None]

    def _node_axis_kinetic(self, v: np.ndarray, axis: int) -> np.ndarray:
        # Three-point -1/2 d^2/dx^2 with zero ghosts beyond the end nodes.
        h = self.grid.spacings[axis]
        inv2h2 = 1.0 / (2.0 * h * h)
        out = v / (h * h)
        lo = [slice(None)] * v.ndim
        hi = [slice(None)] * v.ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        lo, hi = tuple(lo), tuple(hi)
        out[lo] -= inv2h2 * v[hi]
        out[hi] -= inv2h2 * v[lo]
        return out

    def field_matches(self, f: Field) -> bool:
        return (
            f.grid.compatible(self.grid)
            and f.mode_l == self.mode_l
            and f.mode_m == self.mode_m
        )

    def describe(self) -> str:
        mode = ""
        if self.mode_l is not None:
            mode = f" l={self.mode_l}"
        if self.mode_m is not None:
            mode = f" m={self.mode_m}"
        return f"{self.potential.describe()} on {self.grid.describe()}{mode}"


def _check_field(h: HamiltonianSpec, f: Field) -> None:
    if not h.field_matches(f):
        raise IncompatibleFieldsError(
            "field grid/modes do not match the Hamiltonian"
        )


def apply(h: HamiltonianSpec, f: Field) -> Field:
    """Apply the discrete Hamiltonian: H f = kinetic + centrifugal + V terms.

    The field is assumed to vanish on wall nodes (enforced by masking); the
    output is zero there as well.
    """
    _check_field(h, f)
    return f.with_values(h.apply_values(f.values))


def energy_moments(h: HamiltonianSpec, f: Field) -> tuple[float, float]:
    """Return (<H>, <H^2>) for a (not necessarily normalized) field.

    ``<H^2>`` is computed as ``<Hf|Hf>/<f|f>``, which equals ``<f|H^2|f>``
    because the discretization is self-adjoint in the weighted inner
    product.
    """
    _check_field(h, f)
    n2 = inner_product(f, f)
    if not n2 > 0.0:
        raise ZeroNormError("expectation values need a nonzero field")
    g = f.with_values(h.apply_values(f.values))
    return inner_product(f, g) / n2, inner_product(g, g) / n2


def expectation_H(h: HamiltonianSpec, f: Field) -> float:
    """Rayleigh quotient <f|H|f>/<f|f>."""
    return energy_moments(h, f)[0]


def expectation_H2(h: HamiltonianSpec, f: Field) -> float:
    """Second moment <f|H^2|f>/<f|f>."""
    return energy_moments(h, f)[1]
