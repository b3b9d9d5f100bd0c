"""Grids and the discrete inner product for the three solver geometries.

Radial and cylindrical-rho axes are staggered: nodes sit at ``(i + 1/2) h``
so no sample coincides with the coordinate singularity at the origin (nor
with the -1/r Coulomb singularity).  The z axis and Cartesian axes are
node-aligned and symmetric about the origin.  Quadrature is the midpoint
rule in the geometry's natural measure (``r^2 dr``, ``rho drho dz``,
``dx dy dz``), which makes the flux-form Hamiltonian discretization exactly
self-adjoint.

Grids and fields are immutable after construction; every operation here is
pure and uses a fixed summation order, so repeated runs are bit-identical.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainTooSmallError, IncompatibleFieldsError, ZeroNormError

__all__ = ["Geometry", "Grid", "Field", "build_grid", "inner_product", "normalize"]

_MIN_NODES = 4


class Geometry(enum.Enum):
    RADIAL = "radial"
    CYLINDRICAL = "cylindrical"
    CARTESIAN3 = "cartesian3"

    @property
    def ndim(self) -> int:
        return _NDIM[self]

    @property
    def axis_names(self) -> tuple[str, ...]:
        return _AXIS_NAMES[self]


_NDIM = {Geometry.RADIAL: 1, Geometry.CYLINDRICAL: 2, Geometry.CARTESIAN3: 3}
_AXIS_NAMES = {
    Geometry.RADIAL: ("r",),
    Geometry.CYLINDRICAL: ("rho", "z"),
    Geometry.CARTESIAN3: ("x", "y", "z"),
}
# Staggered axes start half a spacing from the coordinate singularity.
_STAGGERED = {
    Geometry.RADIAL: (True,),
    Geometry.CYLINDRICAL: (True, False),
    Geometry.CARTESIAN3: (False, False, False),
}


@dataclass(frozen=True)
class Grid:
    """A uniform grid in one of the supported geometries.

    Attributes
    ----------
    geometry : Geometry
    spacings : tuple of float
        Spacing per axis (all positive).
    extents : tuple of float
        Requested extent per axis: the outer coordinate for staggered axes,
        the half-width of the symmetric interval for node axes.
    axes : tuple of 1d ndarray
        Node coordinates per axis, ordered ascending.
    staggered : tuple of bool
        Which axes are offset half a spacing from the origin.
    weights : ndarray
        Midpoint quadrature weight per node, shaped like a field on this
        grid; strictly positive.
    """

    geometry: Geometry
    spacings: tuple[float, ...]
    extents: tuple[float, ...]
    axes: tuple[np.ndarray, ...]
    staggered: tuple[bool, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        for a in self.axes:
            a.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def nnodes(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Per-axis node coordinates broadcast to the full grid shape."""
        grids = np.meshgrid(*self.axes, indexing="ij")
        for g in grids:
            g.setflags(write=False)
        return tuple(grids)

    def compatible(self, other: "Grid") -> bool:
        """True when fields on the two grids can be combined point by point."""
        return (
            self.geometry is other.geometry
            and self.shape == other.shape
            and self.spacings == other.spacings
            and self.extents == other.extents
        )

    def describe(self) -> str:
        parts = [self.geometry.value]
        for name, h, ext in zip(self.geometry.axis_names, self.spacings, self.extents):
            parts.append(f"h_{name}={h:g} ext_{name}={ext:g}")
        return " ".join(parts)


@dataclass(frozen=True)
class Field:
    """A real-valued state sampled on a grid.

    ``mode_l`` must be present exactly for radial grids (angular momentum of
    the reduced radial problem) and ``mode_m`` exactly for cylindrical ones
    (azimuthal mode).  Values are copied and frozen on construction.
    """

    grid: Grid
    values: np.ndarray
    mode_l: Optional[int] = None
    mode_m: Optional[int] = None

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"values shape {vals.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        geo = self.grid.geometry
        if geo is Geometry.RADIAL:
            if self.mode_l is None or self.mode_m is not None:
                raise ValueError("radial fields carry mode_l and no mode_m")
            if self.mode_l < 0:
                raise ValueError("mode_l must be >= 0")
        elif geo is Geometry.CYLINDRICAL:
            if self.mode_m is None or self.mode_l is not None:
                raise ValueError("cylindrical fields carry mode_m and no mode_l")
        else:
            if self.mode_l is not None or self.mode_m is not None:
                raise ValueError("cartesian fields carry no mode numbers")

    def with_values(self, values: np.ndarray) -> "Field":
        """A new field on the same grid and modes with different values."""
        return Field(self.grid, values, mode_l=self.mode_l, mode_m=self.mode_m)

    def same_space(self, other: "Field") -> bool:
        return (
            self.grid.compatible(other.grid)
            and self.mode_l == other.mode_l
            and self.mode_m == other.mode_m
        )


def _as_tuple(value: Union[float, Sequence[float]], n: int, name: str) -> tuple[float, ...]:
    if np.isscalar(value):
        out = (float(value),) * n
    else:
        out = tuple(float(v) for v in value)
    if len(out) != n:
        raise ValueError(f"{name} must provide {n} value(s), got {len(out)}")
    return out


def _staggered_axis(h: float, extent: float) -> np.ndarray:
    # Nodes (i + 1/2) h on (0, extent]; the outer domain edge is the flux
    # face at n*h where the field is forced to zero.
    n = int(math.floor(extent / h + 1e-9))
    if n < _MIN_NODES:
        raise DomainTooSmallError(
            f"extent {extent} with spacing {h} yields {n} nodes; need >= {_MIN_NODES}"
        )
    return (np.arange(n) + 0.5) * h


def _node_axis(h: float, half_extent: float) -> np.ndarray:
    # Symmetric node-aligned axis k*h for k = -m..m; the origin is a node
    # when the count is odd (which this construction always produces).
    m = int(math.floor(half_extent / h + 1e-9))
    n = 2 * m + 1
    if n < _MIN_NODES:
        raise DomainTooSmallError(
            f"half-extent {half_extent} with spacing {h} yields {n} nodes; need >= {_MIN_NODES}"
        )
    return np.arange(-m, m + 1) * h


def build_grid(
    geometry: Geometry,
    spacings: Union[float, Sequence[float]],
    extents: Union[float, Sequence[float]],
) -> Grid:
    """Construct a grid for the given geometry.

    Parameters
    ----------
    geometry : Geometry
    spacings : float or sequence of float
        Spacing per axis; a scalar is broadcast to all axes.
    extents : float or sequence of float
        Radial axis: the outer radius (nodes fill ``(0, r_max]`` staggered).
        Cylindrical: ``(rho_max, z_half)`` where z spans ``[-z_half, z_half]``.
        Cartesian: half-width per axis, domain ``[-L, L]^3``.

    The largest node-aligned grid inside the requested extents is used, so
    actual node coordinates never exceed the extents.

    Raises
    ------
    ValueError
        Non-positive spacing or extent.
    DomainTooSmallError
        Fewer than four nodes on some axis.
    """
    ndim = geometry.ndim
    hs = _as_tuple(spacings, ndim, "spacings")
    exts = _as_tuple(extents, ndim, "extents")
    for h in hs:
        if not (h > 0 and math.isfinite(h)):
            raise ValueError(f"spacings must be positive, got {h}")
    for e in exts:
        if not (e > 0 and math.isfinite(e)):
            raise ValueError(f"extents must be positive, got {e}")

    if geometry is Geometry.RADIAL:
        r = _staggered_axis(hs[0], exts[0])
        axes = (r,)
        weights = r**2 * hs[0]
    elif geometry is Geometry.CYLINDRICAL:
        rho = _staggered_axis(hs[0], exts[0])
        z = _node_axis(hs[1], exts[1])
        axes = (rho, z)
        weights = np.broadcast_to(
            (rho * hs[0] * hs[1])[:, None], (rho.size, z.size)
        ).copy()
    else:
        xyz = tuple(_node_axis(h, e) for h, e in zip(hs, exts))
        axes = xyz
        weights = np.full(tuple(a.size for a in xyz), hs[0] * hs[1] * hs[2])

    return Grid(
        geometry=geometry,
        spacings=hs,
        extents=exts,
        axes=axes,
        staggered=_STAGGERED[geometry],
        weights=weights,
    )


def _check_same_space(f: Field, g: Field) -> None:
    if not f.same_space(g):
        raise IncompatibleFieldsError(
            "fields live on different grids or carry different mode numbers"
        )


def inner_product(f: Field, g: Field) -> float:
    """Discrete inner product ``sum_nodes w * f * g`` in the grid's measure.

    Symmetric and bilinear; ``inner_product(f, f) >= 0``.  The summation
    order is fixed (numpy pairwise sum over the C-ordered array), so results
    are reproducible bit for bit.
    """
    _check_same_space(f, g)
    return float(np.sum(f.values * g.values * f.grid.weights))


def normalize(f: Field) -> Field:
    """Scale ``f`` to unit norm; direction is preserved.

    Raises
    ------
    ZeroNormError
        If ``<f|f>`` is zero (or not finite).
    """
    n2 = inner_product(f, f)
    if not (n2 > 0.0) or not math.isfinite(n2):
        raise ZeroNormError("cannot normalize a zero-norm field")
    return f.with_values(f.values / math.sqrt(n2))
