"""Logarithmic single-layer kernel, collocation matrix and forward evaluation.

The kernel is ``log(|p - zeta|**2)`` weighted by the rectangle-rule factor
``2 pi r / J``; no ``-1/(2 pi)`` normalization is applied, the density absorbs it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, GeometryError, SingularKernelError
from .geometry import ArcSampling, SourceCircle

_SINGULAR_D2 = 1e-300
# collocation points must stay at least this far inside the source circle
_INSIDE_MARGIN = 1e-9


def kernel(p, zeta, weight: float) -> float:
    """Weighted log of squared distance between ``p`` and ``zeta``."""
    d2 = (p[0] - zeta[0]) ** 2 + (p[1] - zeta[1]) ** 2
    if d2 < _SINGULAR_D2:
        raise SingularKernelError(f"kernel evaluated at coincident points {tuple(p)}")
    return math.log(d2) * weight


def _kernel_block(points: np.ndarray, source: SourceCircle) -> np.ndarray:
    nodes = source.nodes
    d2 = (points[:, 0, None] - nodes[:, 0]) ** 2 + (points[:, 1, None] - nodes[:, 1]) ** 2
    if np.any(d2 < _SINGULAR_D2):
        k = int(np.argwhere(d2 < _SINGULAR_D2)[0, 0])
        raise SingularKernelError(f"point {k} coincides with a source node")
    return np.log(d2) * source.weight


def _require_inside(points: np.ndarray, source: SourceCircle, what: str) -> None:
    dist = source.distance_to_center(points)
    bad = np.flatnonzero(~(dist < source.radius - _INSIDE_MARGIN))
    if bad.size:
        k = int(bad[0])
        raise GeometryError(
            f"{what} {k} at ({points[k, 0]:.9g}, {points[k, 1]:.9g}) is not strictly "
            f"inside the source circle (distance {dist[k]:.9g}, radius {source.radius})"
        )


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    entries: np.ndarray  # (I, J)
    row_points: np.ndarray  # (I, 2)
    source: SourceCircle

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def restrict(self, mask) -> "KernelMatrix":
        """Sub-matrix of the selected rows (boolean mask or index array)."""
        return KernelMatrix(self.entries[mask], self.row_points[mask], self.source)


@dataclass(frozen=True, eq=False)
class DensityVector:
    mu: np.ndarray
    source: SourceCircle

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        if mu.shape != (self.source.J,):
            raise DataError(f"density has shape {mu.shape}, expected ({self.source.J},)")
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True, eq=False)
class FieldSamples:
    points: np.ndarray
    values: np.ndarray


def assemble(rows: ArcSampling | np.ndarray, source: SourceCircle) -> KernelMatrix:
    """Collocation matrix ``K[i, j] = log(|x_i - zeta_j|**2) * 2 pi r / J``.

    ``rows`` is an :class:`ArcSampling` or a plain ``(I, 2)`` array. Every row
    point must lie strictly inside the source circle.
    """
    pts = rows.points if isinstance(rows, ArcSampling) else np.atleast_2d(np.asarray(rows, float))
    _require_inside(pts, source, "collocation point")
    entries = _kernel_block(pts, source)
    entries.setflags(write=False)
    return KernelMatrix(entries, pts, source)


def forward_eval(mu: DensityVector, pts) -> FieldSamples:
    """Evaluate the discrete single-layer potential of ``mu`` at ``pts``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    _require_inside(pts, mu.source, "evaluation point")
    values = _kernel_block(pts, mu.source) @ mu.mu
    return FieldSamples(pts, values)


def discrete_laplacian_check(mu: DensityVector, p, h: float) -> float:
    """Five-point Laplacian of the reconstructed potential at ``p``.

    Should vanish up to O(h**2) truncation and rounding since every kernel
    term is harmonic away from the circle.
    """
    if not 1e-5 <= h <= 1e-2:
        raise GeometryError(f"stencil spacing h={h} outside [1e-5, 1e-2]")
    x, y = float(p[0]), float(p[1])
    stencil = np.array([[x, y], [x + h, y], [x - h, y], [x, y + h], [x, y - h]])
    try:
        _require_inside(stencil, mu.source, "stencil point")
    except GeometryError as exc:
        raise GeometryError(f"Laplacian stencil at ({x}, {y}) leaves the disk: {exc}") from None
    u = forward_eval(mu, stencil).values
    return float((u[1] + u[2] + u[3] + u[4] - 4.0 * u[0]) / h**2)
