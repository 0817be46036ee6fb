"""Harmonic measure of slits in a rectangle, by finite differences.

The rectangle ``D = [lambda0, lambda0 + r] x [-h, h]`` carries one or more
horizontal slits on ``nu = 0``. The harmonic measure ``phi`` is 0 on the
rectangle boundary, 1 on the slits and discretely harmonic elsewhere
(5-point stencil on a uniform, possibly anisotropic grid).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ConfigurationError, PreconditionError, ResolutionError

DEFAULT_TOL = 1e-10
DEFAULT_TOL_DISC = 5e-2


@dataclass(frozen=True)
class SlitRectangle:
    lambda0: float
    r: float
    h: float
    slits: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not (self.r > 0 and self.h > 0):
            raise ConfigurationError(f"rectangle needs r > 0 and h > 0, got r={self.r}, h={self.h}")
        slits = tuple(sorted((float(a), float(b)) for a, b in self.slits))
        if not slits:
            raise ConfigurationError("at least one slit is required")
        for r1, r2 in slits:
            if not 0 < r1 < r2 < self.r:
                raise ConfigurationError(
                    f"slit ({r1}, {r2}) must satisfy 0 < r1 < r2 < r={self.r}"
                )
        for (_, b), (c, _) in zip(slits, slits[1:]):
            if c <= b:
                raise ConfigurationError("slits must be pairwise disjoint")
        object.__setattr__(self, "slits", slits)

    @classmethod
    def single(cls, lambda0, r, h, r1, r2) -> "SlitRectangle":
        return cls(float(lambda0), float(r), float(h), ((float(r1), float(r2)),))

    @property
    def r2(self) -> float:
        """Right end of the rightmost slit, relative to ``lambda0``."""
        return self.slits[-1][1]

    def to_dict(self) -> dict:
        return {
            "lambda0": self.lambda0,
            "r": self.r,
            "h": self.h,
            "slits": [list(s) for s in self.slits],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SlitRectangle":
        try:
            return cls(
                float(data["lambda0"]),
                float(data["r"]),
                float(data["h"]),
                tuple(tuple(s) for s in data["slits"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"invalid measure geometry {data!r}: {exc}") from exc


def snap_slits(geom: SlitRectangle, nx: int) -> list[tuple[int, int]]:
    """Grid-node index ranges (inclusive) of each slit on an ``nx``-node axis.

    Endpoints round to the nearest node and are kept off the rectangle's
    vertical sides.
    """
    step = geom.r / (nx - 1)
    out = []
    for r1, r2 in geom.slits:
        lo = min(max(int(round(r1 / step)), 1), nx - 2)
        hi = min(max(int(round(r2 / step)), 1), nx - 2)
        if hi <= lo:
            raise ResolutionError(
                f"slit ({r1}, {r2}) collapses to a single node on a {nx}-node grid"
            )
        if out and lo <= out[-1][1]:
            raise ResolutionError("neighbouring slits merge on this grid; refine nx")
        out.append((lo, hi))
    return out


@dataclass(frozen=True, eq=False)
class MeasureGrid:
    geometry: SlitRectangle
    nx: int
    ny: int
    phi: np.ndarray  # (nx, ny), phi[k, m] at (lam[k], nu[m])
    solver_residual: float = 0.0
    iterations: int = 0
    slit_nodes: list[tuple[int, int]] = field(init=False, repr=False)

    def __post_init__(self):
        if self.phi.shape != (self.nx, self.ny):
            raise ResolutionError(f"phi has shape {self.phi.shape}, expected {(self.nx, self.ny)}")
        object.__setattr__(self, "slit_nodes", snap_slits(self.geometry, self.nx))

    @property
    def lam(self) -> np.ndarray:
        g = self.geometry
        return g.lambda0 + g.r * np.arange(self.nx) / (self.nx - 1)

    @property
    def nu(self) -> np.ndarray:
        g = self.geometry
        return -g.h + 2.0 * g.h * np.arange(self.ny) / (self.ny - 1)

    @property
    def axis_index(self) -> int:
        return (self.ny - 1) // 2

    @property
    def axis_phi(self) -> np.ndarray:
        """phi along nu = 0."""
        return self.phi[:, self.axis_index]

    @property
    def slit_mask(self) -> np.ndarray:
        """Boolean mask over the nu = 0 nodes lying on a slit."""
        mask = np.zeros(self.nx, dtype=bool)
        for lo, hi in self.slit_nodes:
            mask[lo : hi + 1] = True
        return mask

    def z(self) -> np.ndarray:
        """Complex coordinates ``lam + i nu`` of every grid node, shape (nx, ny)."""
        return self.lam[:, None] + 1j * self.nu[None, :]


def _dirichlet_mask(nx: int, ny: int, slit_nodes) -> tuple[np.ndarray, np.ndarray]:
    fixed = np.zeros((nx, ny), dtype=bool)
    fixed[0, :] = fixed[-1, :] = fixed[:, 0] = fixed[:, -1] = True
    values = np.zeros((nx, ny))
    mid = (ny - 1) // 2
    for lo, hi in slit_nodes:
        fixed[lo : hi + 1, mid] = True
        values[lo : hi + 1, mid] = 1.0
    return fixed, values


def stencil_residual(phi: np.ndarray, fixed: np.ndarray, dx: float, dy: float) -> float:
    """Max over free nodes of ``|phi - weighted neighbour average|``."""
    wx = dy**2 / (2.0 * (dx**2 + dy**2))
    wy = dx**2 / (2.0 * (dx**2 + dy**2))
    avg = wx * (phi[2:, 1:-1] + phi[:-2, 1:-1]) + wy * (phi[1:-1, 2:] + phi[1:-1, :-2])
    res = np.abs(phi[1:-1, 1:-1] - avg)
    res[fixed[1:-1, 1:-1]] = 0.0
    return float(res.max()) if res.size else 0.0


def solve_measure(geom: SlitRectangle, nx: int, ny: int, tol: float = DEFAULT_TOL) -> MeasureGrid:
    """Solve the discrete Dirichlet problem for the harmonic measure of the slits.

    Uses a sparse LU factorization, followed by residual-correction passes
    until the max stencil residual is at most ``tol``.
    """
    if nx < 11 or ny < 11:
        raise ResolutionError(f"grid needs nx, ny >= 11, got {nx}x{ny}")
    if ny % 2 == 0:
        raise ResolutionError(f"ny must be odd so nu = 0 is a grid line, got {ny}")
    if not 0 < tol <= 1e-4:
        raise PreconditionError(f"tol must lie in (0, 1e-4], got {tol}")
    slit_nodes = snap_slits(geom, nx)
    fixed, boundary_values = _dirichlet_mask(nx, ny, slit_nodes)
    phi = boundary_values.copy()
    dx = geom.r / (nx - 1)
    dy = 2.0 * geom.h / (ny - 1)
    wx = dy**2 / (2.0 * (dx**2 + dy**2))
    wy = dx**2 / (2.0 * (dx**2 + dy**2))

    free = ~fixed
    index = -np.ones((nx, ny), dtype=np.int64)
    index[free] = np.arange(int(free.sum()))
    ks, ms = np.nonzero(free)
    rows = [index[ks, ms]]
    cols = [index[ks, ms]]
    data = [np.ones(ks.size)]
    rhs = np.zeros(ks.size)
    for dk, dm, w in ((1, 0, wx), (-1, 0, wx), (0, 1, wy), (0, -1, wy)):
        nk, nm = ks + dk, ms + dm
        nb_free = free[nk, nm]
        rows.append(index[ks, ms][nb_free])
        cols.append(index[nk, nm][nb_free])
        data.append(np.full(int(nb_free.sum()), -w))
        np.add.at(rhs, index[ks, ms][~nb_free], w * phi[nk, nm][~nb_free])
    A = sp.csc_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(ks.size, ks.size),
    )
    lu = splu(A)
    sol = lu.solve(rhs)
    iterations = 1
    phi[free] = sol
    residual = stencil_residual(phi, fixed, dx, dy)
    while residual > tol and iterations < 5:
        sol = sol + lu.solve(rhs - A @ sol)
        phi[free] = sol
        residual = stencil_residual(phi, fixed, dx, dy)
        iterations += 1
    # the exact discrete solution is even in nu; remove rounding asymmetry
    phi = 0.5 * (phi + phi[:, ::-1])
    phi[fixed] = boundary_values[fixed]
    residual = stencil_residual(phi, fixed, dx, dy)
    if residual > tol:
        raise ResolutionError(f"stencil residual {residual:.3e} above tolerance {tol:.3e}")
    phi.setflags(write=False)
    return MeasureGrid(geom, nx, ny, phi, residual, iterations)


@dataclass(frozen=True)
class BoundFit:
    c4_hat: float
    fit_interval: tuple[float, float]


def fit_lower_bound(grid: MeasureGrid) -> BoundFit:
    """Largest ``c`` with ``phi(x, 0) >= c (lambda0 + r - x)`` right of the slits.

    Only nodes strictly between the rightmost slit end and the right side of
    the rectangle enter the minimum.
    """
    g = grid.geometry
    right = g.lambda0 + g.r
    last = grid.slit_nodes[-1][1]
    nodes = np.arange(last + 1, grid.nx - 1)
    if nodes.size == 0:
        raise ResolutionError("no grid nodes between the slit and the rectangle side")
    x = grid.lam[nodes]
    ratio = grid.axis_phi[nodes] / (right - x)
    return BoundFit(max(0.0, float(ratio.min())), (float(grid.lam[last]), right))


def good_controlled_mask(grid: MeasureGrid, threshold: float = 0.5) -> np.ndarray:
    """True at nu = 0 nodes where the harmonic measure exceeds ``threshold``."""
    if not 0 < threshold < 1:
        raise PreconditionError(f"threshold must lie in (0, 1), got {threshold}")
    return grid.axis_phi > threshold


@dataclass(frozen=True, eq=False)
class TwoConstantsReport:
    x: np.ndarray
    abs_v: np.ndarray
    bound: np.ndarray
    tol_disc: float
    violations: list[tuple[float, float, float]]

    @property
    def ok(self) -> bool:
        return not self.violations


def two_constants_check(
    grid: MeasureGrid,
    v_samples: np.ndarray,
    M1: float,
    eps: float,
    tol_disc: float | None = None,
) -> TwoConstantsReport:
    """Check ``|v(x)| <= M1 (eps/M1)**phi(x)`` on nu = 0 right of the slits.

    ``v_samples`` holds a holomorphic function on the grid nodes (shape
    ``(nx, ny)``) or only along nu = 0 (shape ``(nx,)``). ``tol_disc``
    defaults to ``5e-2 * M1``.
    """
    v = np.asarray(v_samples)
    axis = v[:, grid.axis_index] if v.ndim == 2 else v
    if axis.shape != (grid.nx,):
        raise PreconditionError(f"v_samples do not match a {grid.nx}x{grid.ny} grid")
    if M1 < 0 or eps < 0:
        raise PreconditionError("M1 and eps must be nonnegative")
    if eps > M1:
        raise PreconditionError(f"eps={eps} exceeds M1={M1}")
    if v.ndim == 2 and np.max(np.abs(v)) > M1 * (1 + 1e-12):
        raise PreconditionError("M1 is not an upper bound of |v| on the grid")
    if tol_disc is None:
        tol_disc = DEFAULT_TOL_DISC * M1
    nodes = np.arange(grid.slit_nodes[-1][1], grid.nx)
    x = grid.lam[nodes]
    phi = grid.axis_phi[nodes]
    abs_v = np.abs(axis[nodes])
    if M1 == 0:
        bound = np.zeros_like(phi)
    else:
        bound = M1 * np.power(eps / M1, phi)
    bad = abs_v > bound + tol_disc
    violations = [(float(a), float(b), float(c)) for a, b, c in zip(x[bad], abs_v[bad], bound[bad])]
    return TwoConstantsReport(x, abs_v, bound, float(tol_disc), violations)


def holomorphic_inputs(
    grid: MeasureGrid, func: Callable[[np.ndarray], np.ndarray]
) -> tuple[np.ndarray, float, float]:
    """Sample ``func`` on the grid; return samples, M1 = max|v| on D, eps = max|v| on the slits."""
    v = func(grid.z())
    M1 = float(np.max(np.abs(v)))
    eps = float(np.max(np.abs(v[grid.slit_mask, grid.axis_index])))
    return v, M1, eps


def holomorphic_test_suite() -> dict[str, Callable[[np.ndarray], np.ndarray]]:
    """Ten entire functions used to exercise the two-constants bound."""
    return {
        "z": lambda z: z,
        "z^2-0.3": lambda z: z**2 - 0.3,
        "z^3+z": lambda z: z**3 + z,
        "(z-0.5)^4": lambda z: (z - 0.5) ** 4,
        "z^5-2z^2+1": lambda z: z**5 - 2 * z**2 + 1,
        "exp(z)": np.exp,
        "exp(2z)": lambda z: np.exp(2 * z),
        "exp(4z)": lambda z: np.exp(4 * z),
        "sin(3z)": lambda z: np.sin(3 * z),
        "cos(2z)exp(-z)": lambda z: np.cos(2 * z) * np.exp(-z),
    }


def case_geometry(
    x_lo: float,
    x_hi: float,
    sample_x: np.ndarray,
    ranges: Sequence[tuple[int, int]],
    h: float = 0.15,
) -> SlitRectangle:
    """Rectangle ``[x_lo - h, x_hi + h] x [-h, h]`` with slits at the controlled x-ranges.

    ``ranges`` are 1-based inclusive indices into ``sample_x``. The margin
    ``h`` on both sides keeps every slit off the vertical sides, also for
    sub-arcs that end on the last sample.
    """
    lam0 = float(x_lo) - h
    slits = tuple(
        (float(sample_x[lo - 1] - lam0), float(sample_x[hi - 1] - lam0)) for lo, hi in ranges
    )
    return SlitRectangle(lam0, float(x_hi - x_lo) + 2.0 * h, float(h), slits)


def axis_rows(grid: MeasureGrid, threshold: float = 0.5) -> list[tuple[float, float, int]]:
    """Rows ``(x, phi, good_controlled)`` along nu = 0, ready for CSV output."""
    mask = good_controlled_mask(grid, threshold)
    return [(float(x), float(p), int(m)) for x, p, m in zip(grid.lam, grid.axis_phi, mask)]


def max_norm_difference(fine: MeasureGrid, coarse: MeasureGrid) -> float:
    """Max |phi_fine - phi_coarse| on the coarse nodes (fine = 2x refinement)."""
    if (fine.nx - 1) != 2 * (coarse.nx - 1) or (fine.ny - 1) != 2 * (coarse.ny - 1):
        raise ResolutionError("fine grid must be an exact 2x refinement of the coarse grid")
    return float(np.max(np.abs(fine.phi[::2, ::2] - coarse.phi)))


__all__ = [
    "SlitRectangle",
    "MeasureGrid",
    "BoundFit",
    "TwoConstantsReport",
    "solve_measure",
    "fit_lower_bound",
    "good_controlled_mask",
    "two_constants_check",
    "holomorphic_inputs",
    "holomorphic_test_suite",
    "case_geometry",
    "axis_rows",
    "max_norm_difference",
    "snap_slits",
]
