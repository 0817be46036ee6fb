"""Curves, collocation samplings, source circles and distance diagnostics.

Curves are parameterized by their abscissa ``x``: a parabola
``y = a0 + a2 x**2``, the upper hyperbola branch ``y = (b/c) sqrt(x**2 + c**2)``
(``y**2/b**2 - x**2/c**2 = 1``) or a horizontal line ``y = y0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError, DomainError

PARABOLA = "parabola"
HYPERBOLA = "hyperbola"
LINE = "line"
CURVE_KINDS = (PARABOLA, HYPERBOLA, LINE)

# slack allowed when a sampling rule ends exactly on an interval endpoint
RANGE_SLACK = 1e-9


@dataclass(frozen=True)
class QuadraticCurve:
    """An x-parameterized quadratic arc over ``[x_lo, x_hi]``.

    ``params`` holds ``(a0, a2)`` for a parabola, ``(b, c)`` for the upper
    hyperbola branch and ``(y0,)`` for a line segment.
    """

    kind: str
    params: tuple[float, ...]
    x_lo: float
    x_hi: float

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise ConfigurationError(f"unknown curve kind {self.kind!r}")
        expected = {PARABOLA: 2, HYPERBOLA: 2, LINE: 1}[self.kind]
        if len(self.params) != expected:
            raise ConfigurationError(
                f"{self.kind} takes {expected} parameters, got {len(self.params)}"
            )
        if not all(math.isfinite(p) for p in self.params):
            raise ConfigurationError("curve parameters must be finite")
        if not (math.isfinite(self.x_lo) and math.isfinite(self.x_hi)):
            raise ConfigurationError("curve interval must be finite")
        if not self.x_lo < self.x_hi:
            raise ConfigurationError(
                f"empty curve interval: x_lo={self.x_lo} >= x_hi={self.x_hi}"
            )
        if self.kind == HYPERBOLA and not (self.params[0] > 0 and self.params[1] > 0):
            raise ConfigurationError("hyperbola requires b > 0 and c > 0")

    @classmethod
    def parabola(cls, a0: float, a2: float, x_lo: float, x_hi: float) -> "QuadraticCurve":
        return cls(PARABOLA, (float(a0), float(a2)), float(x_lo), float(x_hi))

    @classmethod
    def hyperbola(cls, b: float, c: float, x_lo: float, x_hi: float) -> "QuadraticCurve":
        return cls(HYPERBOLA, (float(b), float(c)), float(x_lo), float(x_hi))

    @classmethod
    def line(cls, y0: float, x_lo: float, x_hi: float) -> "QuadraticCurve":
        return cls(LINE, (float(y0),), float(x_lo), float(x_hi))

    def y(self, x):
        """Ordinate(s) of the curve at abscissa ``x`` (no interval check)."""
        x = np.asarray(x, dtype=float)
        if self.kind == PARABOLA:
            a0, a2 = self.params
            return a0 + a2 * x**2
        if self.kind == HYPERBOLA:
            b, c = self.params
            return (b / c) * np.sqrt(x**2 + c**2)
        return np.full_like(x, self.params[0])

    def implicit_residual(self, x, y):
        """Residual of the defining implicit equation; zero on the curve."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == PARABOLA:
            a0, a2 = self.params
            return y - a0 - a2 * x**2
        if self.kind == HYPERBOLA:
            b, c = self.params
            return y**2 / b**2 - x**2 / c**2 - 1.0
        return y - self.params[0]

    def contains_x(self, x: float, slack: float = 0.0) -> bool:
        return self.x_lo - slack <= x <= self.x_hi + slack

    def to_dict(self) -> dict:
        names = {PARABOLA: ("a0", "a2"), HYPERBOLA: ("b", "c"), LINE: ("y0",)}[self.kind]
        out = {"kind": self.kind}
        out.update(zip(names, self.params))
        out["x_interval"] = [self.x_lo, self.x_hi]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "QuadraticCurve":
        try:
            kind = data["kind"]
            x_lo, x_hi = data["x_interval"]
            if kind == PARABOLA:
                return cls.parabola(data["a0"], data["a2"], x_lo, x_hi)
            if kind == HYPERBOLA:
                return cls.hyperbola(data["b"], data["c"], x_lo, x_hi)
            if kind == LINE:
                return cls.line(data["y0"], x_lo, x_hi)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"invalid curve spec {data!r}: {exc}") from exc
        raise ConfigurationError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True)
class PaperAffine:
    """Sampling rule ``x_i = x0 + width * i / I`` for ``i = 1..I``.

    Index 0 is never sampled, so ``x0`` itself is excluded and the last
    point lands on ``x0 + width``.
    """

    x0: float
    width: float

    def abscissae(self, count: int) -> np.ndarray:
        i = np.arange(1, count + 1, dtype=float)
        return self.x0 + self.width * i / count

    def to_dict(self) -> dict:
        return {"rule": "paper_affine", "x0": self.x0, "width": self.width}

    @classmethod
    def from_dict(cls, data: dict) -> "PaperAffine":
        if data.get("rule", "paper_affine") != "paper_affine":
            raise ConfigurationError(f"unknown sampling rule {data.get('rule')!r}")
        try:
            return cls(float(data["x0"]), float(data["width"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid sampling rule {data!r}: {exc}") from exc


@dataclass(frozen=True, eq=False)
class ArcSampling:
    curve: QuadraticCurve
    rule: PaperAffine
    points: np.ndarray  # shape (I, 2)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]


@dataclass(frozen=True)
class SourceCircle:
    """Circle carrying the discrete density; nodes at angles ``2 pi j / J``, j=1..J."""

    center: tuple[float, float]
    radius: float
    J: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ConfigurationError(f"source radius must be positive, got {self.radius}")
        if int(self.J) != self.J or self.J < 3:
            raise ConfigurationError(f"source circle needs J >= 3 nodes, got {self.J}")
        cx, cy = self.center
        theta = 2.0 * np.pi * np.arange(1, self.J + 1) / self.J
        nodes = np.column_stack(
            (cx + self.radius * np.cos(theta), cy + self.radius * np.sin(theta))
        )
        nodes.setflags(write=False)
        object.__setattr__(self, "center", (float(cx), float(cy)))
        object.__setattr__(self, "nodes", nodes)

    @property
    def weight(self) -> float:
        """Rectangle-rule arc-length weight ``2 pi r / J``."""
        return 2.0 * np.pi * self.radius / self.J

    def distance_to_center(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])

    def to_dict(self) -> dict:
        return {"center": list(self.center), "r": self.radius, "J": self.J}

    @classmethod
    def from_dict(cls, data: dict) -> "SourceCircle":
        try:
            return cls(tuple(float(c) for c in data["center"]), float(data["r"]), int(data["J"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"invalid source circle {data!r}: {exc}") from exc


@dataclass(frozen=True, eq=False)
class DomainBox:
    """Stand-in for the domain Omega: a convex polygon or a disk.

    Only used for the distance and diameter diagnostics.
    """

    kind: str
    vertices: np.ndarray | None = None
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.0

    @classmethod
    def disk(cls, center=(0.0, 0.0), radius: float = 2.0) -> "DomainBox":
        if not radius > 0:
            raise DomainError("disk radius must be positive")
        return cls("disk", None, (float(center[0]), float(center[1])), float(radius))

    @classmethod
    def rectangle(cls, x_lo, x_hi, y_lo, y_hi) -> "DomainBox":
        if not (x_lo < x_hi and y_lo < y_hi):
            raise DomainError("rectangle must have nonempty interior")
        verts = np.array([[x_lo, y_lo], [x_hi, y_lo], [x_hi, y_hi], [x_lo, y_hi]], float)
        return cls("polygon", verts)

    @classmethod
    def polygon(cls, vertices) -> "DomainBox":
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] < 3 or verts.shape[1] != 2:
            raise DomainError("polygon needs at least three 2-D vertices")
        x, y = verts[:, 0], verts[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        if abs(area) < 1e-14:
            raise DomainError("polygon has empty interior")
        if area < 0:
            verts = verts[::-1].copy()
        return cls("polygon", verts)

    def diameter(self) -> float:
        if self.kind == "disk":
            return 2.0 * self.radius
        diff = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.max(np.hypot(diff[..., 0], diff[..., 1])))

    def boundary_points(self, n: int = 10_000) -> np.ndarray:
        """``n`` points spread uniformly (by arc length) over the boundary."""
        if self.kind == "disk":
            t = 2.0 * np.pi * np.arange(n) / n
            return np.column_stack(
                (self.center[0] + self.radius * np.cos(t), self.center[1] + self.radius * np.sin(t))
            )
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        lengths = np.hypot(*(w - v).T)
        s = np.arange(n) * lengths.sum() / n
        edges = np.searchsorted(np.cumsum(lengths), s, side="right")
        edges = np.minimum(edges, len(v) - 1)
        start = np.concatenate(([0.0], np.cumsum(lengths)[:-1]))[edges]
        frac = ((s - start) / lengths[edges])[:, None]
        return v[edges] + frac * (w[edges] - v[edges])

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "disk":
            return np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1]) < self.radius
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        # counter-clockwise: inside iff left of every edge
        cross = (w[:, 0] - v[:, 0]) * (pts[:, None, 1] - v[:, 1]) - (
            w[:, 1] - v[:, 1]
        ) * (pts[:, None, 0] - v[:, 0])
        return np.all(cross > 0, axis=1)

    def to_dict(self) -> dict:
        if self.kind == "disk":
            return {"kind": "disk", "center": list(self.center), "radius": self.radius}
        return {"kind": "polygon", "vertices": self.vertices.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DomainBox":
        try:
            if data["kind"] == "disk":
                return cls.disk(tuple(data["center"]), float(data["radius"]))
            if data["kind"] == "polygon":
                return cls.polygon(data["vertices"])
        except (KeyError, TypeError, DomainError) as exc:
            raise ConfigurationError(f"invalid domain spec {data!r}: {exc}") from exc
        raise ConfigurationError(f"unknown domain kind {data.get('kind')!r}")


def point_on_curve(curve: QuadraticCurve, x: float) -> tuple[float, float]:
    """Return ``(x, y(x))``; ``x`` must lie in the closed parameter interval."""
    if not math.isfinite(x) or not curve.contains_x(x):
        raise DomainError(f"x={x} outside curve interval [{curve.x_lo}, {curve.x_hi}]")
    return float(x), float(curve.y(x))


def sample_arc(curve: QuadraticCurve, count: int, rule: PaperAffine) -> ArcSampling:
    if int(count) != count or count < 1:
        raise ConfigurationError(f"sample count must be a positive integer, got {count}")
    if not rule.width > 0:
        raise ConfigurationError(f"sampling width must be positive, got {rule.width}")
    x = rule.abscissae(int(count))
    if not (curve.contains_x(x[0], RANGE_SLACK) and curve.contains_x(x[-1], RANGE_SLACK)):
        raise ConfigurationError(
            f"sampling range [{x[0]:.9g}, {x[-1]:.9g}] leaves curve interval "
            f"[{curve.x_lo}, {curve.x_hi}]"
        )
    x = np.clip(x, curve.x_lo, curve.x_hi)
    pts = np.column_stack((x, curve.y(x)))
    pts.setflags(write=False)
    return ArcSampling(curve, rule, pts)


def distance_set_to_set(a, b) -> float:
    """Minimum Euclidean distance between two finite point sets."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise DomainError("distance between sets needs two nonempty point lists")
    if a.shape[0] < b.shape[0]:
        a, b = b, a
    d, _ = cKDTree(a).query(b, k=1)
    return float(np.min(d))


def curve_boundary_distance(
    curve: QuadraticCurve, domain: DomainBox, n: int = 10_000
) -> float:
    """dist(T, boundary of Omega) by dense sampling of both sets."""
    x = np.linspace(curve.x_lo, curve.x_hi, n)
    arc = np.column_stack((x, curve.y(x)))
    if not np.all(domain.contains(arc)):
        raise DomainError("curve is not contained in the domain")
    return distance_set_to_set(arc, domain.boundary_points(n))


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value}")


def analytic_radius_parabola(eps1: float, diam_omega: float) -> float:
    """Width of the complex neighbourhood of the flattened parabola arc.

    ``min(eps1 / (4 diam), eps1 / 4)`` where ``eps1 = dist(T, boundary)``.
    """
    _check_positive(eps1=eps1, diam_omega=diam_omega)
    return min(eps1 / (4.0 * diam_omega), eps1 / 4.0)


def analytic_radius_hyperbola(eps1: float, diam_omega: float) -> float:
    """Same as :func:`analytic_radius_parabola` for the hyperbola branch.

    ``eps1`` is expected already clamped to ``min(1, dist(T, boundary))``.
    """
    _check_positive(eps1=eps1, diam_omega=diam_omega)
    if eps1 > 1.0:
        raise DomainError(f"eps1 must be clamped to (0, 1], got {eps1}")
    return min(eps1 / 6.0, eps1 / (36.0 * diam_omega))


def analytic_radius(curve: QuadraticCurve, dist_t_boundary: float, diam_omega: float) -> float:
    """Dispatch to the radius formula of the curve family (lines use the parabola one)."""
    if curve.kind == HYPERBOLA:
        return analytic_radius_hyperbola(min(1.0, dist_t_boundary), diam_omega)
    return analytic_radius_parabola(dist_t_boundary, diam_omega)


def index_ranges_to_mask(ranges: Sequence[tuple[int, int]], count: int) -> np.ndarray:
    """Boolean mask over ``count`` samples from 1-based inclusive index ranges."""
    mask = np.zeros(count, dtype=bool)
    for lo, hi in ranges:
        mask[lo - 1 : hi] = True
    return mask
