"""Tikhonov-regularized solution of the collocation system.

Minimizes ``||K mu - f||**2 + alpha ||mu||**2`` (Euclidean norms) through the
normal equations ``(alpha I + K^T K) mu = K^T f``, factored by Cholesky.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ConfigurationError, DataError, DomainError
from .potential import DensityVector, KernelMatrix

FIXED = "fixed"
NOISE_ORDER = "noise_order"


@dataclass(frozen=True)
class TikhonovConfig:
    """Regularization parameter rule.

    ``fixed`` uses ``alpha`` as given; ``noise_order`` sets
    ``alpha = scale * delta`` for noise fraction ``delta``.
    """

    rule: str = NOISE_ORDER
    alpha: float | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.rule == FIXED:
            if self.alpha is None or not (self.alpha > 0 and math.isfinite(self.alpha)):
                raise ConfigurationError(f"fixed alpha must be positive, got {self.alpha}")
        elif self.rule == NOISE_ORDER:
            if not (self.scale > 0 and math.isfinite(self.scale)):
                raise ConfigurationError(f"noise-order scale must be positive, got {self.scale}")
        else:
            raise ConfigurationError(f"unknown alpha rule {self.rule!r}")

    @classmethod
    def fixed(cls, alpha: float) -> "TikhonovConfig":
        return cls(FIXED, alpha=float(alpha))

    @classmethod
    def noise_order(cls, scale: float = 1.0) -> "TikhonovConfig":
        return cls(NOISE_ORDER, scale=float(scale))

    def resolve(self, delta: float | None = None) -> float:
        if self.rule == FIXED:
            return float(self.alpha)
        if delta is None or not delta > 0:
            raise ConfigurationError(
                f"noise-order alpha rule needs a positive noise fraction, got {delta}"
            )
        return self.scale * float(delta)

    def to_dict(self) -> dict:
        if self.rule == FIXED:
            return {"rule": FIXED, "alpha": self.alpha}
        return {"rule": NOISE_ORDER, "scale": self.scale}

    @classmethod
    def from_dict(cls, data: dict) -> "TikhonovConfig":
        rule = data.get("rule")
        if rule == FIXED:
            return cls.fixed(data.get("alpha", float("nan")))
        if rule == NOISE_ORDER:
            return cls.noise_order(data.get("scale", 1.0))
        raise ConfigurationError(f"unknown alpha rule {rule!r}")


@dataclass(frozen=True, eq=False)
class SolveReport:
    mu: np.ndarray
    residual_norm: float
    solution_norm: float
    alpha_used: float
    normal_eq_residual: float
    density: DensityVector | None = None


def _as_array(K) -> tuple[np.ndarray, KernelMatrix | None]:
    if isinstance(K, KernelMatrix):
        return K.entries, K
    return np.atleast_2d(np.asarray(K, dtype=float)), None


def _check(A: np.ndarray, f: np.ndarray) -> None:
    if A.size == 0:
        raise DataError("empty system matrix")
    if A.shape[0] != f.shape[0]:
        raise DataError(f"matrix has {A.shape[0]} rows but data has {f.shape[0]} entries")
    if not np.all(np.isfinite(A)):
        raise DataError("system matrix has non-finite entries")
    if not np.all(np.isfinite(f)):
        raise DataError("data vector has non-finite entries")


def _resolve_alpha(cfg, delta) -> float:
    alpha = cfg.resolve(delta) if isinstance(cfg, TikhonovConfig) else float(cfg)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ConfigurationError(f"alpha must be positive, got {alpha}")
    return alpha


def _solve_normal(A, f, gram, rhs, alpha, kmat) -> SolveReport:
    n = gram.shape[0]
    lhs = gram + alpha * np.eye(n)
    mu = cho_solve(cho_factor(lhs, lower=True), rhs)
    normal_res = float(np.linalg.norm(lhs @ mu - rhs))
    density = DensityVector(mu, kmat.source) if kmat is not None else None
    return SolveReport(
        mu=mu,
        residual_norm=float(np.linalg.norm(A @ mu - f)),
        solution_norm=float(np.linalg.norm(mu)),
        alpha_used=alpha,
        normal_eq_residual=normal_res,
        density=density,
    )


def tikhonov_solve(K, f, cfg, delta: float | None = None) -> SolveReport:
    """Solve ``min ||K mu - f||**2 + alpha ||mu||**2``.

    Parameters
    ----------
    K : KernelMatrix or array_like, shape (m, n)
        Rows for the controlled points only.
    f : array_like, shape (m,)
    cfg : TikhonovConfig or float
        A bare float is taken as a fixed alpha.
    delta : float, optional
        Noise fraction, required by the ``noise_order`` rule.
    """
    A, kmat = _as_array(K)
    f = np.asarray(f, dtype=float).ravel()
    _check(A, f)
    alpha = _resolve_alpha(cfg, delta)
    return _solve_normal(A, f, A.T @ A, A.T @ f, alpha, kmat)


def alpha_sweep(K, f, alphas: Sequence[float]) -> list[SolveReport]:
    """One :class:`SolveReport` per alpha; alphas must be positive and ascending."""
    A, kmat = _as_array(K)
    f = np.asarray(f, dtype=float).ravel()
    _check(A, f)
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ConfigurationError("empty alpha list")
    if any(not (a > 0 and math.isfinite(a)) for a in alphas):
        raise ConfigurationError("alphas must be positive")
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise ConfigurationError("alphas must be sorted ascending")
    gram, rhs = A.T @ A, A.T @ f
    return [_solve_normal(A, f, gram, rhs, a, kmat) for a in alphas]


def condition_diagnostics(K) -> tuple[float, float, float]:
    """Largest and smallest singular value and their ratio (inf if singular)."""
    A, _ = _as_array(K)
    if A.size == 0:
        raise DomainError("empty matrix")
    if not np.all(np.isfinite(A)):
        raise DataError("matrix has non-finite entries")
    s = np.linalg.svd(A, compute_uv=False)
    s_max, s_min = float(s[0]), float(s[-1])
    cond = math.inf if s_min < 1e-300 else s_max / s_min
    return s_max, s_min, cond
