"""Continuation experiments: noisy data on a sub-arc, Tikhonov solve, reconstruction.

A :class:`ContinuationCase` fixes the curve, the collocation sampling, the
source circle and which sample indices are controlled (the measured sub-arc).
:func:`run_case` turns it into reconstruction errors on the controlled part
and on the whole arc; :func:`run_table` repeats over noise draws and
:func:`estimate_exponent` fits the Hoelder-type exponent linking the two.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, EstimationError
from .geometry import (
    ArcSampling,
    PaperAffine,
    QuadraticCurve,
    SourceCircle,
    index_ranges_to_mask,
    sample_arc,
)
from .potential import DensityVector, assemble, forward_eval
from .solver import SolveReport, TikhonovConfig, tikhonov_solve

UNIFORM = "uniform"
GAUSSIAN = "gaussian"

# controlled index ranges of the reference cases (1-based, inclusive)
TABLE1_RANGES = {
    "a": ((1, 30),),
    "b": ((1, 60),),
    "c": ((51, 80),),
    "d": ((1, 15), (166, 180)),
    "e": ((31, 45), (136, 150)),
    "f": ((46, 60), (81, 95)),
}
# two-segment case with 30 + 30 points at both ends of the arc
EXTRA_RANGES = {"g": ((1, 30), (151, 180))}
ERROR_TABLE_ROWS = ("a", "c", "d", "g")

PAPER_SAMPLE_WIDTH = 0.35 * math.pi


def threads() -> int:
    """Worker cap from ``HARMOCONT_THREADS`` (default: CPU count, at most 8)."""
    raw = os.environ.get("HARMOCONT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigurationError(f"HARMOCONT_THREADS must be an integer, got {raw!r}")
    return min(8, os.cpu_count() or 1)


def map_ordered(fn: Callable, items: Iterable) -> list:
    """``[fn(x) for x in items]``, possibly in parallel, results in input order."""
    items = list(items)
    workers = min(threads(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class GroundTruth:
    """Harmonic test function sampled on the curve."""

    name: str
    func: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(compare=False)

    def __call__(self, x, y):
        return self.func(np.asarray(x, float), np.asarray(y, float))


def _exp_cos(x, y):
    return np.exp(-2.0 * x) * np.cos(2.0 * y)


TRUTHS = {
    "exp_cos": GroundTruth("exp_cos", _exp_cos),
    "xy": GroundTruth("xy", lambda x, y: x * y),
    "x2_minus_y2": GroundTruth("x2_minus_y2", lambda x, y: x**2 - y**2),
    "log_far": GroundTruth(
        "log_far", lambda x, y: np.log((x - 3.0) ** 2 + (y - 1.0) ** 2)
    ),
}
DEFAULT_TRUTH = TRUTHS["exp_cos"]


def get_truth(name: str) -> GroundTruth:
    try:
        return TRUTHS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown ground truth {name!r}; choose from {sorted(TRUTHS)}"
        ) from None


@dataclass(frozen=True)
class ContinuationCase:
    name: str
    curve: QuadraticCurve
    count: int
    rule: PaperAffine
    source: SourceCircle
    ranges: tuple[tuple[int, int], ...]
    delta: float
    alpha_rule: TikhonovConfig
    seed: int = 0
    noise: str = UNIFORM

    def __post_init__(self):
        ranges = tuple(sorted((int(lo), int(hi)) for lo, hi in self.ranges))
        if not ranges:
            raise ConfigurationError(f"case {self.name!r}: no controlled index ranges")
        for lo, hi in ranges:
            if not 1 <= lo <= hi <= self.count:
                raise ConfigurationError(
                    f"case {self.name!r}: range {lo}-{hi} outside 1..{self.count}"
                )
        for (_, b), (c, _) in zip(ranges, ranges[1:]):
            if c <= b:
                raise ConfigurationError(f"case {self.name!r}: overlapping index ranges")
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise ConfigurationError(f"case {self.name!r}: noise fraction must be >= 0")
        if self.noise not in (UNIFORM, GAUSSIAN):
            raise ConfigurationError(f"unknown noise model {self.noise!r}")
        object.__setattr__(self, "ranges", ranges)

    @property
    def controlled_mask(self) -> np.ndarray:
        return index_ranges_to_mask(self.ranges, self.count)

    @property
    def n_controlled(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.ranges)

    @property
    def alpha(self) -> float:
        return self.alpha_rule.resolve(self.delta)

    def sampling(self) -> ArcSampling:
        return sample_arc(self.curve, self.count, self.rule)

    def with_seed(self, seed: int) -> "ContinuationCase":
        return replace(self, seed=int(seed))

    def with_delta(self, delta: float) -> "ContinuationCase":
        return replace(self, delta=float(delta))


def paper_curve(kind: str) -> QuadraticCurve:
    """The parabola ``y = -0.5 + 2x^2`` or hyperbola ``y^2/0.25 - x^2/0.36 = 1`` on (-0.5, 0.6)."""
    if kind == "parabola":
        return QuadraticCurve.parabola(-0.5, 2.0, -0.5, 0.6)
    if kind == "hyperbola":
        return QuadraticCurve.hyperbola(0.5, 0.6, -0.5, 0.6)
    raise ConfigurationError(f"no preset for curve {kind!r}")


def paper_case(
    kind: str,
    name: str,
    delta: float = 0.01,
    alpha_rule: TikhonovConfig | None = None,
    seed: int = 0,
    ranges: Sequence[tuple[int, int]] | None = None,
) -> ContinuationCase:
    """Reference case ``name`` (``a`` to ``g``) on the preset curve, or custom ``ranges``."""
    if ranges is None:
        try:
            ranges = {**TABLE1_RANGES, **EXTRA_RANGES}[name]
        except KeyError:
            raise ConfigurationError(f"unknown preset case {name!r}") from None
    return ContinuationCase(
        name=name,
        curve=paper_curve(kind),
        count=180,
        rule=PaperAffine(-0.5, PAPER_SAMPLE_WIDTH),
        source=SourceCircle((0.0, 0.0), 1.1, 40),
        ranges=tuple(ranges),
        delta=delta,
        alpha_rule=alpha_rule or TikhonovConfig.noise_order(1.0),
        seed=seed,
    )


def synthesize_data(
    case: ContinuationCase,
    truth: GroundTruth = DEFAULT_TRUTH,
    rng: np.random.Generator | None = None,
    sampling: ArcSampling | None = None,
) -> np.ndarray:
    """Noisy observations ``f_i (1 + delta xi_i)`` on the controlled points.

    ``xi`` is uniform on [-1, 1] (or standard normal with the gaussian model),
    drawn from ``rng`` or a generator seeded with ``case.seed``.
    """
    sampling = sampling or case.sampling()
    pts = sampling.points[case.controlled_mask]
    exact = truth(pts[:, 0], pts[:, 1])
    if case.delta == 0:
        return exact
    rng = rng if rng is not None else np.random.default_rng(case.seed)
    if case.noise == UNIFORM:
        xi = rng.uniform(-1.0, 1.0, size=exact.shape)
    else:
        xi = rng.standard_normal(size=exact.shape)
    return exact * (1.0 + case.delta * xi)


@dataclass(frozen=True, eq=False)
class CaseResult:
    case: ContinuationCase
    mu: DensityVector
    err_tau: float
    err_T: float
    err_tau_max: float
    err_T_max: float
    points: np.ndarray  # (I, 2)
    f: np.ndarray
    u: np.ndarray
    controlled: np.ndarray
    solve: SolveReport

    @property
    def per_point(self) -> list[tuple[float, float, float, float, float]]:
        return [
            (float(x), float(y), float(a), float(b), float(abs(a - b)))
            for (x, y), a, b in zip(self.points, self.f, self.u)
        ]

    def summary_row(self) -> dict:
        return {
            "name": self.case.name,
            "delta": self.case.delta,
            "alpha": self.solve.alpha_used,
            "n_controlled": self.case.n_controlled,
            "err_tau_l2": self.err_tau,
            "err_T_l2": self.err_T,
            "err_tau_max": self.err_tau_max,
            "err_T_max": self.err_T_max,
            "seed": self.case.seed,
        }

    def point_rows(self) -> list[tuple]:
        return [
            (k + 1, float(x), float(y), float(a), float(b), int(c))
            for k, ((x, y), a, b, c) in enumerate(
                zip(self.points, self.f, self.u, self.controlled)
            )
        ]


def run_case(case: ContinuationCase, truth: GroundTruth = DEFAULT_TRUTH) -> CaseResult:
    """Solve for the density from the controlled data and reconstruct on the whole arc."""
    sampling = case.sampling()
    K = assemble(sampling, case.source)
    mask = case.controlled_mask
    data = synthesize_data(case, truth, sampling=sampling)
    report = tikhonov_solve(K.restrict(mask), data, case.alpha_rule, delta=case.delta)
    u = forward_eval(report.density, sampling.points).values
    f = truth(sampling.x, sampling.y)
    diff = f - u
    return CaseResult(
        case=case,
        mu=report.density,
        err_tau=float(np.linalg.norm(diff[mask])),
        err_T=float(np.linalg.norm(diff)),
        err_tau_max=float(np.max(np.abs(diff[mask]))),
        err_T_max=float(np.max(np.abs(diff))),
        points=np.asarray(sampling.points),
        f=f,
        u=u,
        controlled=mask,
        solve=report,
    )


@dataclass(frozen=True)
class TableRow:
    name: str
    delta: float
    alpha: float
    n_controlled: int
    repetitions: int
    err_tau_l2: float
    err_T_l2: float
    err_tau_max: float
    err_T_max: float
    err_T_l2_std: float
    seed: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def repetition_seed(seed: int, k: int) -> int:
    """Seed of repetition ``k``; repetition 0 reuses the case seed."""
    return int(seed) + int(k)


def run_repetitions(
    case: ContinuationCase, truth: GroundTruth = DEFAULT_TRUTH, repetitions: int = 1
) -> list[CaseResult]:
    if repetitions < 1:
        raise ConfigurationError(f"repetitions must be >= 1, got {repetitions}")
    seeds = [repetition_seed(case.seed, k) for k in range(repetitions)]
    return map_ordered(lambda s: run_case(case.with_seed(s), truth), seeds)


def aggregate(results: Sequence[CaseResult]) -> TableRow:
    case = results[0].case
    err_T = np.array([r.err_T for r in results])
    return TableRow(
        name=case.name,
        delta=case.delta,
        alpha=results[0].solve.alpha_used,
        n_controlled=case.n_controlled,
        repetitions=len(results),
        err_tau_l2=float(np.mean([r.err_tau for r in results])),
        err_T_l2=float(np.mean(err_T)),
        err_tau_max=float(np.mean([r.err_tau_max for r in results])),
        err_T_max=float(np.mean([r.err_T_max for r in results])),
        err_T_l2_std=float(np.std(err_T)),
        seed=case.seed,
    )


def run_table(
    cases: Sequence[ContinuationCase],
    truth: GroundTruth = DEFAULT_TRUTH,
    repetitions: int = 1,
) -> list[TableRow]:
    """Mean errors per case over ``repetitions`` noise draws, in case order."""
    return [aggregate(run_repetitions(c, truth, repetitions)) for c in cases]


@dataclass(frozen=True, eq=False)
class ExponentEstimate:
    deltas: np.ndarray
    errors_tau: np.ndarray
    errors_T: np.ndarray
    kappa_hat: float
    intercept: float
    r_squared: float


def fit_exponent(errors_tau, errors_T) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2 of log(err_T) against log(err_tau)."""
    t = np.log(np.asarray(errors_tau, dtype=float))
    T = np.log(np.asarray(errors_T, dtype=float))
    if t.size < 2 or not (np.all(np.isfinite(t)) and np.all(np.isfinite(T))):
        raise EstimationError("need at least two positive, finite error pairs")
    tc = t - t.mean()
    sxx = float(tc @ tc)
    if sxx <= 1e-24 * max(1.0, float(t @ t)):
        raise EstimationError("controlled-part errors have zero spread; slope undefined")
    slope = float(tc @ (T - T.mean())) / sxx
    intercept = float(T.mean() - slope * t.mean())
    resid = T - (intercept + slope * t)
    ss_tot = float(np.sum((T - T.mean()) ** 2))
    ss_res = float(resid @ resid)
    if ss_tot <= 1e-24 * max(1.0, float(T @ T)):
        r2 = 1.0 if ss_res <= 1e-24 * max(1.0, float(T @ T)) else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def estimate_exponent(
    template: ContinuationCase,
    truth: GroundTruth = DEFAULT_TRUTH,
    deltas: Sequence[float] = (0.005, 0.01, 0.02, 0.05),
    repetitions: int = 10,
) -> ExponentEstimate:
    """Empirical stability exponent: slope of log mean err_T vs log mean err_tau.

    Each noise level and repetition gets its own seed derived from
    ``template.seed``.
    """
    deltas = [float(d) for d in deltas]
    if len(deltas) < 3:
        raise ConfigurationError("need at least three noise levels")
    if any(not d > 0 for d in deltas) or any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ConfigurationError("noise levels must be positive and ascending")
    if repetitions < 10:
        raise ConfigurationError(f"need at least 10 repetitions, got {repetitions}")
    jobs = [
        template.with_delta(d).with_seed(_derived_seed(template.seed, i, k))
        for i, d in enumerate(deltas)
        for k in range(repetitions)
    ]
    results = map_ordered(lambda c: run_case(c, truth), jobs)
    tau = np.empty(len(deltas))
    T = np.empty(len(deltas))
    for i in range(len(deltas)):
        chunk = results[i * repetitions : (i + 1) * repetitions]
        tau[i] = np.mean([r.err_tau for r in chunk])
        T[i] = np.mean([r.err_T for r in chunk])
    slope, intercept, r2 = fit_exponent(tau, T)
    return ExponentEstimate(np.array(deltas), tau, T, slope, intercept, r2)


def _derived_seed(seed: int, *keys: int) -> int:
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), *keys])
    return int(ss.generate_state(1, np.uint64)[0])
