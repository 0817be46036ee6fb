"""Run configuration: a JSON document describing the curve, sampling and cases.

Bundled presets (``paper_parabola.cfg``, ``paper_hyperbola.cfg``) hold the
reference parabola and hyperbola setups: 180 collocation points, 40 source
nodes on a circle of radius 1.1 around the origin, and cases ``a`` to ``g``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError
from .experiment import (
    EXTRA_RANGES,
    GAUSSIAN,
    PAPER_SAMPLE_WIDTH,
    TABLE1_RANGES,
    TRUTHS,
    UNIFORM,
    ContinuationCase,
    paper_curve,
)
from .geometry import DomainBox, PaperAffine, QuadraticCurve, SourceCircle
from .measure import SlitRectangle
from .solver import TikhonovConfig

SCHEMA_VERSION = 1
PRESETS = {"parabola": "paper_parabola.cfg", "hyperbola": "paper_hyperbola.cfg"}


@dataclass(frozen=True)
class CaseSpec:
    name: str
    ranges: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {"name": self.name, "ranges": [list(r) for r in self.ranges]}


@dataclass(frozen=True)
class MeasureSettings:
    h: float = 0.15
    nx: int = 281
    ny: int = 61
    threshold: float = 0.5
    geometry: SlitRectangle | None = None

    def to_dict(self) -> dict:
        out = {"h": self.h, "nx": self.nx, "ny": self.ny, "threshold": self.threshold}
        if self.geometry is not None:
            out["geometry"] = self.geometry.to_dict()
        return out


@dataclass(frozen=True, eq=False)
class RunConfig:
    curve: QuadraticCurve
    count: int
    rule: PaperAffine
    source: SourceCircle
    cases: tuple[CaseSpec, ...]
    noise_levels: tuple[float, ...]
    alpha_rule: TikhonovConfig
    noise_model: str = UNIFORM
    repetitions: int = 1
    seed: int = 0
    output_dir: str = "out"
    truth: str = "exp_cos"
    domain: DomainBox = field(default_factory=DomainBox.disk)
    measure: MeasureSettings = field(default_factory=MeasureSettings)
    schema_version: int = SCHEMA_VERSION

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.digest())

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "curve": self.curve.to_dict(),
            "sampling": {"I": self.count, **self.rule.to_dict()},
            "source": self.source.to_dict(),
            "cases": [c.to_dict() for c in self.cases],
            "noise_levels": list(self.noise_levels),
            "noise_model": self.noise_model,
            "alpha_rule": self.alpha_rule.to_dict(),
            "repetitions": self.repetitions,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "truth": self.truth,
            "domain": self.domain.to_dict(),
            "measure": self.measure.to_dict(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def build_cases(self, name_filter: str | None = None) -> list[ContinuationCase]:
        """One case per (case spec, noise level), in declaration order."""
        out = []
        for spec in self.cases:
            if name_filter is not None and spec.name != name_filter:
                continue
            for delta in self.noise_levels:
                out.append(
                    ContinuationCase(
                        name=spec.name,
                        curve=self.curve,
                        count=self.count,
                        rule=self.rule,
                        source=self.source,
                        ranges=spec.ranges,
                        delta=delta,
                        alpha_rule=self.alpha_rule,
                        seed=self.seed,
                        noise=self.noise_model,
                    )
                )
        return out


def _require(data: dict, key: str):
    if key not in data:
        raise ConfigurationError(f"config is missing required key {key!r}")
    return data[key]


def _positive_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigurationError(f"{what} must be a positive integer, got {value!r}")
    return value


def from_dict(data: dict) -> RunConfig:
    """Validate a parsed config document."""
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    version = _require(data, "schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigurationError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
        )
    curve = QuadraticCurve.from_dict(_require(data, "curve"))
    sampling = _require(data, "sampling")
    count = _positive_int(_require(sampling, "I"), "sampling.I")
    rule = PaperAffine.from_dict(sampling)
    source = SourceCircle.from_dict(_require(data, "source"))

    cases = []
    for raw in _require(data, "cases"):
        try:
            name = str(raw["name"])
            ranges = tuple((int(lo), int(hi)) for lo, hi in raw["ranges"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid case entry {raw!r}") from exc
        for lo, hi in ranges:
            if not 1 <= lo <= hi <= count:
                raise ConfigurationError(
                    f"case {name!r}: index range {lo}-{hi} invalid for I={count}"
                )
        cases.append(CaseSpec(name, ranges))
    names = [c.name for c in cases]
    if len(set(names)) != len(names):
        raise ConfigurationError("case names must be unique")

    levels = tuple(float(d) for d in _require(data, "noise_levels"))
    if not levels or any(not (d >= 0 and math.isfinite(d)) for d in levels):
        raise ConfigurationError("noise_levels must be a nonempty list of fractions >= 0")
    alpha_rule = TikhonovConfig.from_dict(_require(data, "alpha_rule"))
    if any(d == 0 for d in levels):
        try:
            alpha_rule.resolve(0.0)
        except ConfigurationError:
            raise ConfigurationError(
                "noise level 0 needs a fixed alpha rule (alpha = scale * delta would vanish)"
            ) from None

    noise_model = data.get("noise_model", UNIFORM)
    if noise_model not in (UNIFORM, GAUSSIAN):
        raise ConfigurationError(f"unknown noise_model {noise_model!r}")
    truth = data.get("truth", "exp_cos")
    if truth not in TRUTHS:
        raise ConfigurationError(f"unknown truth {truth!r}; choose from {sorted(TRUTHS)}")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**63:
        raise ConfigurationError(f"seed must be an integer in [0, 2**63), got {seed!r}")

    m = data.get("measure", {})
    geometry = m.get("geometry")
    measure = MeasureSettings(
        h=float(m.get("h", 0.15)),
        nx=_positive_int(m.get("nx", 281), "measure.nx"),
        ny=_positive_int(m.get("ny", 61), "measure.ny"),
        threshold=float(m.get("threshold", 0.5)),
        geometry=SlitRectangle.from_dict(geometry) if geometry is not None else None,
    )
    if not measure.h > 0:
        raise ConfigurationError("measure.h must be positive")
    if measure.ny % 2 == 0:
        raise ConfigurationError("measure.ny must be odd")

    return RunConfig(
        curve=curve,
        count=count,
        rule=rule,
        source=source,
        cases=tuple(cases),
        noise_levels=levels,
        alpha_rule=alpha_rule,
        noise_model=noise_model,
        repetitions=_positive_int(data.get("repetitions", 1), "repetitions"),
        seed=seed,
        output_dir=str(data.get("output_dir", "out")),
        truth=truth,
        domain=DomainBox.from_dict(data["domain"]) if "domain" in data else DomainBox.disk(),
        measure=measure,
        schema_version=version,
    )


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    return from_dict(data)


def load(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        bundled = resources.files("harmocont.presets") / path.name
        if path.parent == Path(".") and bundled.is_file():
            return loads(bundled.read_text())
        raise ConfigurationError(f"config file not found: {path}")
    return loads(path.read_text())


def default_config(curve: str = "parabola") -> RunConfig:
    """The reference setup for ``curve`` ('parabola' or 'hyperbola')."""
    names = list(TABLE1_RANGES) + list(EXTRA_RANGES)
    ranges = {**TABLE1_RANGES, **EXTRA_RANGES}
    return RunConfig(
        curve=paper_curve(curve),
        count=180,
        rule=PaperAffine(-0.5, PAPER_SAMPLE_WIDTH),
        source=SourceCircle((0.0, 0.0), 1.1, 40),
        cases=tuple(CaseSpec(n, ranges[n]) for n in names),
        noise_levels=(0.01, 0.05),
        alpha_rule=TikhonovConfig.noise_order(1.0),
        seed=20240101,
        output_dir=f"out_{curve}",
    )


def preset_path(curve: str) -> Path:
    try:
        name = PRESETS[curve]
    except KeyError:
        raise ConfigurationError(f"no preset for curve {curve!r}") from None
    return Path(str(resources.files("harmocont.presets") / name))
