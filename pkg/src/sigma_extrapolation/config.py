"""Configuration for experiment runs.

Runtime settings come from environment variables or a .env file; experiment
parameters come from a TOML file checked into ``experiments/<name>/config.toml``
and are validated with pydantic.
"""

from __future__ import annotations

import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Annotated, Literal, Union

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator, model_validator

from .domain import Annulus, Ball, Cube, FrequencyDomain, SectorPair
from .errors import ConfigError
from .family import (
    DiscreteInterpolant,
    FunctionFamily,
    IndicatorBoxTransform,
    MemberSpec,
    SincPower,
    make_scalings,
    make_translates,
)
from .quadrature import Growth, NodeSchedule, tensor_rule
from .solver import SolverConfig
from .spectral import SetKind, SpectralSet

load_dotenv()


def _env_flag(name: str) -> bool:
    return os.getenv(name, "").strip().lower() in {"1", "true", "yes", "on"}


def _env_int(name: str) -> int | None:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else None


@dataclass
class RuntimeSettings:
    """Process-level settings independent of any experiment file."""

    log_level: str = field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))
    log_dir: Path = field(default_factory=lambda: Path(os.getenv("SIGMA_LOG_DIR", "logs")))
    output_dir: Path = field(default_factory=lambda: Path(os.getenv("SIGMA_OUTPUT_DIR", "out")))
    png_enabled: bool = field(default_factory=lambda: _env_flag("SIGMA_PNG"))
    seed: int | None = field(default_factory=lambda: _env_int("SIGMA_SEED"))


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# -- Frequency domains -------------------------------------------------------


class CubeSpec(_Spec):
    shape: Literal["cube"]
    dimension: int = Field(1, ge=1)
    half_width: float

    def build(self) -> FrequencyDomain:
        return Cube(self.dimension, self.half_width)


class BallSpec(_Spec):
    shape: Literal["ball"]
    dimension: int = Field(2, ge=1)
    radius: float

    def build(self) -> FrequencyDomain:
        return Ball(self.dimension, self.radius)


class AnnulusSpec(_Spec):
    shape: Literal["annulus"]
    dimension: int = Field(2, ge=1)
    r_min: float
    r_max: float

    def build(self) -> FrequencyDomain:
        return Annulus(self.dimension, self.r_min, self.r_max)


class SectorPairSpec(_Spec):
    shape: Literal["sector_pair"]
    axis: tuple[float, ...]
    cos_half_angle: float
    r_min: float = 0.0
    r_max: float

    def build(self) -> FrequencyDomain:
        return SectorPair(len(self.axis), self.axis, self.cos_half_angle, self.r_min, self.r_max)


DomainSpec = Annotated[
    Union[CubeSpec, BallSpec, AnnulusSpec, SectorPairSpec], Field(discriminator="shape")
]


# -- Family members and generators -------------------------------------------


class SincPowerSpec(_Spec):
    kind: Literal["sinc_power"]
    power: int = Field(2, ge=1)
    modulation: tuple[float, ...] = (0.0,)
    scale: float = 1.0

    def build(self) -> MemberSpec:
        return SincPower(self.modulation, self.scale, power=self.power)


class IndicatorBoxSpec(_Spec):
    kind: Literal["indicator_box"]
    shift: tuple[float, ...] = ()
    modulation: tuple[float, ...] = (0.0,)
    scale: float = 1.0

    def build(self) -> MemberSpec:
        return IndicatorBoxTransform(self.modulation, self.scale, shift=self.shift)


class DiscreteSpec(_Spec):
    kind: Literal["discrete"]
    values: list
    dx: float | None = None

    def build(self) -> MemberSpec:
        return DiscreteInterpolant.from_image(np.asarray(self.values, dtype=float), self.dx)


MemberConfig = Annotated[
    Union[SincPowerSpec, IndicatorBoxSpec, DiscreteSpec], Field(discriminator="kind")
]


class TranslatesSpec(_Spec):
    base: MemberConfig
    offsets: list[tuple[float, ...]] = Field(default_factory=list)


class ScalingsSpec(_Spec):
    base: MemberConfig
    factor: float = Field(gt=1)
    count: int = Field(ge=1)


class IdxSpec(_Spec):
    images: Path
    labels: Path
    digit: int = Field(ge=0, le=9)
    count: int = Field(ge=1)
    skip: int = Field(0, ge=0)

    @field_validator("images", "labels", mode="after")
    @classmethod
    def _exists(cls, path: Path, info: ValidationInfo) -> Path:
        base = (info.context or {}).get("base_dir")
        if base is not None and not path.is_absolute():
            path = Path(base) / path
        if not path.exists():
            raise ValueError(f"IDX file {path} does not exist")
        return path


class FamilyConfig(_Spec):
    """Exactly one of the generators."""

    members: list[MemberConfig] | None = None
    translates: TranslatesSpec | None = None
    scalings: ScalingsSpec | None = None
    idx: IdxSpec | None = None

    @model_validator(mode="after")
    def _one_source(self) -> FamilyConfig:
        given = [k for k in ("members", "translates", "scalings", "idx") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"family needs exactly one of members/translates/scalings/idx, got {given}")
        if self.members is not None and not self.members:
            raise ValueError("family members list is empty")
        return self


# -- Solver --------------------------------------------------------------------


class SpectralSetSpec(_Spec):
    kind: SetKind = SetKind.NUCLEAR_BALL
    radius: float = Field(1.0, gt=0)

    def build(self) -> SpectralSet:
        return SpectralSet(self.kind, self.radius)


class ScheduleSpec(_Spec):
    min_nodes: int = Field(ge=1)
    max_nodes: int = Field(ge=1)
    growth: Growth = Growth.GEOMETRIC
    factor: float | None = None

    def build(self) -> NodeSchedule:
        return NodeSchedule(self.min_nodes, self.max_nodes, self.growth, self.factor)


class SolverSpec(_Spec):
    delta: float = Field(ge=0)
    tau_g: float = Field(ge=0)
    tau_sigma: float = Field(ge=0)
    iterations: int = Field(ge=1)
    spectral_set: SpectralSetSpec = SpectralSetSpec()
    schedule: ScheduleSpec | None = None
    tensor_resolution: int | None = Field(None, ge=2)
    trace_bound: float | None = None
    denominator_floor: float | None = None
    allow_unregularized: bool = False
    log_every: int = Field(10, ge=1)
    probe_resolution: int = Field(64, ge=2)

    @model_validator(mode="after")
    def _one_rule(self) -> SolverSpec:
        if (self.schedule is None) == (self.tensor_resolution is None):
            raise ValueError("solver needs exactly one of schedule and tensor_resolution")
        if self.delta == 0 and not self.allow_unregularized:
            raise ValueError("delta = 0 requires allow_unregularized = true")
        return self


class MultiplierSpec(_Spec):
    """Which Sigma the extrapolation and cascade stages use."""

    source: Literal["solved", "trace", "single", "semidefinite"] = "solved"
    member: int = Field(0, ge=0)
    vector: list[float] | None = None


# -- Stages --------------------------------------------------------------------


class ExtrapolationSpec(_Spec):
    spacing: float = Field(gt=0)
    keep: DomainSpec | None = None
    subject: int = Field(0, ge=0)
    spatial_shape: tuple[int, ...] = (64,)
    spatial_window: tuple[tuple[float, ...], tuple[float, ...]] | None = None


class SectorSpec(_Spec):
    name: str
    domain: DomainSpec


class MultiresolutionSpec(_Spec):
    products: int = Field(128, ge=1)
    terms: int = Field(257, ge=1)
    window: float = Field(8.0, gt=0)
    points: int = Field(2**13, ge=16)
    boundary_window: int = Field(0, ge=0)
    rescale: int = 0
    mask_resolution: int = Field(1024, ge=2)
    periodization_resolution: int = Field(1024, ge=2)
    spatial_points: int = Field(512, ge=2)
    spatial_window: tuple[float, float] = (-2.0, 3.0)
    unit_mask: bool = False

    @field_validator("terms")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"periodization terms must be odd, got {value}")
        return value


class GpSpec(_Spec):
    steps: int = Field(200, ge=0)
    nodes: int = Field(4096, ge=8)
    spacing: float = Field(gt=0)
    support: tuple[tuple[float, ...], tuple[float, ...]]
    subject: int = Field(0, ge=0)


class FilterSpec(_Spec):
    spacing: float = Field(gt=0)
    shape: tuple[int, ...] = (64, 64)
    window: tuple[tuple[float, ...], tuple[float, ...]] | None = None


class OutputFormat(str, Enum):
    CSV = "csv"
    PGM = "pgm"
    PNG = "png"


class OutputSpec(_Spec):
    directory: Path = Path("out")
    formats: list[OutputFormat] = [OutputFormat.CSV, OutputFormat.PGM]


Stage = Literal["solve", "validate-params", "extrapolate", "cascade", "gp-baseline", "export-filter"]


class ExperimentConfig(_Spec):
    name: str
    alpha: float = Field(gt=1)
    seed: int = 0
    domain: DomainSpec
    family: FamilyConfig
    solver: SolverSpec | None = None
    multiplier: MultiplierSpec = MultiplierSpec()
    sectors: list[SectorSpec] = []
    extrapolation: ExtrapolationSpec | None = None
    multiresolution: MultiresolutionSpec | None = None
    gp: GpSpec | None = None
    filter: FilterSpec | None = None
    outputs: OutputSpec = OutputSpec()
    pipeline: list[Stage] = Field(min_length=1)

    @model_validator(mode="after")
    def _stage_sections(self) -> ExperimentConfig:
        needs = {
            "solve": "solver",
            "validate-params": "solver",
            "extrapolate": "extrapolation",
            "cascade": "multiresolution",
            "gp-baseline": "gp",
            "export-filter": "filter",
        }
        missing = sorted({needs[s] for s in self.pipeline if getattr(self, needs[s]) is None})
        if missing:
            raise ValueError(f"pipeline stages need sections: {', '.join(missing)}")
        for spec in [self.domain] + [s.domain for s in self.sectors]:
            spec.build()
        return self

    def with_overrides(self, seed: int | None = None, output_dir: Path | None = None) -> ExperimentConfig:
        update = {}
        if seed is not None:
            update["seed"] = seed
        if output_dir is not None:
            update["outputs"] = self.outputs.model_copy(update={"directory": Path(output_dir)})
        return self.model_copy(update=update)


def load_experiment(path: str | Path) -> ExperimentConfig:
    """Parse and validate an experiment TOML file; paths inside resolve next to it."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        return ExperimentConfig.model_validate(raw, context={"base_dir": path.parent})
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


# -- Builders --------------------------------------------------------------------


def build_family(spec: FamilyConfig) -> FunctionFamily:
    from src.artifacts.idx import load_idx_images

    if spec.members is not None:
        return FunctionFamily(tuple(m.build() for m in spec.members))
    if spec.translates is not None:
        return make_translates(spec.translates.base.build(), spec.translates.offsets)
    if spec.scalings is not None:
        return make_scalings(spec.scalings.base.build(), spec.scalings.factor, spec.scalings.count)
    idx = spec.idx
    images = load_idx_images(idx.images, idx.labels, idx.digit, idx.count, idx.skip)
    return FunctionFamily(tuple(DiscreteInterpolant.from_image(image) for image in images))


def build_solver_config(spec: SolverSpec, domain: FrequencyDomain, seed: int) -> SolverConfig:
    return SolverConfig(
        delta=spec.delta,
        tau_g=spec.tau_g,
        tau_sigma=spec.tau_sigma,
        iterations=spec.iterations,
        spectral_set=spec.spectral_set.build(),
        schedule=spec.schedule.build() if spec.schedule is not None else None,
        rule=tensor_rule(domain, spec.tensor_resolution) if spec.tensor_resolution else None,
        seed=seed,
        trace_bound=spec.trace_bound,
        denominator_floor=spec.denominator_floor,
        allow_unregularized=spec.allow_unregularized,
        log_every=spec.log_every,
    )
