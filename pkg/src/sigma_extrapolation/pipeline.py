"""Experiment stages and their artifacts.

``ExperimentRunner`` executes the stages listed in an ``ExperimentConfig`` in order.
Every file a stage writes is recorded in an ``ArtifactStore``; when a stage fails its
files are renamed with a ``.partial`` suffix, the manifest is written for what exists
and the failure is re-raised as ``StageError`` naming the stage.
"""

from __future__ import annotations

import logging
from dataclasses import asdict
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from src.artifacts import (
    ArtifactStore,
    render_line_plot,
    write_matrix,
    write_pgm,
    write_png,
    write_records,
    write_series,
    write_table,
)

from .config import (
    ExperimentConfig,
    OutputFormat,
    RuntimeSettings,
    build_family,
    build_solver_config,
)
from .domain import Cube, FrequencyDomain, dilate
from .errors import ConfigError, DimensionMismatchError, ExtrapolationError, StageError
from .extrapolation import (
    GridField,
    extrapolate_field,
    extrapolate_sectors,
    extrapolation_error,
    frequency_grid,
    gp_iterate,
    optimal_filter,
    reconstruct_space,
    sample_field,
)
from .family import FunctionFamily, tensor_grid
from .hermitian import HermitianMatrix
from .multiplier import SigmaMultiplier, single_function_multiplier
from .multiresolution import (
    apply_boundary_window,
    cascade,
    cascade_grid,
    decay_slope,
    holder_probe,
    periodization_Phi,
    periodize_mask,
    refinement_defect,
    rescale_mask,
    sample_grid,
    wavelet_hat,
    wavelet_mask,
)
from .quadrature import tensor_rule
from .solver import solve, validate_params

logger = logging.getLogger(__name__)

WHOLE_DOMAIN = "omega0"


class RunResult(NamedTuple):
    status: int
    manifest: Path
    files: list[Path]


class ExperimentRunner:
    """Stateful driver for one experiment: family, domain and solved multipliers."""

    def __init__(self, config: ExperimentConfig, settings: RuntimeSettings | None = None):
        self.config = config
        self.settings = settings or RuntimeSettings()
        self.store = ArtifactStore(config.outputs.directory)
        self.alpha = config.alpha
        self.omega0 = config.domain.build()
        self._family: FunctionFamily | None = None
        self.multipliers: dict[str, SigmaMultiplier] = {}
        self.stages: dict[str, Callable[[], None]] = {
            "solve": self.solve,
            "validate-params": self.validate_params,
            "extrapolate": self.extrapolate,
            "cascade": self.cascade,
            "gp-baseline": self.gp_baseline,
            "export-filter": self.export_filter,
        }

    @property
    def family(self) -> FunctionFamily:
        if self._family is None:
            self._family = build_family(self.config.family)
            logger.info("Family: n=%d, d=%d", self._family.n, self._family.dimension)
        return self._family

    @property
    def formats(self) -> set[OutputFormat]:
        formats = set(self.config.outputs.formats)
        if self.settings.png_enabled:
            formats.add(OutputFormat.PNG)
        return formats

    def run(self, stages: list[str] | None = None) -> RunResult:
        stages = stages if stages is not None else list(self.config.pipeline)
        for stage in stages:
            start = len(self.store.files)
            logger.info("Stage %s: start", stage)
            try:
                self.stages[stage]()
            except (ExtrapolationError, ArithmeticError, LookupError, ValueError, OSError) as exc:
                logger.error("Stage %s failed: %s", stage, exc)
                self.store.mark_partial(start)
                self.store.write_manifest()
                raise StageError(stage, exc) from exc
            logger.info("Stage %s: done (%d files)", stage, len(self.store.files) - start)
        manifest = self.store.write_manifest()
        return RunResult(0, manifest, list(self.store.files))

    # -- Output helpers --------------------------------------------------------

    def _series(self, name: str, coordinates, values, axis: str = "xi", unit: str = "cycles/unit") -> None:
        if OutputFormat.CSV in self.formats:
            self.store.record(write_series(self.store.path(name + ".csv"), coordinates, values, axis, unit))

    def _raster(self, name: str, image: np.ndarray) -> None:
        if OutputFormat.PGM in self.formats:
            self.store.record(write_pgm(self.store.path(name + ".pgm"), image))
        if OutputFormat.PNG in self.formats:
            self.store.record(write_png(self.store.path(name + ".png"), image))

    def _panel(self, name: str, coordinates, values, axis: str = "xi", unit: str = "cycles/unit") -> None:
        """1-D panels as CSV plus line plot, 2-D panels as magnitude raster plus CSV."""
        values = np.asarray(values)
        if values.ndim <= 1 or values.shape[1:] == ():
            self._series(name, coordinates, values, axis, unit)
            self._raster(name, render_line_plot(np.asarray(values).real))
        else:
            self._series(name, coordinates, values.ravel(), axis, unit)
            self._raster(name, np.log1p(np.abs(values)))

    # -- Multipliers -------------------------------------------------------------

    def _solve_parts(self) -> list[tuple[str, FrequencyDomain]]:
        if self.config.sectors:
            return [(s.name, s.domain.build()) for s in self.config.sectors]
        return [(WHOLE_DOMAIN, self.omega0)]

    def _multiplier(self, name: str = WHOLE_DOMAIN) -> SigmaMultiplier:
        if name in self.multipliers:
            return self.multipliers[name]
        spec = self.config.multiplier
        family = self.family
        if spec.source == "solved":
            self.solve()
            return self.multipliers[name]
        if spec.source == "single":
            if spec.member >= family.n:
                raise ConfigError(f"member {spec.member} is not a member index (n={family.n})")
            mult = single_function_multiplier(family, self.alpha, spec.member)
        elif spec.source == "trace":
            mult = SigmaMultiplier(family, self.alpha, HermitianMatrix.identity(family.n))
        else:
            if spec.vector is None or len(spec.vector) != family.n:
                raise ConfigError(f"semidefinite multiplier needs a vector of length {family.n}")
            sigma = HermitianMatrix.outer(np.asarray(spec.vector, dtype=float))
            mult = SigmaMultiplier(family, self.alpha, sigma)
        mult = mult.with_probe_floor(self.omega0)
        self.multipliers[name] = mult
        return mult

    # -- Stages ----------------------------------------------------------------

    def solve(self) -> None:
        spec = self.config.solver
        if spec is None:
            raise ConfigError("the solve stage needs a [solver] section")
        for name, domain in self._solve_parts():
            solver_config = build_solver_config(spec, domain, self.config.seed)
            sigma, mult, trace = solve(self.family, self.alpha, domain, solver_config)
            self.multipliers[name] = mult
            suffix = "" if name == WHOLE_DOMAIN else f"_{name}"
            self.store.record(write_matrix(self.store.path(f"sigma{suffix}.csv"), sigma.data))
            self.store.record(write_records(self.store.path(f"trace{suffix}.csv"), trace.to_rows()))
            probe = tensor_grid(domain, spec.probe_resolution)
            self.store.record(
                write_series(self.store.path(f"multiplier{suffix}.csv"), probe, mult(probe))
            )
            logger.info(
                "Solved %s: trace(Sigma)=%.6g, final objective=%.6e",
                name,
                sigma.trace,
                trace.objectives[-1],
            )

    def validate_params(self) -> None:
        spec = self.config.solver
        rows = []
        for name, domain in self._solve_parts():
            solver_config = build_solver_config(spec, domain, self.config.seed)
            probe = tensor_rule(domain, spec.probe_resolution)
            diagnostics = validate_params(self.family, self.alpha, domain, solver_config, probe)
            row = {"part": name, **asdict(diagnostics), "max_tau_g": diagnostics.max_tau_g}
            rows.append(row)
            if not diagnostics.satisfied:
                logger.warning(
                    "%s: tau_g=%s exceeds the admissible %.3e", name, spec.tau_g, diagnostics.max_tau_g
                )
        self.store.record(write_records(self.store.path("diagnostics.csv"), rows))

    def _known_data(self, spacing: float) -> tuple[GridField, FrequencyDomain]:
        ext = self.config.extrapolation
        if ext.subject >= self.family.n:
            raise ConfigError(f"subject {ext.subject} is not a member index (n={self.family.n})")
        subject = self.family.members[ext.subject]
        keep = ext.keep.build() if ext.keep is not None else self.omega0
        omega0 = self.omega0
        reach = max(float(np.max(np.abs(np.concatenate(d.bounding_box())))) for d in (keep, omega0))
        box = Cube(omega0.dimension, reach)

        def known(points: np.ndarray) -> np.ndarray:
            inside = keep.contains_many(points) | omega0.contains_many(points)
            return np.where(inside, subject.evaluate(points), 0.0)

        return sample_field(known, box, spacing), keep

    def extrapolate(self) -> None:
        ext = self.config.extrapolation
        low, keep = self._known_data(ext.spacing)
        if self.config.sectors:
            parts = [(self._multiplier(name), domain) for name, domain in self._solve_parts()]
            pred = extrapolate_sectors(parts, low, self.alpha, keep)
        else:
            pred = extrapolate_field(self._multiplier(), low, self.alpha, self.omega0, keep=keep)
        subject = self.family.members[ext.subject]
        target = dilate(self.omega0, self.alpha)
        truth = sample_field(subject.evaluate, target, ext.spacing, grid=pred)
        error = extrapolation_error(pred, truth, target)
        untouched = extrapolation_error(
            extrapolate_field(lambda p: np.zeros(len(p)), low, self.alpha, self.omega0, keep=keep, target=pred),
            truth,
            target,
        )
        logger.info(
            "Relative L2 error on alpha*Omega0: %.6e (known data only: %.6e)", error, untouched
        )

        for name, field in (("low", low), ("extrapolated", pred)):
            self._panel(name, field.nodes(), field.values if field.dimension > 1 else field.values.ravel())
        window = ext.spatial_window
        shape = ext.spatial_shape
        if len(shape) != low.dimension:
            raise DimensionMismatchError(f"spatial_shape {shape} does not match d={low.dimension}")
        for name, field in (("u0", low), ("u1", pred)):
            image = reconstruct_space(field, shape, window)
            if low.dimension == 1:
                self._series(name, image.axes[0], image.values, axis="x", unit="unit")
            else:
                self._raster(name, image.real)
        self.store.record(
            write_table(
                self.store.path("extrapolation_error.csv"),
                ["region", "relative_l2 [1]", "known_only_relative_l2 [1]"],
                [["alpha*omega0", error, untouched]],
            )
        )

    def cascade(self) -> None:
        mr = self.config.multiresolution
        if self.omega0.dimension != 1:
            raise DimensionMismatchError("the wavelet pipeline is defined for d = 1")
        if mr.unit_mask:
            base = lambda points: np.ones(len(points), dtype=complex)  # noqa: E731
        else:
            base = self._multiplier()
            lo, hi = self.omega0.bounding_box()
            if lo[0] > -0.5 or hi[0] < 0.5:
                logger.warning("Omega0 does not contain [-1/2, 1/2]; the periodized mask extrapolates m")
        mask_fn = rescale_mask(apply_boundary_window(base, mr.boundary_window), mr.rescale)
        mask = periodize_mask(mask_fn, mr.mask_resolution)
        holder_probe(mask)

        grid = cascade_grid(mr.window, mr.points)
        phi_hat = cascade(mask, mr.products, grid)
        nodes = grid.nodes()
        logger.info(
            "Cascade: J=%d, last increment %.3e, zero-set hits %d",
            mr.products,
            phi_hat.increment,
            phi_hat.zero_set_hits,
        )
        probe = nodes[np.abs(nodes[:, 0]) <= mr.window / 2]
        logger.info("Refinement defect: %.3e", refinement_defect(phi_hat, mask, probe))
        if mr.window >= 64:
            logger.info("Decay slope over [4, 64]: %.3f", decay_slope(phi_hat))

        big_phi = periodization_Phi(phi_hat, mr.terms, mr.periodization_resolution)
        g = wavelet_mask(mask, big_phi)
        psi_hat = wavelet_hat(g, phi_hat)
        samples = sample_grid(mr.mask_resolution)
        phi_samples = sample_grid(mr.periodization_resolution)
        lo, hi = mr.spatial_window
        phi = reconstruct_space(phi_hat.grid, (mr.spatial_points,), ((lo,), (hi,)))
        psi = reconstruct_space(psi_hat, (mr.spatial_points,), ((lo,), (hi,)))
        logger.info("psi imaginary residue: %.3e", psi.imaginary_residue())

        self._panel("f", nodes, self.family.members[0].evaluate(nodes))
        self._panel("m", samples, mask(samples))
        self._panel("phi_hat", nodes, phi_hat.grid.values)
        self._panel("phi", phi.axes[0], phi.values, axis="x", unit="unit")
        self._panel("Phi", phi_samples, big_phi(phi_samples))
        self._panel("g", samples, g(samples))
        self._panel("psi_hat", nodes, psi_hat.values)
        self._panel("psi", psi.axes[0], psi.values, axis="x", unit="unit")

    def gp_baseline(self) -> None:
        gp = self.config.gp
        d = self.omega0.dimension
        subject = self.family.members[gp.subject]
        half = gp.nodes // 2
        grid = GridField(np.zeros((gp.nodes,) * d), (gp.spacing,) * d, (-half * gp.spacing,) * d)
        data = grid.with_values(subject.evaluate(grid.nodes()))
        residuals: list[tuple[int, float]] = []
        result = gp_iterate(
            data, self.omega0, gp.support, gp.steps, callback=lambda k, r: residuals.append((k, r))
        )
        if residuals:
            logger.info("GP: %d steps, final Omega0 residual %.3e", gp.steps, residuals[-1][1])
        self.store.record(
            write_table(self.store.path("gp_residuals.csv"), ["step", "residual [1]"], residuals)
        )
        self._series("gp_field", result.nodes(), result.values.ravel())

    def export_filter(self) -> None:
        spec = self.config.filter
        for name, domain in self._solve_parts():
            suffix = "" if name == WHOLE_DOMAIN else f"_{name}"
            mult = self._multiplier(name)
            image = optimal_filter(mult, domain, self.alpha, spec.spacing, spec.shape, spec.window)
            if domain.dimension == 1:
                self._series(f"filter{suffix}", image.axes[0], image.values, axis="x", unit="unit")
                continue
            self._raster(f"filter_re{suffix}", image.real)
            self._raster(f"filter_abs{suffix}", np.abs(image.values))
            grid = frequency_grid(domain, spec.spacing)
            nodes = grid.nodes()
            values = np.zeros(nodes.shape[0], dtype=complex)
            inside = domain.contains_many(nodes)
            values[inside] = mult(nodes[inside])
            panel = values.reshape(grid.shape)
            self._raster(f"multiplier_abs{suffix}", np.abs(panel))
            self._raster(f"multiplier_phase{suffix}", np.angle(panel))


def run_experiment(
    config: ExperimentConfig,
    settings: RuntimeSettings | None = None,
    stages: list[str] | None = None,
) -> RunResult:
    """Run the configured stages (or ``stages``); raises StageError naming the failed stage."""
    return ExperimentRunner(config, settings).run(stages)
