"""Regularized fixed-point iteration for the worst-case optimal Sigma.

Each iteration k performs the two-step update::

    m_k         = Sigma-multiplier of (delta I + Sigma_k)
    Sigma_{k+1} = proj_W(tau_sigma * Sigma_k + tau_g * G(m_k))

starting from Sigma_0 = I, so the first multiplier is the trace multiplier. With a
fixed rule and admissible step sizes the map is a contraction (see
``validate_params``); with a Monte Carlo schedule every iteration draws a fresh,
growing node set from a seed derived from (seed, k).

Usage::

    config = SolverConfig(delta=1e-6, tau_g=0.25, tau_sigma=0.5, iterations=1000,
                          spectral_set=SpectralSet.nuclear_ball(1.0),
                          schedule=NodeSchedule(1000, 100000), seed=7)
    sigma, multiplier, trace = solve(family, 2.0, Cube(1, 0.5), config)
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .domain import FrequencyDomain
from .errors import CommonZeroError, ConfigError, ExtrapolationError, SolverError
from .family import FunctionFamily, tensor_grid
from .gram import gram_from_samples, worst_case_objective
from .hermitian import HermitianMatrix
from .multiplier import FLOOR_GRID_RESOLUTION, SigmaMultiplier, grid_floor, sigma_quotient
from .quadrature import NodeSchedule, QuadratureRule, derive_seed, monte_carlo_rule
from .spectral import SpectralSet, max_trace, project_spectral

logger = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    delta: float
    tau_g: float
    tau_sigma: float
    iterations: int
    spectral_set: SpectralSet
    schedule: NodeSchedule | None = None
    rule: QuadratureRule | None = None
    seed: int = 0
    sigma0: HermitianMatrix | None = None
    trace_bound: float | None = None
    denominator_floor: float | None = None
    allow_unregularized: bool = False
    log_every: int = 10

    def __post_init__(self):
        if self.delta < 0 or (self.delta == 0 and not self.allow_unregularized):
            raise ConfigError(
                f"delta must be positive (got {self.delta}); delta = 0 requires allow_unregularized"
            )
        if self.tau_g < 0 or self.tau_sigma < 0:
            raise ConfigError(f"step sizes must be nonnegative, got {self.tau_g}, {self.tau_sigma}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if (self.schedule is None) == (self.rule is None):
            raise ConfigError("exactly one of schedule and rule must be given")
        if self.delta == 0:
            logger.warning("Running the unregularized iteration; multipliers may become undefined")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    objective: float
    step: float
    nodes: int
    sigma_norm: float
    floor_events: int
    trace: float
    min_eigenvalue: float


@dataclass
class SolverTrace:
    records: list[IterationRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: IterationRecord) -> None:
        self.records.append(record)

    @property
    def steps(self) -> np.ndarray:
        return np.array([r.step for r in self.records])

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    def to_rows(self) -> list[dict]:
        return [asdict(r) for r in self.records]


class SolveResult(NamedTuple):
    sigma: HermitianMatrix
    multiplier: SigmaMultiplier
    trace: SolverTrace


@dataclass(frozen=True)
class ContractionDiagnostics:
    tau_sigma: float
    kappa: float
    r_m: float
    l_m: float
    r_f: float
    trace_bound: float
    coupling: float
    bound: float
    satisfied: bool

    @property
    def max_tau_g(self) -> float:
        """Largest tau_g keeping the bound below 1 for the configured tau_sigma."""
        if self.coupling == 0:
            return math.inf
        return max(0.0, 1.0 - self.tau_sigma) / self.coupling


class _Samples(NamedTuple):
    rule: QuadratureRule
    values: np.ndarray
    dilated: np.ndarray


def _sample(family: FunctionFamily, alpha: float, rule: QuadratureRule) -> _Samples:
    return _Samples(rule, family.evaluate(rule.nodes), family.evaluate(alpha * rule.nodes))


def _floor_samples(
    family: FunctionFamily, domain: FrequencyDomain | None, config: SolverConfig
) -> np.ndarray | None:
    """Family samples on a fixed grid of the domain; they set the floor when none is configured."""
    if config.denominator_floor is not None or domain is None:
        return None
    return family.evaluate(tensor_grid(domain, FLOOR_GRID_RESOLUTION))


def _update(
    sigma: HermitianMatrix,
    samples: _Samples,
    config: SolverConfig,
    floor_samples: np.ndarray | None = None,
) -> tuple[HermitianMatrix, HermitianMatrix, int]:
    """One fixed-point step; returns (Sigma_next, G, floor_events)."""
    weight = config.delta * np.eye(sigma.n) + sigma.data
    floor = config.denominator_floor
    if floor is None and floor_samples is not None:
        floor = grid_floor(floor_samples, weight)
    quotient = sigma_quotient(samples.values, samples.dilated, weight, floor)
    g = gram_from_samples(
        samples.values, samples.dilated, quotient.values, samples.rule.weights, samples.rule.nodes
    )
    target = sigma.combine(config.tau_sigma, g, config.tau_g)
    return project_spectral(config.spectral_set, target), g, quotient.floor_events


def solve(
    family: FunctionFamily, alpha: float, domain: FrequencyDomain, config: SolverConfig
) -> SolveResult:
    """Run ``config.iterations`` fixed-point steps and return (Sigma, multiplier, trace)."""
    sigma = config.sigma0 if config.sigma0 is not None else HermitianMatrix.identity(family.n)
    fixed = _sample(family, alpha, config.rule) if config.rule is not None else None
    floor_samples = _floor_samples(family, domain, config)
    trace = SolverTrace()
    logger.info(
        "Solving: n=%d, alpha=%s, delta=%s, tau_g=%s, tau_sigma=%s, %d iterations, W=%s(%s)",
        family.n,
        alpha,
        config.delta,
        config.tau_g,
        config.tau_sigma,
        config.iterations,
        config.spectral_set.kind.value,
        config.spectral_set.radius,
    )

    for k in range(config.iterations):
        if fixed is not None:
            samples = fixed
        else:
            count = config.schedule.count(k, config.iterations)
            rule = monte_carlo_rule(domain, count, derive_seed(config.seed, k))
            samples = _sample(family, alpha, rule)

        try:
            sigma_next, g, floor_events = _update(sigma, samples, config, floor_samples)
        except SolverError:
            raise
        except ExtrapolationError as exc:
            raise SolverError(str(exc), iteration=k) from exc

        objective = worst_case_objective(config.spectral_set, g, config.delta)
        if not math.isfinite(objective):
            raise SolverError(f"objective is not finite ({objective})", iteration=k)

        step = (sigma_next - sigma).frobenius_norm
        values = sigma_next.eigenvalues()
        record = IterationRecord(
            iteration=k,
            objective=objective,
            step=step,
            nodes=samples.rule.size,
            sigma_norm=sigma.frobenius_norm,
            floor_events=floor_events,
            trace=float(values.sum()),
            min_eigenvalue=float(values[-1]),
        )
        trace.append(record)
        if floor_events:
            logger.warning("Iteration %d: %d floored denominators", k, floor_events)
        logger.debug("Iteration %d: %s", k, record)
        if (k + 1) % config.log_every == 0 or k == config.iterations - 1:
            logger.info(
                "Iteration %d/%d: objective=%.6e step=%.3e nodes=%d",
                k + 1,
                config.iterations,
                objective,
                step,
                samples.rule.size,
            )
        sigma = sigma_next

    multiplier = SigmaMultiplier(
        family, alpha, sigma, config.delta, denominator_floor=config.denominator_floor
    )
    if config.denominator_floor is None:
        multiplier = multiplier.with_probe_floor(domain)
    return SolveResult(sigma, multiplier, trace)


def fixed_point_residual(
    sigma: HermitianMatrix,
    family: FunctionFamily,
    alpha: float,
    config: SolverConfig,
    rule: QuadratureRule,
    domain: FrequencyDomain | None = None,
) -> float:
    """||Sigma - proj_W(tau_sigma Sigma + tau_g G(m_Sigma))||_F.

    Pass ``domain`` to floor the denominators the way ``solve`` does.
    """
    floor_samples = _floor_samples(family, domain, config)
    sigma_next, _, _ = _update(sigma, _sample(family, alpha, rule), config, floor_samples)
    return (sigma - sigma_next).frobenius_norm


def contraction_ratios(trace: SolverTrace) -> np.ndarray:
    """Ratios step_{k+1} / step_k of consecutive iterations."""
    steps = trace.steps
    with np.errstate(divide="ignore", invalid="ignore"):
        return steps[1:] / steps[:-1]


def validate_params(
    family: FunctionFamily,
    alpha: float,
    domain: FrequencyDomain,
    config: SolverConfig,
    probe_rule: QuadratureRule,
) -> ContractionDiagnostics:
    """Quadrature estimates of the contraction constants for ``config``.

    The iteration contracts when tau_sigma + 2 n tau_g R_F L_M (1 + R_M) < 1, with
    kappa = n + Delta/delta and Delta >= sup trace over W.
    """
    if config.delta <= 0:
        raise ConfigError("contraction constants need delta > 0")
    n = family.n
    delta_cap = config.trace_bound if config.trace_bound is not None else max_trace(
        config.spectral_set, n
    )
    if delta_cap < max_trace(config.spectral_set, n):
        logger.warning(
            "Trace bound %.3g is below sup trace over W (%.3g)",
            delta_cap,
            max_trace(config.spectral_set, n),
        )

    samples = _sample(family, alpha, probe_rule)
    power = np.sum(np.abs(samples.values) ** 2, axis=1)
    if np.any(power == 0):
        bad = int(np.flatnonzero(power == 0)[0])
        raise CommonZeroError(
            f"all members vanish inside {domain}; shrink the low-frequency set",
            node=probe_rule.nodes[bad].tolist(),
        )
    ratio = np.sum(np.abs(samples.dilated) ** 2, axis=1) / power
    measure = probe_rule.total_weight
    mean_ratio_sq = float(np.sum(probe_rule.weights * ratio)) / measure
    mean_ratio_4 = float(np.sum(probe_rule.weights * ratio**2)) / measure

    kappa = n + delta_cap / config.delta
    r_m = kappa * math.sqrt(measure) * math.sqrt(mean_ratio_sq)
    l_m = (math.sqrt(measure) / config.delta) * (1.0 + kappa * math.sqrt(mean_ratio_4))
    r_f = float(max(np.abs(samples.values).max(), np.abs(samples.dilated).max()))
    coupling = 2.0 * n * r_f * l_m * (1.0 + r_m)
    bound = config.tau_sigma + config.tau_g * coupling
    diagnostics = ContractionDiagnostics(
        tau_sigma=config.tau_sigma,
        kappa=kappa,
        r_m=r_m,
        l_m=l_m,
        r_f=r_f,
        trace_bound=delta_cap,
        coupling=coupling,
        bound=bound,
        satisfied=bound < 1.0,
    )
    logger.info(
        "Contraction check: kappa=%.4g R_M=%.4g L_M=%.4g R_F=%.4g bound=%.4g (%s)",
        kappa,
        r_m,
        l_m,
        r_f,
        bound,
        "ok" if diagnostics.satisfied else "not satisfied",
    )
    return diagnostics
