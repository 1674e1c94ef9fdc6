"""Quadrature rules for integrals over the low-frequency set.

Two kinds of rule share one value type:

* tensor    -- midpoint rule on the bounding box, nodes outside the domain dropped
* monte_carlo -- rejection-sampled uniform nodes with acceptance-rate weights

``NodeSchedule`` grows the Monte Carlo node count across solver iterations and
``derive_seed`` gives each iteration an independent, reproducible stream.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .domain import FrequencyDomain
from .errors import NonFiniteValueError, QuadratureError

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class RuleKind(str, Enum):
    TENSOR = "tensor"
    MONTE_CARLO = "monte_carlo"


class Growth(str, Enum):
    LINEAR = "linear"
    GEOMETRIC = "geometric"


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: RuleKind
    seed: int | None = None

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float, ndmin=2)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if nodes.shape[0] == 0 or nodes.shape[0] != weights.shape[0]:
            raise QuadratureError(
                f"rule needs matching nonempty nodes and weights, got {nodes.shape[0]} "
                f"nodes and {weights.shape[0]} weights"
            )
        if not np.all(weights > 0):
            raise QuadratureError("quadrature weights must be strictly positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    @property
    def rule_id(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.nodes.tobytes())
        digest.update(self.weights.tobytes())
        return f"{self.kind.value}-{self.size}-{digest.hexdigest()[:12]}"

    def reordered(self, permutation: np.ndarray) -> QuadratureRule:
        return QuadratureRule(
            self.nodes[permutation], self.weights[permutation], self.kind, self.seed
        )


@dataclass(frozen=True)
class NodeSchedule:
    """Node counts for Monte Carlo rules over a run of ``iterations`` steps.

    Geometric growth interpolates min -> max over the run unless ``factor`` is
    given, in which case the count is multiplied by ``factor`` each step and
    capped at ``max_nodes``.
    """

    min_nodes: int
    max_nodes: int
    growth: Growth = Growth.GEOMETRIC
    factor: float | None = None

    def __post_init__(self):
        if not 1 <= self.min_nodes <= self.max_nodes:
            raise QuadratureError(
                f"schedule needs 1 <= min_nodes <= max_nodes, got "
                f"{self.min_nodes}..{self.max_nodes}"
            )
        if self.factor is not None and self.factor < 1:
            raise QuadratureError(f"growth factor must be >= 1, got {self.factor}")

    def count(self, k: int, iterations: int) -> int:
        if self.growth is Growth.GEOMETRIC and self.factor is not None:
            return min(self.max_nodes, int(round(self.min_nodes * self.factor**k)))
        t = 1.0 if iterations <= 1 else min(k / (iterations - 1), 1.0)
        if self.growth is Growth.LINEAR:
            value = self.min_nodes + t * (self.max_nodes - self.min_nodes)
        else:
            value = self.min_nodes * (self.max_nodes / self.min_nodes) ** t
        return int(min(self.max_nodes, max(self.min_nodes, round(value))))

    def counts(self, iterations: int) -> list[int]:
        return [self.count(k, iterations) for k in range(iterations)]


def derive_seed(seed: int, k: int) -> int:
    """Splitmix64 output for stream ``k`` of base seed ``seed``."""
    z = (seed + (k + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def tensor_rule(domain: FrequencyDomain, resolution: int) -> QuadratureRule:
    """Midpoint rule with ``resolution`` cells per axis of the bounding box."""
    if resolution < 2:
        raise QuadratureError(f"resolution must be >= 2, got {resolution}")
    lo, hi = domain.bounding_box()
    width = (hi - lo) / resolution
    axes = [a + (np.arange(resolution) + 0.5) * h for a, h in zip(lo, width)]
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    nodes = nodes[domain.contains_many(nodes)]
    if nodes.shape[0] == 0:
        raise QuadratureError(f"no midpoint of a {resolution}-cell grid falls inside {domain}")
    weights = np.full(nodes.shape[0], float(np.prod(width)))
    return QuadratureRule(nodes, weights, RuleKind.TENSOR)


def monte_carlo_rule(
    domain: FrequencyDomain,
    count: int,
    seed: int,
    max_attempts: int = 1000,
) -> QuadratureRule:
    """Uniform rejection sampling from the bounding box.

    Weights are ``box_volume * acceptance_rate / count`` with the acceptance rate
    measured over every draw made while filling the rule.
    """
    if count < 1:
        raise QuadratureError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    lo, hi = domain.bounding_box()
    batch = max(count, 1024)
    accepted: list[np.ndarray] = []
    n_accepted = 0
    n_drawn = 0
    for _ in range(max_attempts):
        draws = rng.uniform(lo, hi, size=(batch, domain.dimension))
        inside = draws[domain.contains_many(draws)]
        n_drawn += batch
        n_accepted += inside.shape[0]
        accepted.append(inside)
        if n_accepted >= count:
            break
    if n_accepted == 0:
        raise QuadratureError(
            f"rejection sampling accepted no points in {max_attempts} batches for {domain}"
        )
    if n_accepted < count:
        raise QuadratureError(
            f"only {n_accepted} of {count} nodes accepted after {max_attempts} batches"
        )
    nodes = np.concatenate(accepted)[:count]
    measure_estimate = domain.box_volume() * n_accepted / n_drawn
    weights = np.full(count, measure_estimate / count)
    logger.debug(
        "Monte Carlo rule: %d nodes, acceptance %.4f, measure %.6f",
        count,
        n_accepted / n_drawn,
        measure_estimate,
    )
    return QuadratureRule(nodes, weights, RuleKind.MONTE_CARLO, seed=seed)


def integrate(rule: QuadratureRule, g: Callable[[np.ndarray], np.ndarray]) -> complex:
    """Sum w_i g(xi_i); ``g`` maps a (P, d) node array to P values."""
    values = np.asarray(g(rule.nodes), dtype=complex).reshape(-1)
    if values.shape[0] != rule.size:
        raise QuadratureError(f"integrand returned {values.shape[0]} values for {rule.size} nodes")
    finite = np.isfinite(values)
    if not np.all(finite):
        bad = int(np.flatnonzero(~finite)[0])
        raise NonFiniteValueError("integrand is not finite", node=rule.nodes[bad].tolist())
    return complex(np.sum(rule.weights * values))
