"""Exception hierarchy for the extrapolation library.

Library code raises these; only the CLI turns them into log lines and exit codes.
Every concrete error also derives from the closest builtin so callers can catch
``ValueError`` or ``RuntimeError`` without importing this module.
"""

from __future__ import annotations

from typing import Any


class ExtrapolationError(Exception):
    """Root of all errors raised by sigma_extrapolation."""


class DimensionMismatchError(ExtrapolationError, ValueError):
    """Vector or matrix sizes do not agree."""


class InvalidDomainError(ExtrapolationError, ValueError):
    """Frequency-domain parameters violate their invariants."""


class InvalidFamilyError(ExtrapolationError, ValueError):
    """Function family is empty, mixed-dimensional or has duplicate members."""


class QuadratureError(ExtrapolationError, RuntimeError):
    """A quadrature rule could not be built."""


class NonFiniteValueError(ExtrapolationError, ArithmeticError):
    """A NaN or infinity appeared where a finite value was required."""

    def __init__(self, message: str, node: Any = None):
        super().__init__(message if node is None else f"{message} at node {node}")
        self.node = node


class NotHermitianError(ExtrapolationError, ValueError):
    """Matrix is too far from Hermitian to be symmetrized."""


class EigenDecompositionError(ExtrapolationError, RuntimeError):
    """The Hermitian eigensolver did not converge."""


class CommonZeroError(NonFiniteValueError):
    """All family members vanish at a node where a ratio is needed."""


class SolverError(ExtrapolationError, RuntimeError):
    """Fixed-point iteration failed at a given iteration."""

    def __init__(self, message: str, iteration: int):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


class CoverageError(ExtrapolationError, ValueError):
    """A grid does not cover the region an operation needs."""


class CascadeError(ExtrapolationError, ArithmeticError):
    """The cascade product produced a non-finite factor."""


class ConfigError(ExtrapolationError, ValueError):
    """Experiment or runtime configuration is invalid."""


class IdxFormatError(ExtrapolationError, ValueError):
    """IDX ubyte file is malformed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class StageError(ExtrapolationError, RuntimeError):
    """A pipeline stage failed; wraps the underlying error."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
