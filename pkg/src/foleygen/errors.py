"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1,
MissingArtifactError -> 2, NumericalError -> 3.
"""


class FoleygenError(Exception):
    """Base class for all package errors."""


class ConfigError(FoleygenError):
    """Invalid configuration value or unknown config key."""


class ContractError(FoleygenError):
    """An operation was called with inputs violating its contract
    (shape mismatch, out-of-range index, degenerate norm, ...)."""


class StateError(FoleygenError):
    """An operation was called in the wrong order (e.g. backward before
    forward)."""


class CheckpointError(FoleygenError):
    """Checkpoint file is corrupt, truncated, or has the wrong version."""


class NumericalError(FoleygenError):
    """Non-finite values or diverging optimisation."""


class MissingArtifactError(FoleygenError):
    """A pipeline stage needs an artifact produced by an earlier stage."""
