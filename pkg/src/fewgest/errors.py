"""Exception types shared across the package."""


class FewgestError(Exception):
    """Base class for all library errors."""


class DimensionError(FewgestError):
    """Operand shapes are inconsistent."""


class InvalidInputError(FewgestError):
    """An argument violates an operation's precondition."""


class ParseError(FewgestError):
    """A GSJL line is not valid JSON."""


class SchemaError(FewgestError):
    """A GSJL record violates the file schema."""


class CapacityError(FewgestError):
    """A dataset cannot supply the requested classes or samples."""


class InfeasibleSplitError(FewgestError):
    """A class split leaves at least one subset empty."""


class TrainingDivergedError(FewgestError):
    """Loss or gradients became non-finite during training."""

    def __init__(self, message, episode=None):
        super().__init__(message)
        self.episode = episode


class ConfigError(FewgestError):
    """A configuration document is malformed or inconsistent."""


class CheckpointError(FewgestError):
    """A checkpoint file is malformed or does not match the config."""
