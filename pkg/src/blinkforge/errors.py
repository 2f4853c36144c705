"""Exception hierarchy for the toolkit.

Everything user-facing derives from ToolkitError so callers (and the CLI)
can distinguish data/argument problems from genuine bugs.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(ToolkitError, ValueError):
    """A parameter is outside its documented domain."""


class InvalidInputError(ToolkitError, ValueError):
    """Input data violates a precondition (length, finiteness, shape)."""


class InvalidChannelError(ToolkitError, ValueError):
    """An operation received a recording of the wrong channel kind."""


class DegenerateShapeError(ToolkitError, ValueError):
    """A peak segment is too degenerate for geometric feature extraction."""


class DegenerateInputError(ToolkitError, ValueError):
    """A measure is undefined on this input (e.g. zero-variance signal)."""


class ConfigError(ToolkitError, ValueError):
    """A culling configuration references unknown features or bad bounds."""


class SingularDesignError(ToolkitError, ValueError):
    """The linear system is singular; regularization (lambda > 0) may help."""


class TooManyFeaturesError(ToolkitError, ValueError):
    """Exact coalition enumeration was requested for too many features."""


class InvalidResponseError(ToolkitError, ValueError):
    """A survey response is incomplete or outside its scale range."""


class DataFormatError(ToolkitError, ValueError):
    """A CSV/JSON file does not conform to the documented schema."""


class InternalError(ToolkitError, RuntimeError):
    """An internal invariant was breached; this is a bug, not a data issue."""
