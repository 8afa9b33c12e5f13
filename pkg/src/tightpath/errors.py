"""Exception types shared by the package.

The CLI maps these onto its exit codes, so keep the hierarchy flat.
"""


class InvalidInputError(ValueError):
    """Malformed input: duplicate entries, non-arcs, bad certificates."""


class UnsupportedError(ValueError):
    """A parameter outside the range an operation supports."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class ResourceLimitError(RuntimeError):
    """An exact computation would exceed its configured resource cap."""


class AlgorithmFailure(RuntimeError):
    """A constructive procedure hit a state its correctness argument excludes."""
