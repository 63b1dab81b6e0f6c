"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is outside its allowed domain."""


class ConfigurationError(ValueError):
    """A basis / run configuration is inconsistent (duplicates, bad counts, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative evaluation failed to converge within its budget."""

    def __init__(self, msg, **diagnostics):
        super().__init__(msg)
        self.diagnostics = diagnostics


class EigensolverError(RuntimeError):
    """The generalized eigensolve could not be carried out reliably."""


class AssemblyError(RuntimeError):
    """A matrix element could not be assembled (missing integral, bad index)."""
