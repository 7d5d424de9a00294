"""Exception hierarchy.  The CLI maps ConfigError to exit code 1 and
NumericalError to exit code 2."""


class ConfigError(ValueError):
    """Invalid parameters, dimensions or configuration."""


class NumericalError(RuntimeError):
    """A computation finished but its result cannot be trusted."""


class IntegratorError(NumericalError):
    """Time propagation violated a density-matrix invariant or under-resolved the dynamics."""


class DegenerateSteadyStateError(NumericalError):
    """The generator kernel is degenerate and a unique stationary state was demanded."""


class FitError(NumericalError):
    """A least-squares fit did not converge or was rejected.

    ``diagnostics`` carries whatever the fitter knew at the point of failure.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
