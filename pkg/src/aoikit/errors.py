"""Exception types shared across the package."""


class AoIError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class InvalidLoads(AoIError, ValueError):
    pass


class UnstableLoad(AoIError):
    """Raised when an FCFS queue is evaluated at total load >= 1."""

    def __init__(self, total, message=None):
        self.total = total
        super().__init__(message or f"unstable FCFS queue: total load {total:g} >= 1")


class InvalidModel(AoIError, ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("invalid SHS model: " + "; ".join(self.diagnostics))


class SingularChain(AoIError):
    pass


class UnstableModel(AoIError):
    def __init__(self, abscissa):
        self.spectral_abscissa = abscissa
        super().__init__(
            f"unstable age ODE: spectral abscissa of R-D is {abscissa:.3e} (must be < 0)"
        )


class NegativeSolution(AoIError):
    pass


class NumericError(AoIError):
    pass


class InsufficientData(AoIError):
    pass


class QueueOverflow(AoIError):
    pass
