class QssaError(Exception):
    """Base class for every error raised by enzyme_qssa."""


class InvalidInputError(QssaError, ValueError):
    """An argument lies outside the range an operation is defined on."""


class DomainError(QssaError, ValueError):
    """A formula is evaluated outside its mathematical domain."""


class IntegrationError(QssaError, RuntimeError):
    def __init__(self, message: str, t_reached: float = float("nan")):
        super().__init__(message)
        self.t_reached = t_reached


class StiffnessError(IntegrationError):
    """Step size underflowed below the floating-point spacing of t."""


class StepLimitError(IntegrationError):
    """The configured max_steps budget ran out before t_end."""


class HorizonError(IntegrationError):
    """No crossing of the QSS manifold was found before t_end."""
