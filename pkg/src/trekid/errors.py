"""Exception hierarchy."""


class TrekidError(Exception):
    pass


class GraphError(TrekidError, ValueError):
    """Invalid mixed graph input."""


class SelfLoopError(GraphError):
    pass


class DirectedCycleError(GraphError):
    pass


class VertexOutOfRangeError(GraphError):
    pass


class GraphFormatError(GraphError):
    """Malformed graph or certificate document; message carries the line number when known."""


class InstanceTooLargeError(TrekidError, ValueError):
    """An enumeration-backed oracle was asked to handle a graph above its size limit."""


class NumericFailure(TrekidError, ArithmeticError):
    pass


class SingularSystemError(NumericFailure):
    """A recovery linear system was singular; the parameter draw was not generic."""


class UnsupportedCertificatePhaseError(TrekidError, ValueError):
    """A certificate step cannot be replayed directly on the full covariance matrix."""


class BudgetExhaustedError(TrekidError, RuntimeError):
    pass
