"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """Input outside the domain where an operation is defined."""


class InvalidMetricError(ValueError):
    """Metric data violating positivity or symmetry requirements."""


class FiberTypeError(TypeError):
    """Boundary or fiber data of an incompatible homogeneous type."""


class ConsistencyError(RuntimeError):
    """Two independent computation routes disagree beyond tolerance."""


class GaugeInconsistencyError(ConsistencyError):
    """Scalar linearizations disagree for a symmetric form."""


class NumericalFailure(RuntimeError):
    """Quadrature, extrapolation or root finding did not converge."""
