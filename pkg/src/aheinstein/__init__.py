"""Numerical toolkit for asymptotically hyperbolic Einstein 4-metrics."""

from .errors import (ConsistencyError, DomainError, FiberTypeError,
                     GaugeInconsistencyError, InvalidMetricError, NumericalFailure)
from .series import Series

__version__ = "0.1.0"

__all__ = [
    "Series",
    "ConsistencyError",
    "DomainError",
    "FiberTypeError",
    "GaugeInconsistencyError",
    "InvalidMetricError",
    "NumericalFailure",
]
