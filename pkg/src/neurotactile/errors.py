"""Exception types shared across the pipeline stages.

Every stage raises a subclass of SimulationError so callers can catch one
base type; most also inherit ValueError so generic validation code behaves
as expected.
"""

from __future__ import annotations


class SimulationError(Exception):
    """Base class for all simulator errors."""


class RangeError(SimulationError, ValueError):
    """Input outside the characterized operating range (e.g. pressure > model max)."""


class DomainError(SimulationError, ValueError):
    """Argument outside a function's mathematical domain."""


class FormatError(SimulationError, ValueError):
    """Malformed external data (CSV traces, scripts, stream messages)."""


class ConfigurationError(SimulationError, ValueError):
    """Inconsistent or invalid configuration values."""


class ContractError(SimulationError, ValueError):
    """A stage was handed data violating its interface contract."""


class IntegrityError(SimulationError, ValueError):
    """Internally inconsistent data that signals corruption upstream."""


class FramingError(SimulationError, ValueError):
    """Serial unit violates the start/stop/idle framing rules."""

    def __init__(self, message: str, bit_offset: int):
        super().__init__(f"{message} (bit offset {bit_offset})")
        self.bit_offset = bit_offset


class RoutingError(SimulationError, ValueError):
    """Signal was routed to a recognizer that cannot accept it."""


class CalibrationError(SimulationError, RuntimeError):
    """No configuration in the sweep satisfied the calibration objective."""

    def __init__(self, message: str, best_attempt=None):
        super().__init__(message)
        self.best_attempt = best_attempt
