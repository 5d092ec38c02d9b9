"""Exception hierarchy shared across the package."""


class AlarmTaxisError(Exception):
    """Base class for all package errors."""


class DomainError(AlarmTaxisError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateParametersError(AlarmTaxisError, ValueError):
    """A formula hit a zero denominator for the given parameters."""


class NoRealRootError(AlarmTaxisError, ValueError):
    """The closed-form steady state has a negative radicand."""


class UnsupportedRegimeError(AlarmTaxisError, ValueError):
    """Parameters fall outside the regime a routine was written for."""


class InapplicableError(AlarmTaxisError, ValueError):
    """The hypothesis of a bound does not hold, so the bound says nothing."""


class InsufficientDataError(AlarmTaxisError, ValueError):
    """Too few samples to perform a fit."""


class ConfigError(AlarmTaxisError, ValueError):
    """Invalid run configuration; the message names the offending key."""


class NumericalFailure(AlarmTaxisError, RuntimeError):
    """The time integration produced an unphysical state."""


class PositivityViolation(NumericalFailure):
    def __init__(self, species, cell, t, value):
        self.species = species
        self.cell = cell
        self.t = t
        self.value = value
        super().__init__(
            f"{species} became negative ({value:.3e}) at cell {cell}, t={t:.6g}; "
            "time step too large for the scheme"
        )


class BlowUpError(NumericalFailure):
    def __init__(self, t, value, limit):
        self.t = t
        self.value = value
        self.limit = limit
        super().__init__(f"||u||_inf = {value:.6g} exceeds guard {limit:.6g} at t={t:.6g}")
