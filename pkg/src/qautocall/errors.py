"""Exception types shared across the package."""


class QAutocallError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(QAutocallError):
    """A requested allocation or enumeration exceeds the configured budget."""


class StructuralError(QAutocallError):
    """An operation is malformed (overlapping qubits, width mismatch, non-bijective map)."""


class PreconditionError(QAutocallError):
    """An operation's runtime precondition on the quantum state does not hold."""


class MappingError(QAutocallError):
    """A payoff-to-amplitude mapping produced a value outside [0, 1]."""


class NumericalError(QAutocallError):
    """An iterative numerical procedure failed to converge."""


class ConfigError(QAutocallError):
    """Configuration text failed validation; carries every offending key."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
