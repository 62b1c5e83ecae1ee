"""Exception hierarchy.  The CLI maps DomainError to exit 2, NumericalError to exit 3."""


class PVIError(Exception):
    pass


class DomainError(PVIError, ValueError):
    """Input outside the region where a formula or series is valid."""


class PoleError(DomainError):
    pass


class DegenerateError(DomainError):
    """Inputs that the theory explicitly excludes (inadmissible triples etc.)."""


class NumericalError(PVIError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    pass


class PoleHit(NumericalError):
    pass
