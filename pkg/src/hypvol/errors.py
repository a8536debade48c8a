"""Exception hierarchy shared by every module."""


class HypvolError(Exception):
    """Base class for library errors."""


class DomainError(HypvolError, ValueError):
    """An argument lies outside the domain of the function being evaluated."""


class ConvergenceError(HypvolError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""


class BracketError(HypvolError, ValueError):
    """A root-finding bracket does not straddle a sign change."""


class ConsistencyError(HypvolError, ArithmeticError):
    """A geometric quantity that should be admissible came out inadmissible."""
