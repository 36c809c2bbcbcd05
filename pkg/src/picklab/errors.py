"""Exception hierarchy. Input-shaped failures also derive from ``ValueError``."""


class PickLabError(Exception):
    pass


class DomainError(PickLabError, ValueError):
    """A point lies outside the admissible domain of a kernel family."""


class DuplicatePointError(PickLabError, ValueError):
    pass


class ConvergenceError(PickLabError):
    """A truncated power series did not reach its stopping tolerance."""


class NumericalError(PickLabError):
    pass


class ZeroKernelError(PickLabError):
    pass


class NotPsdError(PickLabError):
    pass


class DiagonalTooLargeError(PickLabError):
    pass


class DivergenceError(PickLabError):
    pass


class ArityError(PickLabError, ValueError):
    pass


class SingularGramError(PickLabError):
    pass


class FunctionalSupportError(PickLabError, ValueError):
    """A functional is not defined up to the degree an operation needs."""


class ZeroPolynomialError(PickLabError, ValueError):
    pass


class GridEmptyError(PickLabError, ValueError):
    pass
