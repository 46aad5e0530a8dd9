"""Exception types raised by the solvers."""


class DabError(Exception):
    """Base class for all errors raised by this package."""


class NumericalUnderflow(DabError):
    """Every quadrature node fell below the density guard; the truncation
    window does not overlap the integrand's support."""


class MaxItersExceeded(DabError):
    """Blahut-Arimoto hit its iteration cap before meeting the tolerance.

    The best outcome reached so far is attached as ``outcome``.
    """

    def __init__(self, message, outcome):
        super().__init__(message)
        self.outcome = outcome


class SecantDivergence(DabError):
    """The secant search on the power multiplier failed to bracket or
    converge within its iteration budget."""


class Infeasible(DabError):
    """No distribution on the given support can satisfy the constraint."""


class NoMovableIndex(DabError):
    """No mass point lies strictly between the center and the divergence
    maximizer, so there is nothing for the line search to move."""


class InfeasibleFlow(DabError):
    """The probability-flow system for a point-pair move has no solution
    with nonnegative scale factors."""


class MaxOuterItersExceeded(DabError):
    """The outer solve loop hit its iteration cap before converging.

    The best result reached so far is attached as ``result``.
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


class BracketInvalid(DabError):
    """The endpoints handed to the transition bisection do not bracket a
    cardinality change."""


class NoSatisfyingCardinality(DabError):
    """No swept cardinality meets the requested capacity gap at some SNR."""
