"""Exception hierarchy shared by all modules."""


class HypidError(Exception):
    """Base class for every error raised by this package."""


class PoleError(HypidError, ValueError):
    """Gamma function evaluated at a non-positive integer."""


class NonConvergent(HypidError, ArithmeticError):
    """A hypergeometric series cannot be summed at the requested argument."""


class BottomPole(HypidError, ZeroDivisionError):
    """A bottom parameter hits a non-positive integer before the series terminates."""


class DegenerateNormalizer(HypidError, ZeroDivisionError):
    """The normalizing Pochhammer product of a characteristic polynomial vanishes."""


class IdenticallyZero(HypidError, ValueError):
    """Root extraction was requested for the zero polynomial."""


class IllConditioned(HypidError, ArithmeticError):
    """Polished roots still fail the backward-error residual policy."""


class InconsistencyError(HypidError, AssertionError):
    """Two independent formulas for the same quantity disagree."""


class MatchingFailure(HypidError, ArithmeticError):
    """Perturbed roots could not be matched to their predicted limits."""


class ConstraintViolation(HypidError, ValueError):
    """Parameters violate the hypotheses of an identity."""
