"""Exceptions raised by pipalter.

Every error derives from the builtin exception it specializes so callers
that catch ValueError or RuntimeError keep working. The shared
PipalterError base lets the command line map any library failure to an
exit code in a single except clause.
"""


class PipalterError(Exception):
    """Base class of all pipalter errors."""


class InvalidInstanceError(PipalterError, ValueError):
    """A PIP instance violates a structural invariant.

    Attributes:
        violations:
            The list of Violation records that caused this error.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        shown = ', '.join(str(v) for v in self.violations[:5])
        more = len(self.violations) - 5
        msg = 'Instance is invalid: {}'.format(shown)
        if more > 0:
            msg += ' (and {} more)'.format(more)
        super().__init__(msg)


class InstanceFormatError(PipalterError, ValueError):
    """An instance file could not be parsed."""


class AllZeroMatrixError(PipalterError, ValueError):
    """The constraint matrix has no positive entry so width is undefined."""


class WidthBelowOneError(PipalterError, ValueError):
    """Some item can never be packed because A_ij exceeds b_i."""


class WidthOneError(PipalterError, ValueError):
    """The instance has width exactly one where PIPs are as hard as MIS."""


class EpsOutOfRangeError(PipalterError, ValueError):
    """An accuracy parameter lies outside the range a regime allows."""


class RegimeMismatchError(PipalterError, ValueError):
    """A requested regime does not apply to the instance's width."""


class PreconditionViolatedError(PipalterError, ValueError):
    """The parameters of a tail bound violate its precondition."""


class DomainError(PipalterError, ValueError):
    """An inequality was evaluated outside of its domain."""


class TooLargeError(PipalterError, ValueError):
    """An instance is too large for exact enumeration."""


class IterationLimitError(PipalterError, RuntimeError):
    """The simplex method exceeded its iteration budget.

    Attributes:
        iterations:
            The number of pivots performed before giving up.
        solution:
            The FractionalSolution of the last basis, attached by the
            solver before raising.
    """

    def __init__(self, iterations):
        self.iterations = iterations
        msg = 'Simplex exceeded {} iterations; retry with a perturbed instance'
        super().__init__(msg.format(iterations))


class NodeLimitError(PipalterError, RuntimeError):
    """Branch and bound explored more nodes than allowed."""
