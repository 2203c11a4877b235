"""Exception hierarchy shared by every qdlab module.

Most errors derive from ``ValueError`` because they signal inputs that
fall outside an operation's domain. The CLI maps ``NoConvergence`` and
``Inconclusive`` to dedicated exit codes.
"""


class QDLabError(Exception):
    """Base class for all qdlab errors."""


class EvalAtPole(QDLabError, ValueError):
    pass


class NonIntegrable(QDLabError, ValueError):
    pass


class NoConvergence(QDLabError, RuntimeError):
    pass


class BadRadii(QDLabError, ValueError):
    pass


class CriticalValue(QDLabError, ValueError):
    pass


class PoleImage(QDLabError, ValueError):
    pass


class TailTooLarge(QDLabError, RuntimeError):
    pass


class ZeroMass(QDLabError, ValueError):
    pass


class PoleCollision(QDLabError, ValueError):
    pass


class TooFewPoles(QDLabError, ValueError):
    pass


class DegenerateAtCritical(QDLabError, ValueError):
    pass


class Inconclusive(QDLabError, RuntimeError):
    pass


class NotStrictlyPreperiodic(QDLabError, ValueError):
    pass


class BadPeriod(QDLabError, ValueError):
    pass


class TooSmall(QDLabError, ValueError):
    pass


class OddCount(QDLabError, ValueError):
    pass
