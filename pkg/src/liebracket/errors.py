"""Exception hierarchy.

Everything derives from :class:`LieBracketError`; most classes also derive
from :class:`ValueError` since they signal bad arguments.
"""


class LieBracketError(Exception):
    pass


class NotPrime(LieBracketError, ValueError):
    pass


class TooSmall(LieBracketError, ValueError):
    pass


class ZeroArgument(LieBracketError, ValueError):
    pass


class ModulusMismatch(LieBracketError, ValueError):
    pass


class NotGenerating(LieBracketError, ValueError):
    pass


class TooLarge(LieBracketError, ValueError):
    pass


class DegenerateGram(LieBracketError, ValueError):
    pass


class DegeneratePair(LieBracketError, ValueError):
    pass


class SingularGram(LieBracketError, ValueError):
    pass


class SupportMismatch(LieBracketError, ValueError):
    pass


class TrivialLattice(LieBracketError, ValueError):
    pass


class IntervalEmpty(LieBracketError, ValueError):
    pass


class IntervalTooHigh(LieBracketError, ValueError):
    pass


class IntervalOutsideI(LieBracketError, ValueError):
    pass


class NotDisjoint(LieBracketError, ValueError):
    pass


class NotFound(LieBracketError, LookupError):
    pass


class NotReachable(LieBracketError, LookupError):
    pass


class Inconclusive(LieBracketError, RuntimeError):
    """A numerical check could not be certified either way."""
