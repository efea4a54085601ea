"""Exception hierarchy shared by all entm modules."""


class EntmError(Exception):
    """Base class for every error raised by entm."""


class InvalidState(EntmError, ValueError):
    """Matrix fails a density-matrix invariant (Hermiticity, trace, positivity)."""


class NotHermitian(InvalidState):
    pass


class BadRank(EntmError, ValueError):
    pass


class DomainError(EntmError, ValueError):
    """A family parameter lies outside its documented domain."""


class NonConvergence(EntmError, RuntimeError):
    pass


class NoBracket(EntmError, RuntimeError):
    pass


class DegenerateDelta(EntmError, RuntimeError):
    pass


class RankDeficient(EntmError, ValueError):
    pass


class SamplingExhausted(EntmError, RuntimeError):
    pass


class NotEntangled(EntmError, ValueError):
    pass


class RankMismatch(EntmError, ValueError):
    pass


class SupportMismatch(EntmError, ValueError):
    pass


class ParseError(EntmError, ValueError):
    pass
