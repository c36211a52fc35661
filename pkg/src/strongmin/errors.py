"""Exception types shared across the package."""


class StrongMinError(Exception):
    """Base class for every error raised by this package."""


class ParseError(StrongMinError, ValueError):
    def __init__(self, msg, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {msg}" if where else msg)


class DuplicateTriplePoint(ParseError):
    pass


class DuplicateRelation(ParseError):
    pass


class LinearityViolation(ParseError):
    pass


class UnknownPoint(ParseError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class BadIntersection(StrongMinError, ValueError):
    pass


class TooManySets(StrongMinError, ValueError):
    pass


class EmptyExtension(StrongMinError, ValueError):
    pass


class NotPrimitive(StrongMinError, ValueError):
    pass


class NotAlphaPoint(StrongMinError, ValueError):
    pass


class Ambiguous(StrongMinError, ValueError):
    pass


class UnresolvedCode(StrongMinError, KeyError):
    pass


class BadGlue(StrongMinError, ValueError):
    pass


class LineOverflow(StrongMinError, ValueError):
    pass


class SeedNotAdmissible(StrongMinError, ValueError):
    pass


class BudgetExhausted(StrongMinError):
    def __init__(self, msg, partial=None, unmet=(), log=()):
        super().__init__(msg)
        self.partial = partial
        self.unmet = list(unmet)
        self.log = list(log)


class NotStrongBase(StrongMinError, ValueError):
    pass


class Stuck(StrongMinError, ValueError):
    pass


class IllegalSwap(StrongMinError, ValueError):
    pass


class NotNormal(StrongMinError, ValueError):
    pass


class DependentBase(StrongMinError, ValueError):
    pass


class NoCertificate(StrongMinError, ValueError):
    pass


class LineTooShort(StrongMinError, ValueError):
    def __init__(self, msg, verdict="definable-product", product=None):
        super().__init__(msg)
        self.verdict = verdict
        self.product = product


class UnknownFixture(StrongMinError, KeyError):
    pass
