"""Exception types raised by the smallcell package."""


class SmallCellError(Exception):
    """Base class for all package errors."""


class InvalidParameter(SmallCellError, ValueError):
    pass


class TailMassTooLarge(SmallCellError, ValueError):
    """The truncated load pmf drops more probability mass than allowed."""


class EnumerationTooLarge(SmallCellError, ValueError):
    """Brute-force enumeration would visit too many configurations."""


class QuadratureNotConverged(SmallCellError, ArithmeticError):
    pass


class DegenerateRealization(SmallCellError, RuntimeError):
    """A sampled network has no access point."""


class EmptySamples(SmallCellError, ValueError):
    pass
