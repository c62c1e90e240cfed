"""Exception types shared across the package."""


class BKError(Exception):
    """Base class for package-specific errors."""


class MismatchedParams(BKError):
    """Operands live in different truncated rings."""


class NotEisenstein(BKError):
    """Coefficients fail the Eisenstein conditions."""


class ParseError(BKError):
    """Malformed series literal or ideal file."""


class NotCofiniteAtPrecision(BKError):
    """No cofiniteness witness exists below the precision cap.

    Tells the caller to raise precision; it does not prove the ideal is
    non-cofinite.
    """


class InsufficientPrecision(BKError):
    """The operation would consume more (p, u)-precision than is available."""


class ZeroElement(BKError):
    """Gauss valuation of the zero element requested."""


class StabilizationFailure(BKError):
    """Envelope value at the stabilization radius disagrees with rho."""


class PrecisionUnderflow(BKError):
    """A coordinate annotation dropped below the requested floor."""


class OddPrimeRequired(BKError):
    """Operation implemented for odd p only."""


class ImpreciseCoordinate(BKError):
    """A polygon cannot be certified against the stored cutoffs."""
