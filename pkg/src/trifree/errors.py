"""Exception types shared across the package."""


class TrifreeError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedOrder(TrifreeError):
    """Requested field order is not a prime and not a power of two up to 2^16."""


class CoverViolation(TrifreeError):
    """A clique cover breaks one of its structural guarantees.

    Carries a witness describing the offending pair, clique, or triangle.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CertificateFailure(TrifreeError):
    """Raised when a certificate that must pass fails; carries the witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SizeLimit(TrifreeError):
    """Problem instance exceeds a hard size limit of the chosen method."""


class NoConvergence(TrifreeError):
    """Iterative eigensolver hit its iteration cap before reaching tolerance."""


class IdentityViolation(TrifreeError):
    """An exact integer identity failed; indicates a bug, never noise."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class TheoremViolation(TrifreeError):
    """A proven bound was exceeded; indicates a bug, never a statistical event."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class FormatError(TrifreeError):
    """Malformed or truncated on-disk artifact."""
