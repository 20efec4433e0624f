"""Exception types shared across the package.

Everything numerical in this library is checked against explicit
tolerances, and each way a check can fail has its own exception so that
callers (and the CLI) can tell apart "your input is malformed" from
"your input is mathematically inconsistent" from "a theorem's
hypothesis does not hold here".
"""


class GeometryError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(GeometryError):
    """Array shapes or index ranges do not match the declared dimensions."""


class RankError(GeometryError):
    """A matrix or frame that must be invertible / full rank is not."""


class StructureError(GeometryError):
    """Structural hypotheses on the algebra fail (parity, spans, zero t-vectors)."""


class PreconditionError(GeometryError):
    """A documented precondition of an operation does not hold."""


class ClaimViolation(GeometryError):
    """Input claims to be Hermitian-symplectic compatible but the forced
    vanishings (Z = 0, w = 0, C + D = 0) fail beyond tolerance."""


class CertificationError(GeometryError):
    """The constructed closed form fails its final residual check; the
    message names the offending term."""


class FormatError(GeometryError):
    """A document file is not syntactically valid (bad JSON, wrong types)."""


class ValidationError(GeometryError):
    """A document parses but violates the schema's semantic rules."""


class ParameterError(GeometryError):
    """Generator parameters are out of range or degenerate."""
