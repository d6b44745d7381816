"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration/parse problems exit 2,
mathematical inconsistency exits 3, capability limits (dimension, enumeration
caps) exit 4.
"""


class MdcrtError(Exception):
    """Base class for all library errors."""


class SingularMatrix(MdcrtError):
    """A nonsingular matrix was required but det = 0."""


class DimensionMismatch(MdcrtError):
    """Operands have incompatible dimensions."""


class DimensionUnsupported(MdcrtError):
    """Operation only implemented up to a fixed dimension (SVP/CVP: D <= 4)."""


class RankDeficient(MdcrtError):
    """Coefficient block has rank below the ambient dimension."""


class CapExceeded(MdcrtError):
    """Enumeration would produce more points than the configured cap."""


class Inconsistent(MdcrtError):
    """A congruence system has no solution (incompatible remainders)."""


class DuplicateModuli(MdcrtError):
    """A robust instance requires distinct moduli."""


class NotAnLcrm(MdcrtError):
    """The supplied matrix is not a least common right multiple of the moduli."""


class GroupConditionFailed(MdcrtError):
    """A declared group's reduced lcrm has a non-diagonal Hermite normal form."""


class CoverageIncomplete(MdcrtError):
    """A stage's groups do not cover all moduli of that stage."""


class DuplicateOutput(MdcrtError):
    """Two group outputs generate the same lattice, one congruence is redundant."""


class NotPrime(MdcrtError):
    """A prime integer was required."""


class NotInvertible(MdcrtError):
    """No modular inverse exists."""


class ConfigInvalid(MdcrtError):
    """An experiment configuration is malformed or self-contradictory."""
