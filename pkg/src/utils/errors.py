"""
Error hierarchy shared by every module
"""


class SDMCError(Exception):
    """Base class for all toolkit errors"""


class ParameterError(SDMCError, ValueError):
    """Scheme parameters violate an invariant (e.g. N <= 2T, K + T > N)"""


class DimensionError(SDMCError, ValueError):
    """Matrix shapes are non-conformal, indivisible, or live in different fields"""


class FieldConditionError(SDMCError, ValueError):
    """The field cannot host the requested roots of unity, or no field was found"""


class InterpolationError(SDMCError, ValueError):
    """Duplicate abscissae or too few points for the requested degree bound"""


class ShareError(SDMCError):
    """Missing shares, mixed object tags, or incompatible share parameters"""


class IllegalConversionError(SDMCError):
    """Share conversion not permitted (left->left or right->right with K >= 2)"""


class SingularMatrixError(SDMCError, ArithmeticError):
    """No pivot available: the matrix is not invertible over F_q"""


class StragglerUnrecoverableError(SDMCError):
    """Fewer complete server groups responded than the recovery threshold needs"""


class StateSpaceTooLargeError(SDMCError):
    """An exhaustive enumeration would exceed the configured state-space limit"""
