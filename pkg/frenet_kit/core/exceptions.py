"""
Custom exception classes for frenet-kit
"""

from typing import Optional, Dict, Any


class FrenetKitException(Exception):
    """Base exception class for frenet-kit"""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)


class DimensionMismatchError(FrenetKitException):
    """Raised when vectors of different dimensions are combined"""

    def __init__(self, expected: int, actual: int, what: str = "vector"):
        super().__init__(
            message=f"Dimension mismatch for {what}: expected {expected}, got {actual}",
            error_code="DIMENSION_MISMATCH",
            details={"expected": expected, "actual": actual, "what": what},
        )


class RankDeficiencyError(FrenetKitException):
    """Raised when Gram-Schmidt meets a dependent vector"""

    def __init__(self, index: int, residual_norm: float):
        super().__init__(
            message=(
                f"Rank deficiency at index {index}: "
                f"residual norm {residual_norm:.3e} below rank tolerance"
            ),
            error_code="RANK_DEFICIENT",
            details={"index": index, "residual_norm": residual_norm},
        )
        self.index = index


class DegenerateSimplexError(FrenetKitException):
    """Raised when simplex vertices are affinely dependent"""

    def __init__(self, vertex_count: int, rank: int):
        super().__init__(
            message=(
                f"Degenerate simplex: {vertex_count} vertices span "
                f"an affine space of dimension {rank}"
            ),
            error_code="DEGENERATE_SIMPLEX",
            details={"vertex_count": vertex_count, "rank": rank},
        )


class OffAffineHullError(FrenetKitException):
    """Raised when a point lies off the affine hull of a simplex"""

    def __init__(self, distance: float):
        super().__init__(
            message=f"Point lies {distance:.3e} away from the affine hull",
            error_code="OFF_AFFINE_HULL",
            details={"distance": distance},
        )
        self.distance = distance


class NotInSimplexError(FrenetKitException):
    """Raised when an operation requires a point inside the simplex"""

    def __init__(self, min_weight: float):
        super().__init__(
            message=f"Point is not in the simplex (min barycentric weight {min_weight:.3e})",
            error_code="NOT_IN_SIMPLEX",
            details={"min_weight": min_weight},
        )


class FlagMismatchError(FrenetKitException):
    """Raised when two flag simplices do not share base and frame"""

    def __init__(self, reason: str):
        super().__init__(
            message=f"Flag simplices are not compatible: {reason}",
            error_code="FLAG_MISMATCH",
            details={"reason": reason},
        )


class NoPositiveStepError(FrenetKitException):
    """Raised when a flag cannot be grown inside a simplex"""

    def __init__(self, level: int):
        super().__init__(
            message=f"No positive step at level {level}",
            error_code="NO_POSITIVE_STEP",
            details={"level": level},
        )
        self.level = level


class InvalidSampleError(FrenetKitException):
    """Raised when a sample plan or point sequence is unusable"""

    def __init__(self, reason: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"Invalid sample: {reason}",
            error_code="INVALID_SAMPLE",
            details=details or {"reason": reason},
        )


class InsufficientPointsError(FrenetKitException):
    """Raised when too few samples lie near a base point"""

    def __init__(self, found: int, required: int):
        super().__init__(
            message=f"Too few points near base: found {found}, need {required}",
            error_code="INSUFFICIENT_POINTS",
            details={"found": found, "required": required},
        )


class FrameNotFullError(FrenetKitException):
    """Raised when a frame is expected to span the whole space"""

    def __init__(self, size: int, dim: int):
        super().__init__(
            message=f"Frame has {size} vectors but the space has dimension {dim}",
            error_code="FRAME_NOT_FULL",
            details={"size": size, "dim": dim},
        )


class NonPositiveScaleError(FrenetKitException):
    """Raised when a flag scale is zero or negative"""

    def __init__(self, scales: list):
        super().__init__(
            message=f"Flag scales must be strictly positive, got {scales}",
            error_code="NON_POSITIVE_SCALE",
            details={"scales": scales},
        )


class InputFormatError(FrenetKitException):
    """Raised when an input file cannot be read"""

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"Cannot read {path}: {reason}",
            error_code="INPUT_FORMAT",
            details={"path": path, "reason": reason},
        )


class ValidationError(FrenetKitException):
    """Raised when input validation fails"""

    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(
            message=f"Validation failed for field '{field}': {reason}",
            error_code="VALIDATION_ERROR",
            details={"field": field, "value": value, "reason": reason},
        )
