"""
Exception hierarchy for exact algebra, complexes, pairings and the CLI
"""
from typing import Optional, Dict, Any


# Exit-code classes used by the CLI
EXIT_VERIFICATION = 1
EXIT_UNREADABLE = 2
EXIT_PARSE = 3
EXIT_HYPOTHESIS = 4
EXIT_POLE = 5
EXIT_INTERNAL = 6
EXIT_INFEASIBLE = 7
EXIT_USAGE = 8


class PsiParityError(Exception):
    """Base exception for all toolkit errors"""

    def __init__(
        self,
        message: str,
        code: str = "PSI_PARITY_ERROR",
        exit_code: int = EXIT_VERIFICATION,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.code = code
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


# Scalars

class InvalidFieldError(PsiParityError):
    """Raised when a base field descriptor is not Q or F_p with p prime"""

    def __init__(self, descriptor: str, reason: str):
        super().__init__(
            message=f"Invalid base field '{descriptor}': {reason}",
            code="INVALID_FIELD",
            exit_code=EXIT_PARSE,
            details={"field": descriptor, "reason": reason}
        )


class DivisionByNonUnit(PsiParityError):
    """Raised when dividing by an element that vanishes at the base point"""

    def __init__(self, divisor: str, base_point: Optional[str] = None):
        where = f"vanishes at s0={base_point}" if base_point is not None else "zero in the base field"
        super().__init__(
            message=f"Division by non-unit {divisor} ({where})",
            code="DIVISION_BY_NON_UNIT",
            details={"divisor": divisor, "base_point": base_point}
        )


class PoleAtPoint(PsiParityError):
    """Raised when evaluating at a point where a denominator vanishes"""

    def __init__(self, value: str, point: str):
        super().__init__(
            message=f"{value} has a pole at s={point}",
            code="POLE_AT_POINT",
            exit_code=EXIT_POLE,
            details={"value": value, "point": point}
        )


class ScalarSyntaxError(PsiParityError):
    """Raised when a scalar expression cannot be parsed"""

    def __init__(self, text: str, position: int, reason: str):
        super().__init__(
            message=f"Cannot parse scalar '{text}' at column {position + 1}: {reason}",
            code="SCALAR_SYNTAX",
            exit_code=EXIT_PARSE,
            details={"text": text, "column": position + 1, "reason": reason}
        )


# Linear algebra

class ShapeMismatch(PsiParityError):
    """Raised when matrix or complex shapes do not fit together"""

    def __init__(self, operation: str, reason: str):
        super().__init__(
            message=f"Shape mismatch in {operation}: {reason}",
            code="SHAPE_MISMATCH",
            details={"operation": operation, "reason": reason}
        )


class NonSquare(PsiParityError):
    """Raised when a square matrix is required"""

    def __init__(self, rows: int, cols: int):
        super().__init__(
            message=f"Matrix of shape {rows}x{cols} is not square",
            code="NON_SQUARE",
            details={"rows": rows, "cols": cols}
        )


class NotSkew(PsiParityError):
    """Raised when a matrix is not alternating (A^T = -A with zero diagonal)"""

    def __init__(self, row: int, col: int):
        super().__init__(
            message=f"Matrix is not alternating at entry ({row}, {col})",
            code="NOT_SKEW",
            details={"row": row, "col": col}
        )


class OddDimension(PsiParityError):
    """Raised when a Pfaffian of an odd-dimensional matrix is requested"""

    def __init__(self, size: int):
        super().__init__(
            message=f"Pfaffian needs even dimension, got {size}",
            code="ODD_DIMENSION",
            details={"size": size}
        )


class OddSkewRank(PsiParityError):
    """Internal assertion: an alternating matrix evaluated to odd rank"""

    def __init__(self, rank: int, point: str):
        super().__init__(
            message=f"Alternating matrix has odd rank {rank} at s={point}",
            code="ODD_SKEW_RANK",
            exit_code=EXIT_INTERNAL,
            details={"rank": rank, "point": point}
        )


class NotUnitDeterminant(PsiParityError):
    """Raised when a matrix is not invertible over the local ring"""

    def __init__(self, determinant: str):
        super().__init__(
            message=f"Determinant {determinant} is not a unit of the local ring",
            code="NOT_UNIT_DETERMINANT",
            details={"determinant": determinant}
        )


# Complexes

class NotAComplex(PsiParityError):
    """Raised when consecutive differentials do not compose to zero"""

    def __init__(self, degree: int):
        super().__init__(
            message=f"NotAComplex at degree {degree}",
            code="NOT_A_COMPLEX",
            details={"degree": degree}
        )


class NotAChainMap(PsiParityError):
    """Raised when a degreewise map does not commute with the differentials"""

    def __init__(self, degree: int):
        super().__init__(
            message=f"Map does not commute with differentials at degree {degree}",
            code="NOT_A_CHAIN_MAP",
            details={"degree": degree}
        )


class LengthExceedsTwist(PsiParityError):
    """Raised when dualizing a complex longer than the twist"""

    def __init__(self, length: int, twist: int):
        super().__init__(
            message=f"Complex of length {length} exceeds twist {twist}",
            code="LENGTH_EXCEEDS_TWIST",
            details={"length": length, "twist": twist}
        )


# Pairings

class NotChainCompatible(PsiParityError):
    """Raised when a pairing violates R(da x b) + (-1)^p R(a x db) = 0"""

    def __init__(self, degree: int):
        super().__init__(
            message=f"NotChainCompatible at degree {degree}",
            code="NOT_CHAIN_COMPATIBLE",
            details={"degree": degree}
        )


class NotSymmetric(PsiParityError):
    """Raised when a pairing violates gamma o tau = (-1)^m gamma"""

    def __init__(self, degree: int):
        super().__init__(
            message=f"NotSymmetric at degree {degree}",
            code="NOT_SYMMETRIC",
            details={"degree": degree}
        )


class CharTwo(PsiParityError):
    """Raised when 2 is not a unit in the base field"""

    def __init__(self, operation: str):
        super().__init__(
            message=f"CharTwo: {operation} needs 2 to be a unit in the base ring",
            code="CHAR_TWO",
            details={"operation": operation}
        )


class NotPerfect(PsiParityError):
    """Raised when a pairing component is not invertible at a point"""

    def __init__(self, degree: int, point: str, reason: str = "not invertible"):
        super().__init__(
            message=f"NotPerfect({degree}) at s={point}: {reason}",
            code="NOT_PERFECT",
            details={"degree": degree, "point": point, "reason": reason}
        )


class NotPerfectOnCohomology(PsiParityError):
    """Raised when the induced pairing on fiber cohomology is degenerate"""

    def __init__(self, degree: int, point: str):
        super().__init__(
            message=f"NotPerfectOnCohomology({degree}) at s={point}",
            code="NOT_PERFECT_ON_COHOMOLOGY",
            exit_code=EXIT_HYPOTHESIS,
            details={"degree": degree, "point": point}
        )


class SkewnessViolation(PsiParityError):
    """Internal assertion: the middle differential came out non-alternating"""

    def __init__(self, m: int):
        super().__init__(
            message=f"Middle differential at degree {m} is not alternating",
            code="SKEWNESS_VIOLATION",
            exit_code=EXIT_INTERNAL,
            details={"m": m}
        )


class InternalInvariantError(PsiParityError):
    """Internal assertion on a construction that is correct by proof"""

    def __init__(self, invariant: str, reason: str):
        super().__init__(
            message=f"Invariant '{invariant}' failed: {reason}",
            code="INTERNAL_INVARIANT",
            exit_code=EXIT_INTERNAL,
            details={"invariant": invariant, "reason": reason}
        )


# Generation and documents

class InfeasibleRanks(PsiParityError):
    """Raised when generator parameters admit no requested instance"""

    def __init__(self, reason: str):
        super().__init__(
            message=f"Infeasible generator ranks: {reason}",
            code="INFEASIBLE_RANKS",
            exit_code=EXIT_INFEASIBLE,
            details={"reason": reason}
        )


class InputUnreadable(PsiParityError):
    """Raised when an input document cannot be read"""

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"cannot read input {path}: {reason}",
            code="INPUT_UNREADABLE",
            exit_code=EXIT_UNREADABLE,
            details={"path": path, "reason": reason}
        )


class DocumentError(PsiParityError):
    """Raised when a document is malformed"""

    def __init__(self, location: str, reason: str, line: Optional[int] = None, column: Optional[int] = None):
        position = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(
            message=f"Invalid document at {location}{position}: {reason}",
            code="DOCUMENT_ERROR",
            exit_code=EXIT_PARSE,
            details={"location": location, "reason": reason, "line": line, "column": column}
        )


class MissingPairing(PsiParityError):
    """Raised when a command needs a pairing block the document lacks"""

    def __init__(self, command: str):
        super().__init__(
            message=f"Command '{command}' needs a pairing block",
            code="MISSING_PAIRING",
            exit_code=EXIT_HYPOTHESIS,
            details={"command": command}
        )


class ConfigurationError(PsiParityError):
    """Raised when configuration is invalid"""

    def __init__(self, setting: str, reason: str):
        super().__init__(
            message=f"Configuration error for '{setting}': {reason}",
            code="CONFIGURATION_ERROR",
            exit_code=EXIT_USAGE,
            details={"setting": setting, "reason": reason}
        )


class UsageError(PsiParityError):
    """Raised on invalid command-line usage"""

    def __init__(self, reason: str):
        super().__init__(
            message=f"usage error: {reason}",
            code="USAGE_ERROR",
            exit_code=EXIT_USAGE,
            details={"reason": reason}
        )
