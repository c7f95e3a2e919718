from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from .exceptions import InvalidFieldError
from .scalars import BaseField, FieldKind

SCHEMA_VERSION = 1

FieldDescriptor = Union[str, Dict[str, int]]


def canonical_field(value: FieldDescriptor) -> FieldDescriptor:
    """'Q' or {'Fp': p}"""
    if isinstance(value, dict):
        if set(value) != {"Fp"}:
            raise ValueError(f"field object must be {{\"Fp\": p}}, got keys {sorted(value)}")
        field = BaseField.prime(int(value["Fp"]))
    else:
        field = BaseField.parse(value)
    return "Q" if field.kind is FieldKind.RATIONALS else {"Fp": field.characteristic}


def field_from_descriptor(value: FieldDescriptor) -> BaseField:
    if isinstance(value, dict):
        return BaseField.prime(int(value["Fp"]))
    return BaseField.parse(value)


class PairingBlock(BaseModel):
    """Adjoint matrices R_0..R_n as scalar strings"""
    model_config = ConfigDict(extra="forbid")

    n: int = Field(..., description="Twist, n = 2m+1")
    m: int = Field(..., ge=0)
    components: List[List[List[str]]] = Field(..., description="R_p with shape r_{n-p} x r_p, row-major")

    @model_validator(mode="after")
    def check_twist(self) -> "PairingBlock":
        if self.n != 2 * self.m + 1:
            raise ValueError(f"n={self.n} is not 2m+1 for m={self.m}")
        if len(self.components) != self.n + 1:
            raise ValueError(f"expected {self.n + 1} components, got {len(self.components)}")
        return self


class DocumentMetadata(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = Field(None, description="Human readable instance name")
    seed: Optional[int] = Field(None, description="Generator seed that produced the instance")


class ComplexDocument(BaseModel):
    """Serialized complex with optional pairing; scalars are expression strings"""
    model_config = ConfigDict(extra="forbid")

    schema_version: int = Field(default=SCHEMA_VERSION)
    field: FieldDescriptor = Field(default="Q", description="\"Q\" or {\"Fp\": p}")
    base_point: str = Field(default="0", description="Distinguished point s0")
    ranks: List[int] = Field(..., min_length=1)
    diffs: List[List[List[str]]] = Field(default=[], description="d^i with shape r_{i+1} x r_i, row-major")
    pairing: Optional[PairingBlock] = None
    metadata: Optional[DocumentMetadata] = None

    @field_validator("schema_version")
    @classmethod
    def check_version(cls, v: int) -> int:
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {v}")
        return v

    @field_validator("field", mode="before")
    @classmethod
    def normalize_field(cls, v: Any) -> FieldDescriptor:
        try:
            return canonical_field(v)
        except InvalidFieldError as e:
            raise ValueError(e.message) from e

    @field_validator("ranks")
    @classmethod
    def check_ranks(cls, v: List[int]) -> List[int]:
        if any(r < 0 for r in v):
            raise ValueError("ranks must be non-negative")
        return v


class FiberRow(BaseModel):
    point: str
    dims: List[int] = Field(..., description="dim H^i at the point")
    psi: int
    parity: int
    jumps: List[int] = Field(default=[], description="Degrees where dim H^i exceeds its generic value")


class FiberReport(BaseModel):
    """Per-point fiber cohomology table"""
    field: str
    base_point: str
    generic_dims: List[int]
    euler_characteristic: int
    rows: List[FiberRow]

    @property
    def parities(self) -> List[int]:
        return [row.parity for row in self.rows]

    @computed_field
    @property
    def parity_constant(self) -> bool:
        return len(set(self.parities)) <= 1

    @computed_field
    @property
    def euler_constant(self) -> bool:
        return all(
            sum(d if i % 2 == 0 else -d for i, d in enumerate(row.dims)) == self.euler_characteristic
            for row in self.rows
        )


class PointCheck(BaseModel):
    """psi at one point computed three ways"""
    point: str
    psi_input: int
    psi_special: int
    psi_formula: int
    parity: int
    dims_agree: bool = Field(..., description="Fiber cohomology of input and special complex agree")


class PipelineReport(BaseModel):
    field: str
    base_point: str
    n: int
    m: int
    symmetry_kind: str
    input_ranks: List[int]
    minimal_ranks: List[int]
    split_count: List[int]
    beta: List[List[str]]
    beta_exponents: List[int] = Field(..., description="Smith exponents of beta over O")
    beta_skew: bool
    composite_is_chain_map: bool
    composite_is_quasi_iso: Optional[bool] = None
    special: ComplexDocument
    checks: List[PointCheck]
    dropped_points: List[str] = Field(default=[], description="Sample points where the special complex has a pole")

    @computed_field
    @property
    def parity_constant(self) -> bool:
        return len({c.parity for c in self.checks}) <= 1

    @computed_field
    @property
    def formula_matches(self) -> bool:
        return all(c.psi_formula == c.psi_special == c.psi_input for c in self.checks)


class ErrorResponse(BaseModel):
    """One-line machine readable failure"""
    success: bool = Field(False, description="Always false for errors")
    error: str = Field(..., description="Error code")
    message: str = Field(..., description="Human-readable error message")
    details: Optional[Dict[str, Any]] = Field(None, description="Offending degree, point or indices")
    run_id: Optional[str] = Field(None, description="Invocation tracking ID")


def error_response(
    error_code: str,
    message: str,
    details: Optional[Dict[str, Any]] = None,
    run_id: Optional[str] = None
) -> ErrorResponse:
    """Create an error response"""
    return ErrorResponse(error=error_code, message=message, details=details or None, run_id=run_id)


class CounterexampleReport(BaseModel):
    """The three ways parity invariance fails without its hypotheses"""
    fiber: FiberReport = Field(..., description="Scan of O -pi-> O, whose parity jumps")
    char_two_error: str = Field(..., description="Error raised when symmetrizing over F_2")
    cohomology_error: str = Field(..., description="Error raised by the pipeline on a degenerate duality")
