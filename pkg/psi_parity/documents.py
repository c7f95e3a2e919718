"""
Reading and writing complex documents (JSON) with positioned errors
"""
import json
from pathlib import Path
from typing import Any, List, Optional, Tuple

from pydantic import ValidationError

from .complexes import FreeComplex
from .exact_linalg import MatrixLocal
from .exceptions import (
    DocumentError, InputUnreadable, ScalarSyntaxError, ShapeMismatch
)
from .functional_types import Failure, Result, Success, flat_map, unwrap
from .logging import logger
from .models import ComplexDocument, DocumentMetadata, PairingBlock, field_from_descriptor
from .pairings import Pairing
from .scalars import FieldKind, LocalRing


# Pure functions for document I/O
def read_text_safe(path: Path) -> Result[str, InputUnreadable]:
    """Safely read a document"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return Success(f.read())
    except OSError as e:
        return Failure(InputUnreadable(str(path), e.strerror or type(e).__name__))
    except UnicodeDecodeError as e:
        return Failure(InputUnreadable(str(path), f"not UTF-8 text ({e.reason})"))


def decode_json_safe(text: str) -> Result[Any, DocumentError]:
    try:
        return Success(json.loads(text))
    except json.JSONDecodeError as e:
        return Failure(DocumentError("$", e.msg, line=e.lineno, column=e.colno))


def parse_document_safe(data: Any) -> Result[ComplexDocument, DocumentError]:
    """Validate decoded JSON against the document schema"""
    try:
        return Success(ComplexDocument.model_validate(data))
    except ValidationError as e:
        first = e.errors()[0]
        location = "$" + "".join(f"[{part}]" if isinstance(part, int) else f".{part}" for part in first["loc"])
        return Failure(DocumentError(location, first["msg"]))


def load_document(path: Path) -> ComplexDocument:
    result = flat_map(parse_document_safe)(flat_map(decode_json_safe)(read_text_safe(Path(path))))
    if isinstance(result, Failure):
        logger.debug("Document rejected", path=str(path), error=result.error.code)
    return unwrap(result)


def loads_document(text: str) -> ComplexDocument:
    return unwrap(flat_map(parse_document_safe)(decode_json_safe(text)))


def dump_document(document: ComplexDocument) -> str:
    """Canonical serialization; write -> read -> write is byte-identical"""
    return document.model_dump_json(indent=2, exclude_none=True) + "\n"


def write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


# Documents <-> objects

def _matrix(ring: LocalRing, data: List[List[str]], rows: int, cols: int, location: str) -> MatrixLocal:
    if rows == 0 or cols == 0:
        if data and (len(data) != rows or any(row for row in data)):
            raise DocumentError(location, f"expected an empty {rows}x{cols} matrix")
        return MatrixLocal.zeros(ring, rows, cols)
    if len(data) != rows or any(len(row) != cols for row in data):
        raise DocumentError(location, f"expected shape {rows}x{cols}")
    entries = []
    for i, row in enumerate(data):
        parsed = []
        for j, text in enumerate(row):
            try:
                parsed.append(ring.parse(text))
            except ScalarSyntaxError as e:
                raise DocumentError(f"{location}[{i}][{j}]", e.message) from e
        entries.append(tuple(parsed))
    return MatrixLocal(ring, rows, cols, tuple(entries))


def ring_of(document: ComplexDocument) -> LocalRing:
    field = field_from_descriptor(document.field)
    try:
        return LocalRing.at(field, document.base_point)
    except ScalarSyntaxError as e:
        raise DocumentError("$.base_point", e.message) from e


def document_to_objects(document: ComplexDocument) -> Tuple[FreeComplex, Optional[Pairing]]:
    """Complex and optional pairing; shape problems become DocumentError"""
    ring = ring_of(document)
    ranks = document.ranks
    if len(document.diffs) != len(ranks) - 1:
        raise DocumentError("$.diffs", f"{len(ranks)} ranks need {len(ranks) - 1} differentials")
    diffs = tuple(
        _matrix(ring, data, ranks[i + 1], ranks[i], f"$.diffs[{i}]") for i, data in enumerate(document.diffs)
    )
    C = FreeComplex(ring, tuple(ranks), diffs)
    if document.pairing is None:
        return C, None
    block = document.pairing
    if C.length > block.n:
        raise DocumentError("$.pairing.n", f"complex of length {C.length} exceeds twist {block.n}")
    host = C.padded(block.n)
    components = tuple(
        _matrix(ring, data, host.ranks[block.n - p], host.ranks[p], f"$.pairing.components[{p}]")
        for p, data in enumerate(block.components)
    )
    try:
        return host, Pairing(host, block.n, block.m, components)
    except ShapeMismatch as e:
        raise DocumentError("$.pairing", e.message) from e


def _strings(A: MatrixLocal) -> List[List[str]]:
    return A.to_strings() if A.rows and A.cols else []


def objects_to_document(
    C: FreeComplex,
    pairing: Optional[Pairing] = None,
    name: Optional[str] = None,
    seed: Optional[int] = None,
) -> ComplexDocument:
    field = C.ring.field
    descriptor: Any = "Q" if field.kind is FieldKind.RATIONALS else {"Fp": field.characteristic}
    block = None
    if pairing is not None:
        block = PairingBlock(n=pairing.n, m=pairing.m, components=[_strings(R) for R in pairing.components])
    metadata = DocumentMetadata(name=name, seed=seed) if name is not None or seed is not None else None
    return ComplexDocument(
        field=descriptor,
        base_point=C.ring.base_point_label,
        ranks=list(C.ranks),
        diffs=[_strings(d) for d in C.diffs],
        pairing=block,
        metadata=metadata,
    )


def load_objects(path: Path) -> Tuple[ComplexDocument, FreeComplex, Optional[Pairing]]:
    document = load_document(path)
    C, P = document_to_objects(document)
    return document, C, P
