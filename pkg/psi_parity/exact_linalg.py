"""
Exact matrix algebra over the base field k, the fraction field k(t) and the
local ring O

Ranks use fraction-free (Bareiss) elimination: over k for ranks at a point,
over k[t] (after clearing row denominators) for generic ranks and
determinants. Smith normal form works over the DVR O with minimal-valuation
pivoting, ties broken by smallest row, then smallest column.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from .exceptions import (
    NonSquare, NotSkew, NotUnitDeterminant, OddDimension, OddSkewRank, ShapeMismatch
)
from .scalars import BaseField, LocalRing, LocalScalar, ScalarLike

FieldMatrix = List[List[Any]]


@dataclass(frozen=True, eq=False)
class MatrixLocal:
    """Dense row-major matrix with entries in O"""
    ring: LocalRing
    rows: int
    cols: int
    entries: Tuple[Tuple[LocalScalar, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise ShapeMismatch("matrix", f"entry grid does not have shape {self.rows}x{self.cols}")

    # Construction

    @classmethod
    def build(
        cls,
        ring: LocalRing,
        data: Sequence[Sequence[ScalarLike]],
        rows: Optional[int] = None,
        cols: Optional[int] = None
    ) -> MatrixLocal:
        """Matrix from nested rows of ints, fractions, expression strings or scalars"""
        rows = len(data) if rows is None else rows
        if cols is None:
            cols = len(data[0]) if data else 0
        entries = tuple(tuple(ring.scalar(x) for x in row) for row in data)
        if not entries and rows:
            raise ShapeMismatch("matrix", f"no rows given for {rows}x{cols}")
        return cls(ring, rows, cols, entries)

    @classmethod
    def from_function(cls, ring: LocalRing, rows: int, cols: int, f: Callable[[int, int], LocalScalar]) -> MatrixLocal:
        return cls(ring, rows, cols, tuple(tuple(f(i, j) for j in range(cols)) for i in range(rows)))

    @classmethod
    def zeros(cls, ring: LocalRing, rows: int, cols: int) -> MatrixLocal:
        zero = ring.zero
        return cls(ring, rows, cols, tuple((zero,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, ring: LocalRing, size: int) -> MatrixLocal:
        return cls.diagonal(ring, [ring.one] * size)

    @classmethod
    def diagonal(cls, ring: LocalRing, values: Sequence[ScalarLike]) -> MatrixLocal:
        diag = [ring.scalar(v) for v in values]
        n = len(diag)
        return cls.from_function(ring, n, n, lambda i, j: diag[i] if i == j else ring.zero)

    @classmethod
    def block(cls, ring: LocalRing, row_sizes: Sequence[int], col_sizes: Sequence[int],
              blocks: Dict[Tuple[int, int], MatrixLocal]) -> MatrixLocal:
        """Assemble a block matrix; missing blocks are zero"""
        row_offsets = [sum(row_sizes[:i]) for i in range(len(row_sizes))]
        col_offsets = [sum(col_sizes[:j]) for j in range(len(col_sizes))]
        grid = [[ring.zero] * sum(col_sizes) for _ in range(sum(row_sizes))]
        for (bi, bj), block in blocks.items():
            if block.shape != (row_sizes[bi], col_sizes[bj]):
                raise ShapeMismatch("block", f"block ({bi}, {bj}) has shape {block.shape}, "
                                             f"expected {(row_sizes[bi], col_sizes[bj])}")
            for i in range(block.rows):
                for j in range(block.cols):
                    grid[row_offsets[bi] + i][col_offsets[bj] + j] = block.entries[i][j]
        return cls(ring, sum(row_sizes), sum(col_sizes), tuple(tuple(row) for row in grid))

    @classmethod
    def block_diagonal(cls, ring: LocalRing, blocks: Sequence[MatrixLocal]) -> MatrixLocal:
        return cls.block(ring, [b.rows for b in blocks], [b.cols for b in blocks],
                         {(i, i): b for i, b in enumerate(blocks)})

    # Access

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: Tuple[int, int]) -> LocalScalar:
        i, j = index
        return self.entries[i][j]

    def column(self, j: int) -> Tuple[LocalScalar, ...]:
        return tuple(row[j] for row in self.entries)

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> MatrixLocal:
        return MatrixLocal(self.ring, len(row_indices), len(col_indices),
                           tuple(tuple(self.entries[i][j] for j in col_indices) for i in row_indices))

    def to_strings(self) -> List[List[str]]:
        return [[str(x) for x in row] for row in self.entries]

    # Algebra

    def _check_same_shape(self, other: MatrixLocal, operation: str) -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(operation, f"{self.shape} vs {other.shape}")

    def __add__(self, other: MatrixLocal) -> MatrixLocal:
        self._check_same_shape(other, "addition")
        return MatrixLocal(self.ring, self.rows, self.cols,
                           tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other: MatrixLocal) -> MatrixLocal:
        self._check_same_shape(other, "subtraction")
        return MatrixLocal(self.ring, self.rows, self.cols,
                           tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self) -> MatrixLocal:
        return MatrixLocal(self.ring, self.rows, self.cols, tuple(tuple(-a for a in row) for row in self.entries))

    def scale(self, c: ScalarLike) -> MatrixLocal:
        factor = self.ring.scalar(c)
        return MatrixLocal(self.ring, self.rows, self.cols,
                           tuple(tuple(factor * a for a in row) for row in self.entries))

    def __matmul__(self, other: MatrixLocal) -> MatrixLocal:
        if self.cols != other.rows:
            raise ShapeMismatch("product", f"{self.shape} @ {other.shape}")
        zero = self.ring.zero
        columns = [other.column(j) for j in range(other.cols)]
        result = []
        for row in self.entries:
            support = [(k, a) for k, a in enumerate(row) if a]
            out_row = []
            for col in columns:
                acc = zero
                for k, a in support:
                    b = col[k]
                    if b:
                        acc = acc + a * b
                out_row.append(acc)
            result.append(tuple(out_row))
        return MatrixLocal(self.ring, self.rows, other.cols, tuple(result))

    @property
    def T(self) -> MatrixLocal:
        return MatrixLocal(self.ring, self.cols, self.rows,
                           tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def kron(self, other: MatrixLocal) -> MatrixLocal:
        """Kronecker product; row (a, b) has index a * other.rows + b"""
        return MatrixLocal.from_function(
            self.ring, self.rows * other.rows, self.cols * other.cols,
            lambda i, j: self.entries[i // other.rows][j // other.cols] * other.entries[i % other.rows][j % other.cols]
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixLocal):
            return NotImplemented
        return self.shape == other.shape and self.ring == other.ring and self.entries == other.entries

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return all(not a for row in self.entries for a in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # Fibers

    def evaluate(self, point: Any) -> FieldMatrix:
        """Entrywise evaluation at s; PoleAtPoint propagates"""
        return [[a.eval_at(point) for a in row] for row in self.entries]

    def residue(self) -> FieldMatrix:
        return self.evaluate(self.ring.base_point)

    def has_pole_at(self, point: Any) -> bool:
        return any(a.has_pole_at(point) for row in self.entries for a in row)

    def vanishes_at_base_point(self) -> bool:
        """True when every entry vanishes at s0"""
        return all(not a or a.valuation() >= 1 for row in self.entries for a in row)

    def __repr__(self) -> str:
        return f"MatrixLocal({self.rows}x{self.cols}, {self.to_strings()})"


# Fraction-free elimination

def _bareiss_rank(matrix: FieldMatrix, ncols: int, exquo: Callable[[Any, Any], Any], one: Any) -> int:
    """Rank by fraction-free elimination; every division is exact"""
    M = [list(row) for row in matrix]
    nrows = len(M)
    prev = one
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        pivot_row = next((i for i in range(rank, nrows) if M[i][col]), None)
        if pivot_row is None:
            continue
        M[rank], M[pivot_row] = M[pivot_row], M[rank]
        pivot = M[rank][col]
        for i in range(rank + 1, nrows):
            lead = M[i][col]
            for j in range(col + 1, ncols):
                M[i][j] = exquo(pivot * M[i][j] - lead * M[rank][j], prev)
            M[i][col] = lead * 0
        prev = pivot
        rank += 1
    return rank


def _bareiss_det(matrix: FieldMatrix, exquo: Callable[[Any, Any], Any], one: Any, zero: Any) -> Any:
    M = [list(row) for row in matrix]
    n = len(M)
    if n == 0:
        return one
    sign = 1
    prev = one
    for k in range(n - 1):
        if not M[k][k]:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return zero
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = exquo(M[k][k] * M[i][j] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


def _field_ops(field: BaseField) -> Tuple[Callable[[Any, Any], Any], Any]:
    domain = field.domain
    return (lambda a, b: domain.quo(a, b)), domain.one


def _cleared_rows(A: MatrixLocal) -> Tuple[List[List[Any]], Any]:
    """Polynomial rows obtained by multiplying each row by the lcm of its denominators"""
    polys = A.ring.polys
    rows = []
    scale = polys.one
    for row in A.entries:
        common = polys.one
        for a in row:
            if a.den != 1:
                common = common.lcm(a.den)
        rows.append([a.num * common.exquo(a.den) for a in row])
        scale = scale * common
    return rows, scale


def field_rank(matrix: FieldMatrix, ncols: int, field: BaseField) -> int:
    exquo, one = _field_ops(field)
    return _bareiss_rank(matrix, ncols, exquo, one)


def rank_at(A: MatrixLocal, point: Any) -> int:
    """Rank over k of A evaluated at s"""
    return field_rank(A.evaluate(point), A.cols, A.ring.field)


def rank_generic(A: MatrixLocal) -> int:
    """Rank over the fraction field k(t)"""
    rows, _ = _cleared_rows(A)
    polys = A.ring.polys
    return _bareiss_rank(rows, A.cols, lambda a, b: a.exquo(b), polys.one)


def determinant(A: MatrixLocal) -> LocalScalar:
    if not A.is_square():
        raise NonSquare(A.rows, A.cols)
    rows, scale = _cleared_rows(A)
    polys = A.ring.polys
    det_poly = _bareiss_det(rows, lambda a, b: a.exquo(b), polys.one, polys.zero)
    return A.ring.from_polys(det_poly, scale)


# Smith normal form over the DVR

@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V = diag(pi^e1, ..., pi^er, 0, ...) with U, V invertible over O"""
    U: MatrixLocal
    V: MatrixLocal
    exponents: Tuple[int, ...]
    source_shape: Tuple[int, int]

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def torsion_exponents(self) -> Tuple[int, ...]:
        return tuple(e for e in self.exponents if e > 0)

    def diagonal(self) -> MatrixLocal:
        ring = self.U.ring
        rows, cols = self.source_shape
        return MatrixLocal.from_function(
            ring, rows, cols,
            lambda i, j: ring.pi ** self.exponents[i] if i == j and i < self.rank else ring.zero
        )


def smith_normal_form(A: MatrixLocal) -> SmithDecomposition:
    """Smith form over O; pivots have minimal valuation (ties: row, then column)"""
    ring = A.ring
    m, n = A.rows, A.cols
    M = [list(row) for row in A.entries]
    U = [[ring.one if i == j else ring.zero for j in range(m)] for i in range(m)]
    V = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    exponents: List[int] = []

    for k in range(min(m, n)):
        best: Optional[Tuple[int, int, int]] = None
        for i in range(k, m):
            for j in range(k, n):
                if M[i][j]:
                    v = M[i][j].valuation()
                    if best is None or v < best[0]:
                        best = (v, i, j)
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, pi_row, pi_col = best

        # Move the pivot to (k, k)
        M[k], M[pi_row] = M[pi_row], M[k]
        U[k], U[pi_row] = U[pi_row], U[k]
        for row in M:
            row[k], row[pi_col] = row[pi_col], row[k]
        for row in V:
            row[k], row[pi_col] = row[pi_col], row[k]

        # Normalize the pivot to pi^v
        unit = M[k][k].divide_exact(ring.pi ** v)
        inverse = ring.one / unit
        M[k] = [inverse * a for a in M[k]]
        U[k] = [inverse * a for a in U[k]]
        pivot = M[k][k]

        for i in range(k + 1, m):
            if M[i][k]:
                factor = M[i][k].divide_exact(pivot)
                M[i] = [a - factor * b for a, b in zip(M[i], M[k])]
                U[i] = [a - factor * b for a, b in zip(U[i], U[k])]
        for j in range(k + 1, n):
            if M[k][j]:
                factor = M[k][j].divide_exact(pivot)
                for row in M:
                    row[j] = row[j] - factor * row[k]
                for row in V:
                    row[j] = row[j] - factor * row[k]
        exponents.append(v)

    return SmithDecomposition(
        U=MatrixLocal(ring, m, m, tuple(tuple(row) for row in U)),
        V=MatrixLocal(ring, n, n, tuple(tuple(row) for row in V)),
        exponents=tuple(exponents),
        source_shape=(m, n),
    )


# Alternating matrices

def _skew_violation(A: MatrixLocal) -> Optional[Tuple[int, int]]:
    if not A.is_square():
        raise NonSquare(A.rows, A.cols)
    for i in range(A.rows):
        if A.entries[i][i]:
            return i, i
        for j in range(i + 1, A.cols):
            if A.entries[i][j] != -A.entries[j][i]:
                return i, j
    return None


def is_skew(A: MatrixLocal) -> bool:
    """A^T = -A with zero diagonal (alternating, also in characteristic 2)"""
    return _skew_violation(A) is None


def require_skew(A: MatrixLocal) -> None:
    violation = _skew_violation(A)
    if violation is not None:
        raise NotSkew(*violation)


def skew_rank(A: MatrixLocal, point: Any) -> int:
    """Rank at s of an alternating matrix; always even"""
    require_skew(A)
    rank = rank_at(A, point)
    if rank % 2:
        raise OddSkewRank(rank, A.ring.field.format(A.ring.field.element(point)))
    return rank


def pfaffian(A: MatrixLocal) -> LocalScalar:
    """Pfaffian by expansion along the first row, memoized on index sets"""
    require_skew(A)
    if A.rows % 2:
        raise OddDimension(A.rows)
    ring = A.ring
    memo: Dict[Tuple[int, ...], LocalScalar] = {}

    def pf(indices: Tuple[int, ...]) -> LocalScalar:
        if not indices:
            return ring.one
        if indices in memo:
            return memo[indices]
        first, rest = indices[0], indices[1:]
        total = ring.zero
        for position, j in enumerate(rest):
            entry = A.entries[first][j]
            if not entry:
                continue
            term = entry * pf(rest[:position] + rest[position + 1:])
            total = total + term if position % 2 == 0 else total - term
        memo[indices] = total
        return total

    return pf(tuple(range(A.rows)))


def invert_unit(A: MatrixLocal) -> MatrixLocal:
    """Inverse over O by Gauss-Jordan with unit pivots"""
    if not A.is_square():
        raise NonSquare(A.rows, A.cols)
    ring = A.ring
    n = A.rows
    M = [list(row) + [ring.one if i == j else ring.zero for j in range(n)] for i, row in enumerate(A.entries)]
    for k in range(n):
        pivot_row = next((i for i in range(k, n) if M[i][k].is_unit()), None)
        if pivot_row is None:
            raise NotUnitDeterminant(str(determinant(A)))
        M[k], M[pivot_row] = M[pivot_row], M[k]
        inverse = ring.one / M[k][k]
        M[k] = [inverse * a for a in M[k]]
        for i in range(n):
            if i != k and M[i][k]:
                factor = M[i][k]
                M[i] = [a - factor * b for a, b in zip(M[i], M[k])]
    return MatrixLocal(ring, n, n, tuple(tuple(row[n:]) for row in M))


# Linear algebra over the residue field

def _domain_matrix(matrix: FieldMatrix, ncols: int, field: BaseField) -> DomainMatrix:
    return DomainMatrix([list(row) for row in matrix], (len(matrix), ncols), field.domain)


def field_rref(matrix: FieldMatrix, ncols: int, field: BaseField) -> Tuple[FieldMatrix, List[int]]:
    """Nonzero rows of the reduced row echelon form and the pivot columns"""
    if not matrix or not ncols:
        return [], []
    reduced, pivots = _domain_matrix(matrix, ncols, field).rref()
    return reduced.to_list()[:len(pivots)], list(pivots)


def field_nullspace(matrix: FieldMatrix, ncols: int, field: BaseField) -> List[List[Any]]:
    """Kernel basis as row vectors"""
    domain = field.domain
    if not matrix:
        return [[domain.one if a == b else domain.zero for a in range(ncols)] for b in range(ncols)]
    if not ncols:
        return []
    return _domain_matrix(matrix, ncols, field).nullspace().to_list()


def field_solve(columns: List[List[Any]], target: List[Any], field: BaseField) -> Optional[List[Any]]:
    """Coefficients x with sum x_k columns[k] = target, or None"""
    domain = field.domain
    augmented = [[col[i] for col in columns] + [target[i]] for i in range(len(target))]
    reduced, pivots = field_rref(augmented, len(columns) + 1, field)
    if len(columns) in pivots:
        return None
    solution = [domain.zero] * len(columns)
    for row, pivot in zip(reduced, pivots):
        solution[pivot] = row[-1]
    return solution
