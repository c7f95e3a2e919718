"""
Finite free complexes over O in degrees 0..n and their calculus
"""
from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple, TypeVar

from .exact_linalg import (
    FieldMatrix, MatrixLocal, determinant, field_nullspace, field_rank, field_solve, invert_unit,
    rank_at, rank_generic, smith_normal_form
)
from .exceptions import (
    InternalInvariantError, LengthExceedsTwist, NotAChainMap, NotAComplex, PoleAtPoint, ShapeMismatch
)
from .functional_types import Result, attempt, partition_results
from .logging import logger, track_performance
from .scalars import FieldKind, LocalRing

T = TypeVar("T")


@dataclass(frozen=True, eq=False)
class FreeComplex:
    """0 -> C^0 -> ... -> C^n -> 0 with d^i of shape r_{i+1} x r_i"""
    ring: LocalRing
    ranks: Tuple[int, ...]
    diffs: Tuple[MatrixLocal, ...]

    def __post_init__(self) -> None:
        if not self.ranks:
            raise ShapeMismatch("complex", "a complex needs at least one degree")
        if any(r < 0 for r in self.ranks):
            raise ShapeMismatch("complex", f"negative rank in {self.ranks}")
        if len(self.diffs) != len(self.ranks) - 1:
            raise ShapeMismatch("complex", f"{len(self.ranks)} terms need {len(self.ranks) - 1} differentials, "
                                           f"got {len(self.diffs)}")
        for i, d in enumerate(self.diffs):
            if d.shape != (self.ranks[i + 1], self.ranks[i]):
                raise ShapeMismatch("complex", f"d^{i} has shape {d.shape}, expected "
                                               f"{(self.ranks[i + 1], self.ranks[i])}")
            if d.ring != self.ring:
                raise ShapeMismatch("complex", f"d^{i} lives over a different local ring")

    @classmethod
    def build(cls, ring: LocalRing, ranks: Sequence[int], diffs: Sequence[Sequence[Sequence[Any]]]) -> FreeComplex:
        """Complex from ranks and nested entry lists; an empty list stands for a matrix with no entries"""
        ranks = tuple(ranks)
        matrices = []
        for i, data in enumerate(diffs):
            rows, cols = ranks[i + 1], ranks[i]
            if rows == 0 or cols == 0:
                matrices.append(MatrixLocal.zeros(ring, rows, cols))
            else:
                matrices.append(MatrixLocal.build(ring, data, rows, cols))
        return cls(ring, ranks, tuple(matrices))

    @classmethod
    def zero(cls, ring: LocalRing, length: int) -> FreeComplex:
        return cls(ring, (0,) * (length + 1), tuple(MatrixLocal.zeros(ring, 0, 0) for _ in range(length)))

    @classmethod
    def point(cls, ring: LocalRing) -> FreeComplex:
        """0 -> O -> 0 in degree 0, the unit of the tensor product"""
        return cls(ring, (1,), ())

    @property
    def length(self) -> int:
        return len(self.ranks) - 1

    def rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i <= self.length else 0

    def diff(self, i: int) -> MatrixLocal:
        """d^i, extended by zero maps out of the last term and into the first"""
        if 0 <= i < self.length:
            return self.diffs[i]
        return MatrixLocal.zeros(self.ring, self.rank(i + 1), self.rank(i))

    def padded(self, length: int) -> FreeComplex:
        if length < self.length:
            raise ShapeMismatch("pad", f"cannot shorten a complex of length {self.length} to {length}")
        extra = length - self.length
        ranks = self.ranks + (0,) * extra
        diffs = self.diffs + tuple(
            MatrixLocal.zeros(self.ring, ranks[i + 1], ranks[i]) for i in range(self.length, length)
        )
        return FreeComplex(self.ring, ranks, diffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreeComplex):
            return NotImplemented
        return self.ring == other.ring and self.ranks == other.ranks and self.diffs == other.diffs

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"FreeComplex(ranks={self.ranks}, over {self.ring.field.label} at s0={self.ring.base_point_label})"


def validate(C: FreeComplex) -> FreeComplex:
    """Assert d^{i+1} d^i = 0 for every i"""
    for i in range(C.length - 1):
        if not (C.diffs[i + 1] @ C.diffs[i]).is_zero():
            raise NotAComplex(i)
    return C


@dataclass(frozen=True, eq=False)
class ChainMap:
    """Degreewise maps f_i: source^i -> target^i"""
    source: FreeComplex
    target: FreeComplex
    components: Tuple[MatrixLocal, ...]

    def __post_init__(self) -> None:
        if self.source.length != self.target.length:
            raise ShapeMismatch("chain map", f"source length {self.source.length} != target length "
                                             f"{self.target.length}")
        if len(self.components) != self.source.length + 1:
            raise ShapeMismatch("chain map", f"expected {self.source.length + 1} components")
        for i, f in enumerate(self.components):
            if f.shape != (self.target.ranks[i], self.source.ranks[i]):
                raise ShapeMismatch("chain map", f"component {i} has shape {f.shape}, expected "
                                                 f"{(self.target.ranks[i], self.source.ranks[i])}")

    @classmethod
    def identity(cls, C: FreeComplex) -> ChainMap:
        return cls(C, C, tuple(MatrixLocal.identity(C.ring, r) for r in C.ranks))

    @classmethod
    def zero(cls, source: FreeComplex, target: FreeComplex) -> ChainMap:
        return cls(source, target, tuple(
            MatrixLocal.zeros(source.ring, rt, rs) for rs, rt in zip(source.ranks, target.ranks)
        ))

    @classmethod
    def scalar_identity(cls, source: FreeComplex, target: FreeComplex, signs: Sequence[int]) -> ChainMap:
        """Components sign_i * I between complexes with equal ranks"""
        return cls(source, target, tuple(
            MatrixLocal.identity(source.ring, r).scale(sign) for r, sign in zip(source.ranks, signs)
        ))

    @property
    def length(self) -> int:
        return self.source.length

    def validate(self) -> ChainMap:
        """Assert f_{i+1} d_source^i = d_target^i f_i"""
        for i in range(self.length):
            left = self.components[i + 1] @ self.source.diffs[i]
            right = self.target.diffs[i] @ self.components[i]
            if left != right:
                raise NotAChainMap(i)
        return self

    def compose(self, first: ChainMap) -> ChainMap:
        """self after first"""
        if first.target != self.source:
            raise ShapeMismatch("composition", "target of the first map is not the source of the second")
        return ChainMap(first.source, self.target,
                        tuple(g @ f for g, f in zip(self.components, first.components)))

    def inverse(self) -> ChainMap:
        """Inverse of a degreewise isomorphism over O"""
        return ChainMap(self.target, self.source, tuple(invert_unit(f) for f in self.components))

    def is_degreewise_iso(self) -> bool:
        if self.source.ranks != self.target.ranks:
            return False
        return all(f.rows == 0 or determinant(f).is_unit() for f in self.components)

    def __sub__(self, other: ChainMap) -> ChainMap:
        return ChainMap(self.source, self.target, tuple(a - b for a, b in zip(self.components, other.components)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.components == other.components

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class Homotopy:
    """h^k: source^k -> target^{k-1}; component 0 maps into the zero module"""
    source: FreeComplex
    target: FreeComplex
    components: Tuple[MatrixLocal, ...]

    @classmethod
    def zero(cls, source: FreeComplex, target: FreeComplex) -> Homotopy:
        return cls(source, target, tuple(
            MatrixLocal.zeros(source.ring, target.rank(k - 1), source.rank(k)) for k in range(source.length + 1)
        ))

    def component(self, k: int) -> MatrixLocal:
        if 0 <= k <= self.source.length:
            return self.components[k]
        return MatrixLocal.zeros(self.source.ring, self.target.rank(k - 1), self.source.rank(k))

    def __add__(self, other: Homotopy) -> Homotopy:
        return Homotopy(self.source, self.target, tuple(a + b for a, b in zip(self.components, other.components)))

    def conjugate(self, after: ChainMap, before: ChainMap) -> Homotopy:
        """after o h o before"""
        return Homotopy(before.source, after.target, tuple(
            after.components[k - 1] @ self.components[k] @ before.components[k] if k > 0
            else MatrixLocal.zeros(self.source.ring, 0, before.source.rank(0))
            for k in range(before.source.length + 1)
        ))

    def witnesses(self, f: ChainMap, g: ChainMap) -> bool:
        """f - g = d h + h d in every degree"""
        difference = f - g
        for k in range(self.source.length + 1):
            dh = self.target.diff(k - 1) @ self.component(k)
            hd = self.component(k + 1) @ self.source.diff(k)
            if difference.components[k] != dh + hd:
                return False
        return True


# Constructions

def direct_sum(A: FreeComplex, B: FreeComplex) -> FreeComplex:
    length = max(A.length, B.length)
    A, B = A.padded(length), B.padded(length)
    return FreeComplex(
        A.ring,
        tuple(a + b for a, b in zip(A.ranks, B.ranks)),
        tuple(MatrixLocal.block_diagonal(A.ring, [da, db]) for da, db in zip(A.diffs, B.diffs)),
    )


def inclusion(A: FreeComplex, B: FreeComplex) -> ChainMap:
    """A -> A (+) B on the first summand"""
    S = direct_sum(A, B)
    A = A.padded(S.length)
    ring = A.ring
    return ChainMap(A, S, tuple(
        MatrixLocal.block(ring, [A.ranks[i], S.ranks[i] - A.ranks[i]], [A.ranks[i]],
                          {(0, 0): MatrixLocal.identity(ring, A.ranks[i])})
        for i in range(S.length + 1)
    ))


def projection(A: FreeComplex, B: FreeComplex) -> ChainMap:
    """A (+) B -> A"""
    S = direct_sum(A, B)
    A = A.padded(S.length)
    ring = A.ring
    return ChainMap(S, A, tuple(
        MatrixLocal.block(ring, [A.ranks[i]], [A.ranks[i], S.ranks[i] - A.ranks[i]],
                          {(0, 0): MatrixLocal.identity(ring, A.ranks[i])})
        for i in range(S.length + 1)
    ))


def dual_twist(C: FreeComplex, n: int) -> FreeComplex:
    """Degree p is dual(C^{n-p}) with differential (-1)^{p+1} (d^{n-p-1})^T"""
    if C.length > n:
        raise LengthExceedsTwist(C.length, n)
    C = C.padded(n)
    ranks = tuple(C.ranks[n - p] for p in range(n + 1))
    diffs = tuple(C.diffs[n - p - 1].T.scale((-1) ** (p + 1)) for p in range(n))
    return FreeComplex(C.ring, ranks, diffs)


def double_dual_iso(C: FreeComplex, n: int) -> ChainMap:
    """C -> dual_twist(dual_twist(C, n), n) with components ((-1)^{n+1})^p I"""
    target = dual_twist(dual_twist(C, n), n)
    source = C.padded(n)
    sign = (-1) ** (n + 1)
    return ChainMap.scalar_identity(source, target, [sign ** p for p in range(n + 1)])


def tensor_blocks(A: FreeComplex, B: FreeComplex, q: int) -> List[Tuple[int, int, int]]:
    """(i, j, offset) for the blocks A^i (x) B^j of degree q, ascending in i"""
    blocks = []
    offset = 0
    for i in range(max(0, q - B.length), min(q, A.length) + 1):
        j = q - i
        blocks.append((i, j, offset))
        offset += A.ranks[i] * B.ranks[j]
    return blocks


def tensor_basis(A: FreeComplex, B: FreeComplex, q: int) -> List[Tuple[int, int, int, int]]:
    """Basis vectors a (x) b of degree q as (i, j, a, b) in index order"""
    return [
        (i, j, a, b)
        for i, j, _ in tensor_blocks(A, B, q)
        for a in range(A.ranks[i])
        for b in range(B.ranks[j])
    ]


def tensor(A: FreeComplex, B: FreeComplex) -> FreeComplex:
    """Tensor product with d(a (x) b) = da (x) b + (-1)^i a (x) db"""
    if A.ring != B.ring:
        raise ShapeMismatch("tensor", "factors live over different local rings")
    ring = A.ring
    length = A.length + B.length
    ranks = tuple(sum(A.ranks[i] * B.ranks[j] for i, j, _ in tensor_blocks(A, B, q)) for q in range(length + 1))
    diffs = []
    for q in range(length):
        source_blocks = tensor_blocks(A, B, q)
        target_blocks = tensor_blocks(A, B, q + 1)
        target_index = {(i, j): k for k, (i, j, _) in enumerate(target_blocks)}
        pieces = {}
        for col, (i, j, _) in enumerate(source_blocks):
            if (i + 1, j) in target_index:
                pieces[(target_index[(i + 1, j)], col)] = A.diffs[i].kron(MatrixLocal.identity(ring, B.ranks[j]))
            if (i, j + 1) in target_index:
                pieces[(target_index[(i, j + 1)], col)] = (
                    MatrixLocal.identity(ring, A.ranks[i]).kron(B.diffs[j]).scale((-1) ** i)
                )
        diffs.append(MatrixLocal.block(
            ring,
            [A.ranks[i] * B.ranks[j] for i, j, _ in target_blocks],
            [A.ranks[i] * B.ranks[j] for i, j, _ in source_blocks],
            pieces,
        ))
    return FreeComplex(ring, ranks, tuple(diffs))


def tau(A: FreeComplex) -> ChainMap:
    """a (x) b -> (-1)^{ij} b (x) a on tensor(A, A)"""
    T = tensor(A, A)
    ring = A.ring
    components = []
    for q in range(T.length + 1):
        offsets = {(i, j): offset for i, j, offset in tensor_blocks(A, A, q)}
        size = T.ranks[q]
        grid = [[ring.zero] * size for _ in range(size)]
        for i, j, offset in tensor_blocks(A, A, q):
            sign = ring.one if (i * j) % 2 == 0 else -ring.one
            for a in range(A.ranks[i]):
                for b in range(A.ranks[j]):
                    source_index = offset + a * A.ranks[j] + b
                    target_index = offsets[(j, i)] + b * A.ranks[i] + a
                    grid[target_index][source_index] = sign
        components.append(MatrixLocal(ring, size, size, tuple(tuple(row) for row in grid)))
    return ChainMap(T, T, tuple(components))


def mapping_cone(f: ChainMap) -> FreeComplex:
    """Cone with X^i (+) Y^{i-1} in degree i = 0..n+1

    The differential is [[-d_X^i, 0], [f_i, d_Y^{i-1}]]; degree i+1 of the
    cone carries the usual degree-i cone cohomology.
    """
    X, Y = f.source, f.target
    ring = X.ring
    n = X.length
    ranks = tuple(X.rank(i) + Y.rank(i - 1) for i in range(n + 2))
    diffs = []
    for i in range(n + 1):
        pieces = {(0, 0): -X.diff(i), (1, 0): f.components[i], (1, 1): Y.diff(i - 1)}
        diffs.append(MatrixLocal.block(
            ring,
            [X.rank(i + 1), Y.rank(i)],
            [X.rank(i), Y.rank(i - 1)],
            pieces,
        ))
    return FreeComplex(ring, ranks, tuple(diffs))


# Homology

@dataclass(frozen=True)
class HomologyGroup:
    """O^free_rank (+) sum of O/pi^e"""
    free_rank: int
    torsion: Tuple[int, ...]

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion


@dataclass(frozen=True)
class HomologyProfile:
    groups: Tuple[HomologyGroup, ...]

    def __getitem__(self, i: int) -> HomologyGroup:
        return self.groups[i]

    def __len__(self) -> int:
        return len(self.groups)

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.groups)

    def fiber_dims_at_base_point(self) -> List[int]:
        """dim H^i(C|s0) = b_i + #torsion(H^i) + #torsion(H^{i+1})"""
        dims = []
        for i, group in enumerate(self.groups):
            above = len(self.groups[i + 1].torsion) if i + 1 < len(self.groups) else 0
            dims.append(group.free_rank + len(group.torsion) + above)
        return dims

    def describe(self) -> List[str]:
        lines = []
        for i, group in enumerate(self.groups):
            parts = [f"O^{group.free_rank}"] if group.free_rank else []
            parts += ["O/pi" if e == 1 else f"O/pi^{e}" for e in group.torsion]
            lines.append(f"H^{i} = {' + '.join(parts) if parts else '0'}")
        return lines


@track_performance("homology")
def homology(C: FreeComplex) -> HomologyProfile:
    """Cohomology over O: free ranks from generic ranks, torsion from Smith forms"""
    validate(C)
    generic = [rank_generic(d) for d in C.diffs]
    torsion = [smith_normal_form(d).torsion_exponents for d in C.diffs]
    groups = []
    for i in range(C.length + 1):
        outgoing = generic[i] if i < C.length else 0
        incoming = generic[i - 1] if i > 0 else 0
        groups.append(HomologyGroup(
            free_rank=C.ranks[i] - outgoing - incoming,
            torsion=torsion[i - 1] if i > 0 else (),
        ))
    return HomologyProfile(tuple(groups))


def fiber_cohomology(C: FreeComplex, point: Any) -> List[int]:
    """dim_k H^i(C|_s) for i = 0..n"""
    ranks = [rank_at(d, point) for d in C.diffs]
    return [
        C.ranks[i] - (ranks[i] if i < C.length else 0) - (ranks[i - 1] if i > 0 else 0)
        for i in range(C.length + 1)
    ]


def semi_euler(C: FreeComplex, point: Any) -> int:
    """psi: total dimension of even-degree fiber cohomology"""
    return sum(dim for i, dim in enumerate(fiber_cohomology(C, point)) if i % 2 == 0)


def euler_characteristic(C: FreeComplex, point: Optional[Any] = None) -> int:
    """Alternating sum of fiber cohomology dimensions, or of ranks when no point is given"""
    dims = C.ranks if point is None else fiber_cohomology(C, point)
    return sum(dim if i % 2 == 0 else -dim for i, dim in enumerate(dims))


def generic_cohomology(C: FreeComplex) -> List[int]:
    """Cohomology dimensions over k(t)"""
    ranks = [rank_generic(d) for d in C.diffs]
    return [
        C.ranks[i] - (ranks[i] if i < C.length else 0) - (ranks[i - 1] if i > 0 else 0)
        for i in range(C.length + 1)
    ]


def is_quasi_iso(f: ChainMap) -> bool:
    f.validate()
    return homology(mapping_cone(f)).is_zero()


# Fiber cohomology in explicit bases

def _columns(matrix: FieldMatrix, rows: int, cols: int) -> List[List[Any]]:
    return [[matrix[i][j] for i in range(rows)] for j in range(cols)]


def _apply(matrix: FieldMatrix, vector: List[Any], zero: Any) -> List[Any]:
    result = []
    for row in matrix:
        acc = zero
        for a, x in zip(row, vector):
            acc += a * x
        result.append(acc)
    return result


@dataclass(frozen=True)
class CocycleBasis:
    """Cocycles whose classes form a basis of H^i(C|_s), plus spanning coboundaries"""
    representatives: Tuple[Tuple[Any, ...], ...]
    coboundaries: Tuple[Tuple[Any, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.representatives)


def cocycle_basis(C: FreeComplex, i: int, point: Any) -> CocycleBasis:
    """Kernel vectors in free-column order, kept when independent of the coboundaries and earlier picks"""
    field = C.ring.field
    size = C.rank(i)
    outgoing = C.diff(i)
    kernel = field_nullspace(outgoing.evaluate(point), size, field) if outgoing.rows else [
        [field.domain.one if a == b else field.domain.zero for a in range(size)] for b in range(size)
    ]
    incoming = C.diff(i - 1)
    image = _columns(incoming.evaluate(point), size, incoming.cols) if incoming.cols else []
    chosen: List[List[Any]] = []
    current = list(image)
    current_rank = field_rank(current, size, field) if current else 0
    for vector in kernel:
        candidate_rank = field_rank(current + [vector], size, field)
        if candidate_rank > current_rank:
            chosen.append(vector)
            current.append(vector)
            current_rank = candidate_rank
    return CocycleBasis(tuple(tuple(v) for v in chosen), tuple(tuple(v) for v in image))


def induced_cohomology_map(f: ChainMap, point: Any, i: int) -> FieldMatrix:
    """Matrix of H^i(f|_s) in the cocycle bases of source and target"""
    field = f.source.ring.field
    zero = field.domain.zero
    source = cocycle_basis(f.source, i, point)
    target = cocycle_basis(f.target, i, point)
    component = f.components[i].evaluate(point)
    columns = [list(v) for v in target.representatives] + [list(v) for v in target.coboundaries]
    matrix: FieldMatrix = [[zero] * source.dimension for _ in range(target.dimension)]
    for col, z in enumerate(source.representatives):
        image = _apply(component, list(z), zero)
        if not columns:
            if any(image):
                raise InternalInvariantError("induced map", f"image of a cocycle in degree {i} is not a cocycle")
            continue
        coefficients = field_solve(columns, image, field)
        if coefficients is None:
            raise InternalInvariantError("induced map", f"image of a cocycle in degree {i} is not a cocycle")
        for row in range(target.dimension):
            matrix[row][col] = coefficients[row]
    return matrix


# Sample points

def _candidate(rng: random.Random, ring: LocalRing, sample_range: int) -> Any:
    field = ring.field
    if field.kind is FieldKind.PRIME:
        return field.element(rng.randrange(field.characteristic))
    return field.element(rng.randint(-sample_range, sample_range))


def screen_point(matrices: Sequence[MatrixLocal], point: Any) -> Result[Any, PoleAtPoint]:
    """Success(point) when every entry is regular at the point"""
    def check() -> Any:
        for A in matrices:
            for row in A.entries:
                for a in row:
                    if a.has_pole_at(point):
                        raise PoleAtPoint(str(a), a.ring.field.format(point))
        return point
    return attempt(check)


def pole_free_points(
    C: FreeComplex,
    count: int,
    seed: int = 0,
    extra: Sequence[MatrixLocal] = (),
    sample_range: int = 100,
    max_attempts: int = 1000,
) -> List[Any]:
    """s0 followed by `count` seeded points avoiding every denominator root"""
    rng = random.Random(seed)
    matrices = list(C.diffs) + list(extra)
    points = [C.ring.base_point]
    rejected = 0
    attempts = 0
    while len(points) <= count and attempts < max_attempts:
        needed = min(count + 1 - len(points), max_attempts - attempts)
        candidates = [_candidate(rng, C.ring, sample_range) for _ in range(needed)]
        attempts += needed
        accepted, poles = partition_results([screen_point(matrices, s) for s in candidates])
        points.extend(accepted)
        rejected += len(poles)
    if len(points) <= count:
        logger.warning("Sample point budget exhausted", requested=count, found=len(points) - 1, rejected=rejected)
    logger.debug("Sample points chosen", count=len(points), rejected=rejected)
    return points


def map_points(fn: Callable[[Any], T], points: Sequence[Any], max_workers: int = 4) -> List[T]:
    """Apply fn per point on a thread pool; results keep point order"""
    if max_workers <= 1 or len(points) <= 1:
        return [fn(s) for s in points]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(fn, points))
