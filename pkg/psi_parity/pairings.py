"""
Duality pairings gamma: L (x) L -> O(-n) stored as their adjoints R_p: L^p -> dual(L^{n-p})

R_p has shape r_{n-p} x r_p and gamma(a (x) b) = b^T R_p a for a in L^p, b in L^{n-p}.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, List, Sequence, Tuple

from .complexes import (
    ChainMap, FreeComplex, cocycle_basis, direct_sum, dual_twist, tensor_basis
)
from .exact_linalg import FieldMatrix, MatrixLocal, field_rank
from .exceptions import (
    CharTwo, NotChainCompatible, NotPerfect, NotPerfectOnCohomology, NotSymmetric, ShapeMismatch
)
from .logging import logger, track_performance
from .scalars import LocalRing


def symmetry_sign(n: int, m: int, p: int) -> int:
    """Sign in R_p = sign * R_{n-p}^T"""
    return (-1) ** (p * (n - p) + m)


def symmetry_kind(n: int) -> str:
    """'symmetric' when n = 1 mod 4, 'skew' when n = 3 mod 4"""
    if n % 2 == 0:
        raise ShapeMismatch("symmetry kind", f"twist {n} is not odd")
    return "symmetric" if n % 4 == 1 else "skew"


@dataclass(frozen=True, eq=False)
class Pairing:
    host: FreeComplex
    n: int
    m: int
    components: Tuple[MatrixLocal, ...]
    symmetry_verified: bool = False

    def __post_init__(self) -> None:
        if self.n != 2 * self.m + 1:
            raise ShapeMismatch("pairing", f"twist {self.n} is not 2m+1 for m={self.m}")
        if self.host.length != self.n:
            raise ShapeMismatch("pairing", f"host has length {self.host.length}, twist is {self.n}")
        if len(self.components) != self.n + 1:
            raise ShapeMismatch("pairing", f"expected {self.n + 1} components, got {len(self.components)}")
        for p, R in enumerate(self.components):
            expected = (self.host.ranks[self.n - p], self.host.ranks[p])
            if R.shape != expected:
                raise ShapeMismatch("pairing", f"R_{p} has shape {R.shape}, expected {expected}")

    @classmethod
    def from_components(cls, host: FreeComplex, m: int, components: Sequence[MatrixLocal]) -> Pairing:
        return cls(host, 2 * m + 1, m, tuple(components))

    @property
    def ring(self) -> LocalRing:
        return self.host.ring

    def component(self, p: int) -> MatrixLocal:
        return self.components[p]

    def as_chain_map(self) -> ChainMap:
        """R as a map L -> dual_twist(L, n)"""
        return ChainMap(self.host, dual_twist(self.host, self.n), self.components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pairing):
            return NotImplemented
        return (self.host == other.host and self.n == other.n and self.m == other.m
                and self.components == other.components)

    __hash__ = None  # type: ignore[assignment]


def tautological_pairing(C: FreeComplex, m: int) -> Pairing:
    """R_p = I for p <= m and (-1)^m I above, on a complex with r_p = r_{n-p}"""
    n = 2 * m + 1
    C = C.padded(n)
    for p in range(n + 1):
        if C.ranks[p] != C.ranks[n - p]:
            raise ShapeMismatch("tautological pairing", f"rank {C.ranks[p]} in degree {p} does not match "
                                                        f"rank {C.ranks[n - p]} in degree {n - p}")
    sign = (-1) ** m
    return Pairing(C, n, m, tuple(
        MatrixLocal.identity(C.ring, r) if p <= m else MatrixLocal.identity(C.ring, r).scale(sign)
        for p, r in enumerate(C.ranks)
    ))


def zero_pairing(C: FreeComplex, m: int) -> Pairing:
    n = 2 * m + 1
    C = C.padded(n)
    return Pairing(C, n, m, tuple(
        MatrixLocal.zeros(C.ring, C.ranks[n - p], C.ranks[p]) for p in range(n + 1)
    ))


def direct_sum_pairing(P: Pairing, Q: Pairing) -> Pairing:
    """Orthogonal sum on host(P) (+) host(Q)"""
    if P.n != Q.n:
        raise ShapeMismatch("pairing sum", f"twists {P.n} and {Q.n} differ")
    host = direct_sum(P.host, Q.host)
    return Pairing(host, P.n, P.m, tuple(
        MatrixLocal.block_diagonal(P.ring, [a, b]) for a, b in zip(P.components, Q.components)
    ), P.symmetry_verified and Q.symmetry_verified)


def check_chain(P: Pairing) -> Pairing:
    """R_{p+1} d^p = (-1)^{p+1} (d^{n-p-1})^T R_p for p = 0..n-1"""
    L, n = P.host, P.n
    for p in range(n):
        left = P.components[p + 1] @ L.diffs[p]
        right = (L.diffs[n - p - 1].T @ P.components[p]).scale((-1) ** (p + 1))
        if left != right:
            raise NotChainCompatible(p)
    return P


def check_symmetry(P: Pairing) -> Pairing:
    """gamma o tau = (-1)^m gamma, checked componentwise"""
    for p in range(P.n + 1):
        expected = P.components[P.n - p].T.scale(symmetry_sign(P.n, P.m, p))
        if P.components[p] != expected:
            raise NotSymmetric(p)
    return replace(P, symmetry_verified=True)


@track_performance("symmetrize")
def symmetrize(P: Pairing) -> Pairing:
    """(gamma + (-1)^m gamma o tau) / 2"""
    if not P.ring.field.two_is_unit:
        raise CharTwo("symmetrize")
    check_chain(P)
    half = P.ring.one / 2
    components = tuple(
        (P.components[p] + P.components[P.n - p].T.scale(symmetry_sign(P.n, P.m, p))).scale(half)
        for p in range(P.n + 1)
    )
    return check_symmetry(replace(P, components=components))


def transport(P: Pairing, h: ChainMap) -> Pairing:
    """Pull back along h: M -> L, so that gamma_M = gamma_L o (h (x) h)"""
    if h.target != P.host:
        raise ShapeMismatch("transport", "chain map does not land in the pairing's host")
    n = P.n
    return Pairing(h.source, n, P.m, tuple(
        h.components[n - p].T @ P.components[p] @ h.components[p] for p in range(n + 1)
    ), P.symmetry_verified)


def perfection_at_point(P: Pairing, point: Any) -> Pairing:
    """Every R_p(s) is an invertible square matrix over k"""
    field = P.ring.field
    label = field.format(field.element(point))
    for p, R in enumerate(P.components):
        if not R.is_square():
            raise NotPerfect(p, label, f"component is {R.rows}x{R.cols}")
        if R.rows and field_rank(R.evaluate(point), R.cols, field) < R.rows:
            raise NotPerfect(p, label)
    return P


@dataclass(frozen=True)
class CohomologyPairing:
    """u_i on H^i(s) (x) H^{n-i}(s); u_i has shape dim H^{n-i} x dim H^i"""
    point: Any
    dimensions: Tuple[int, ...]
    matrices: Tuple[FieldMatrix, ...]

    def shape(self, i: int) -> Tuple[int, int]:
        n = len(self.dimensions) - 1
        return self.dimensions[n - i], self.dimensions[i]


@track_performance("cohomology_pairing")
def cohomology_pairing(P: Pairing, point: Any) -> CohomologyPairing:
    """Induced pairings on fiber cohomology in the cocycle bases of `cocycle_basis`"""
    check_chain(P)
    field = P.ring.field
    zero = field.domain.zero
    bases = [cocycle_basis(P.host, i, point) for i in range(P.n + 1)]
    matrices = []
    for i in range(P.n + 1):
        R = P.components[i].evaluate(point)
        left, right = bases[P.n - i].representatives, bases[i].representatives
        u = []
        for y in left:
            row = []
            for z in right:
                acc = zero
                for a, R_row in zip(y, R):
                    if a:
                        for b, x in zip(R_row, z):
                            acc += a * b * x
                row.append(acc)
            u.append(row)
        matrices.append(u)
    return CohomologyPairing(point, tuple(b.dimension for b in bases), tuple(matrices))


def check_perfection_on_cohomology(P: Pairing, point: Any) -> Pairing:
    field = P.ring.field
    label = field.format(field.element(point))
    u = cohomology_pairing(P, point)
    for i, matrix in enumerate(u.matrices):
        rows, cols = u.shape(i)
        if rows != cols or (rows and field_rank(matrix, cols, field) < rows):
            logger.debug("Cohomology pairing degenerate", degree=i, point=label, rows=rows, cols=cols)
            raise NotPerfectOnCohomology(i, label)
    return P


def pairing_functional(P: Pairing) -> MatrixLocal:
    """gamma on degree n of tensor(L, L) as a 1 x rank row"""
    L = P.host
    basis = tensor_basis(L, L, P.n)
    return MatrixLocal.build(P.ring, [[P.components[i][b, a] for i, _, a, b in basis]], 1, len(basis))


def swapped_functional(P: Pairing) -> MatrixLocal:
    """gamma o tau on degree n of tensor(L, L)"""
    L = P.host
    basis = tensor_basis(L, L, P.n)
    row: List[Any] = []
    for i, j, a, b in basis:
        value = P.components[j][a, b]
        row.append(value if (i * j) % 2 == 0 else -value)
    return MatrixLocal.build(P.ring, [row], 1, len(basis))


def is_symmetric_on_tensor(P: Pairing) -> bool:
    """gamma o tau == (-1)^m gamma on every basis vector of tensor(L, L)"""
    return swapped_functional(P) == pairing_functional(P).scale((-1) ** P.m)
