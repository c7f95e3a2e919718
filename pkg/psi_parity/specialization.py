"""
Minimal complexes at s0, special complexes with alternating middle differential,
and the pipeline that turns a self-dual complex into a special one
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence, Tuple

from .complexes import (
    ChainMap, FreeComplex, Homotopy, fiber_cohomology, is_quasi_iso, map_points, screen_point, semi_euler,
    validate
)
from .documents import objects_to_document
from .exact_linalg import MatrixLocal, is_skew, rank_at, smith_normal_form
from .exceptions import (
    InternalInvariantError, NotAChainMap, NotPerfect, ShapeMismatch, SkewnessViolation
)
from .functional_types import partition_results
from .logging import logger, track_performance
from .models import PipelineReport, PointCheck
from .pairings import (
    Pairing, check_chain, check_perfection_on_cohomology, check_symmetry, perfection_at_point,
    symmetrize, symmetry_kind, tautological_pairing, transport
)
from .scalars import LocalRing


# Normalization

@dataclass(frozen=True)
class NormalizationResult:
    """minimal is homotopy equivalent to the input; homotopy witnesses id - to o from"""
    minimal: FreeComplex
    to_original: ChainMap
    from_original: ChainMap
    homotopy: Homotopy
    split_count: Tuple[int, ...]

    @property
    def total_splits(self) -> int:
        return sum(self.split_count)


def _find_unit_pivot(C: FreeComplex) -> Optional[Tuple[int, int, int]]:
    """Lowest degree, then first unit entry in row-major order"""
    for k, d in enumerate(C.diffs):
        for r, row in enumerate(d.entries):
            for c, entry in enumerate(row):
                if entry and entry.is_unit():
                    return k, r, c
    return None


def _cancel(C: FreeComplex, k: int, r: int, c: int) -> Tuple[FreeComplex, ChainMap, ChainMap, Homotopy]:
    """Split off the contractible summand O -> O carried by the unit d^k[r, c]"""
    ring = C.ring
    d = C.diffs[k]
    inverse = ring.one / d[r, c]
    keep_source = [j for j in range(C.ranks[k]) if j != c]
    keep_target = [j for j in range(C.ranks[k + 1]) if j != r]

    delta = d.submatrix([r], keep_source)
    gamma = d.submatrix(keep_target, [c])
    reduced = d.submatrix(keep_target, keep_source) - (gamma @ delta).scale(inverse)

    ranks = list(C.ranks)
    ranks[k] -= 1
    ranks[k + 1] -= 1
    diffs = list(C.diffs)
    diffs[k] = reduced
    if k > 0:
        diffs[k - 1] = C.diffs[k - 1].submatrix(keep_source, range(C.ranks[k - 1]))
    if k + 1 < C.length:
        diffs[k + 1] = C.diffs[k + 1].submatrix(range(C.ranks[k + 2]), keep_target)
    M = FreeComplex(ring, tuple(ranks), tuple(diffs))

    from_components = [MatrixLocal.identity(ring, size) for size in C.ranks]
    to_components = [MatrixLocal.identity(ring, size) for size in C.ranks]
    from_components[k] = MatrixLocal.from_function(
        ring, ranks[k], C.ranks[k], lambda a, j: ring.one if j == keep_source[a] else ring.zero
    )
    from_components[k + 1] = MatrixLocal.from_function(
        ring, ranks[k + 1], C.ranks[k + 1],
        lambda a, j: ring.one if j == keep_target[a] else (-gamma[a, 0] * inverse if j == r else ring.zero)
    )
    to_components[k] = MatrixLocal.from_function(
        ring, C.ranks[k], ranks[k],
        lambda i, b: ring.one if i == keep_source[b] else (-inverse * delta[0, b] if i == c else ring.zero)
    )
    to_components[k + 1] = MatrixLocal.from_function(
        ring, C.ranks[k + 1], ranks[k + 1], lambda i, b: ring.one if i == keep_target[b] else ring.zero
    )

    h = list(Homotopy.zero(C, C).components)
    h[k + 1] = MatrixLocal.from_function(
        ring, C.ranks[k], C.ranks[k + 1], lambda i, j: inverse if (i, j) == (c, r) else ring.zero
    )
    return (
        M,
        ChainMap(C, M, tuple(from_components)),
        ChainMap(M, C, tuple(to_components)),
        Homotopy(C, C, tuple(h)),
    )


@track_performance("normalize")
def normalize_at_point(C: FreeComplex) -> NormalizationResult:
    """Cancel unit entries until every differential vanishes at s0"""
    validate(C)
    current = C
    from_original = ChainMap.identity(C)
    to_original = ChainMap.identity(C)
    homotopy = Homotopy.zero(C, C)
    splits = [0] * max(C.length, 0)

    while (pivot := _find_unit_pivot(current)) is not None:
        k, r, c = pivot
        M, p, i, h = _cancel(current, k, r, c)
        homotopy = homotopy + h.conjugate(to_original, from_original)
        from_original = p.compose(from_original)
        to_original = to_original.compose(i)
        current = M
        splits[k] += 1
        logger.debug("Split contractible summand", degree=k, row=r, col=c, ranks=list(current.ranks))

    result = NormalizationResult(current, to_original, from_original, homotopy, tuple(splits))
    _verify_normalization(C, result)
    return result


def _verify_normalization(C: FreeComplex, result: NormalizationResult) -> None:
    M = result.minimal
    if not all(d.vanishes_at_base_point() for d in M.diffs):
        raise InternalInvariantError("minimality", "a differential of the minimal complex is nonzero at s0")
    try:
        validate(M)
        result.to_original.validate()
        result.from_original.validate()
    except NotAChainMap as e:
        raise InternalInvariantError("normalization maps", e.message) from e
    if result.from_original.compose(result.to_original) != ChainMap.identity(M):
        raise InternalInvariantError("retraction", "from_original o to_original is not the identity")
    if not result.homotopy.witnesses(ChainMap.identity(C), result.to_original.compose(result.from_original)):
        raise InternalInvariantError("homotopy", "stored homotopy does not witness id - to o from")


# Special complexes

@dataclass(frozen=True, eq=False)
class SpecialComplex:
    """K^0 -> ... -> K^m -beta-> dual(K^m) -> ... -> dual(K^0) with beta alternating"""
    m: int
    lower: FreeComplex
    beta: MatrixLocal

    def __post_init__(self) -> None:
        if self.lower.length != self.m:
            raise ShapeMismatch("special complex", f"lower half has length {self.lower.length}, m={self.m}")
        size = self.lower.ranks[self.m]
        if self.beta.shape != (size, size):
            raise ShapeMismatch("special complex", f"beta has shape {self.beta.shape}, expected {(size, size)}")

    @property
    def n(self) -> int:
        return 2 * self.m + 1

    @property
    def ring(self) -> LocalRing:
        return self.lower.ring

    @property
    def alphas(self) -> Tuple[MatrixLocal, ...]:
        return self.lower.diffs

    def full(self) -> FreeComplex:
        n, m = self.n, self.m
        ranks = self.lower.ranks + tuple(reversed(self.lower.ranks))
        diffs = []
        for p in range(n):
            if p < m:
                diffs.append(self.alphas[p])
            elif p == m:
                diffs.append(self.beta)
            else:
                diffs.append(self.alphas[n - p - 1].T.scale((-1) ** (p + 1)))
        return FreeComplex(self.ring, ranks, tuple(diffs))

    def validate(self) -> SpecialComplex:
        if not is_skew(self.beta):
            raise SkewnessViolation(self.m)
        validate(self.full())
        return self

    def even_rank_sum(self) -> int:
        return sum(r for i, r in enumerate(self.full().ranks) if i % 2 == 0)

    def pairing(self) -> Pairing:
        return tautological_pairing(self.full(), self.m)


def lemma3_specialize(C: FreeComplex, P: Pairing) -> Tuple[SpecialComplex, ChainMap]:
    """Rewrite the upper half through R_p; beta = R_{m+1} d^m"""
    if P.host != C:
        raise ShapeMismatch("specialize", "pairing is not defined on this complex")
    check_chain(P)
    check_symmetry(P)
    perfection_at_point(P, C.ring.base_point)
    m, n = P.m, P.n
    beta = P.components[m + 1] @ C.diffs[m]
    if not is_skew(beta):
        raise SkewnessViolation(m)
    lower = FreeComplex(C.ring, C.ranks[:m + 1], C.diffs[:m])
    special = SpecialComplex(m, lower, beta)
    full = special.full()
    iso = ChainMap(C, full, tuple(
        MatrixLocal.identity(C.ring, C.ranks[p]) if p <= m else P.components[p] for p in range(n + 1)
    ))
    try:
        iso.validate()
    except NotAChainMap as e:
        raise InternalInvariantError("specialization iso", e.message) from e
    logger.debug("Specialized", m=m, beta_size=beta.rows)
    return special, iso


def psi_via_formula(S: SpecialComplex, point: Any) -> int:
    """sum of even ranks - rank beta(s) - sum_{i<m} (rank alpha^i(s) + rank alpha^i(s)^T)"""
    total = S.even_rank_sum() - rank_at(S.beta, point)
    for alpha in S.alphas:
        total -= rank_at(alpha, point) + rank_at(alpha.T, point)
    return total


# Pipeline

@dataclass(frozen=True)
class PipelineOutcome:
    special: SpecialComplex
    report: PipelineReport
    normalization: NormalizationResult
    pairing: Pairing
    iso: ChainMap
    composite: ChainMap


@track_performance("pipeline")
def theorem2_pipeline(
    K: FreeComplex,
    P0: Pairing,
    points: Sequence[Any] = (),
    max_workers: int = 4,
    verify_quasi_iso: bool = True,
) -> PipelineOutcome:
    """symmetrize, check duality on cohomology, normalize, transport, specialize"""
    validate(K)
    if P0.host != K:
        raise ShapeMismatch("pipeline", "pairing is not defined on this complex")
    check_chain(P0)
    s0 = K.ring.base_point

    P = symmetrize(P0)
    logger.info("Pairing symmetrized", n=P.n, m=P.m)
    check_perfection_on_cohomology(P, s0)

    normalization = normalize_at_point(K)
    logger.info("Complex normalized", ranks=list(normalization.minimal.ranks),
                splits=list(normalization.split_count))
    Q = transport(P, normalization.to_original)
    try:
        perfection_at_point(Q, s0)
    except NotPerfect as e:
        raise InternalInvariantError("perfection after normalization", e.message) from e

    special, iso = lemma3_specialize(normalization.minimal, Q)
    composite = iso.compose(normalization.from_original)
    try:
        composite.validate()
        composite_ok = True
    except NotAChainMap:
        composite_ok = False
    quasi_iso = is_quasi_iso(composite) if verify_quasi_iso else None

    full = special.full()
    field = K.ring.field
    candidates = [s0] + [s for s in map(field.element, points) if s != s0]
    # normalization divides by units of O, which may add poles away from s0
    regular = list(K.diffs) + list(full.diffs) + list(Q.components)
    sample, poles = partition_results([screen_point(regular, s) for s in candidates])
    dropped = [e.details["point"] for e in poles]
    if dropped:
        logger.info("Sample points dropped", points=dropped, reason="pole of the special complex")

    def check_point(s: Any) -> PointCheck:
        dims_input = fiber_cohomology(K, s)
        dims_special = fiber_cohomology(full, s)
        psi_input = semi_euler(K, s)
        return PointCheck(
            point=field.format(s),
            psi_input=psi_input,
            psi_special=semi_euler(full, s),
            psi_formula=psi_via_formula(special, s),
            parity=psi_input % 2,
            dims_agree=dims_input == dims_special,
        )

    checks = map_points(check_point, sample, max_workers)
    beta_exponents = list(smith_normal_form(special.beta).exponents)
    report = PipelineReport(
        field=field.label,
        base_point=K.ring.base_point_label,
        n=P.n,
        m=P.m,
        symmetry_kind=symmetry_kind(P.n),
        input_ranks=list(K.ranks),
        minimal_ranks=list(normalization.minimal.ranks),
        split_count=list(normalization.split_count),
        beta=special.beta.to_strings(),
        beta_exponents=beta_exponents,
        beta_skew=is_skew(special.beta),
        composite_is_chain_map=composite_ok,
        composite_is_quasi_iso=quasi_iso,
        special=objects_to_document(full, special.pairing()),
        checks=checks,
        dropped_points=dropped,
    )
    logger.info("Pipeline finished", parity_constant=report.parity_constant, points=len(checks),
                beta_exponents=beta_exponents)
    return PipelineOutcome(special, report, normalization, Q, iso, composite)
