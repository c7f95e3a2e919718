"""
Seeded instance generators, quasi-isomorphism scramblers and fiber scans
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, field_validator

from .complexes import (
    ChainMap, FreeComplex, direct_sum, euler_characteristic, fiber_cohomology, generic_cohomology,
    inclusion, map_points, pole_free_points, projection
)
from .config import get_settings
from .exact_linalg import MatrixLocal
from .exceptions import CharTwo, InfeasibleRanks, NotPerfectOnCohomology
from .logging import logger, track_performance
from .models import CounterexampleReport, FiberReport, FiberRow
from .pairings import Pairing, symmetrize, transport, zero_pairing
from .scalars import BaseField, FieldKind, LocalRing, LocalScalar
from .specialization import SpecialComplex, theorem2_pipeline


class GenParams(BaseModel):
    """Generator parameters; the seed fixes every random choice"""
    n: int = Field(default=1, description="Odd twist n = 2m+1")
    max_rank: int = Field(default=2, ge=0, description="Upper bound for each rank K^0..K^m")
    degree_bound: int = Field(default=2, ge=0)
    coeff_bound: int = Field(default=3, ge=1)
    max_ops: int = Field(default=10, ge=0, description="Elementary operations per unimodular matrix")
    field: str = Field(default="Q")
    base_point: str = Field(default="0")
    seed: int = Field(default=0)
    require_nonzero_beta: bool = Field(default=False)

    @field_validator("n")
    @classmethod
    def validate_odd(cls, v: int) -> int:
        if v < 1 or v % 2 == 0:
            raise ValueError(f"n must be odd and positive, got {v}")
        return v

    @property
    def m(self) -> int:
        return (self.n - 1) // 2

    def ring(self) -> LocalRing:
        return LocalRing.at(BaseField.parse(self.field), self.base_point)

    @classmethod
    def from_settings(cls, **overrides: Any) -> GenParams:
        settings = get_settings()
        values = {
            "degree_bound": settings.degree_bound,
            "coeff_bound": max(settings.coefficient_bound, 1),
            "max_ops": settings.max_elementary_ops,
            "field": settings.default_field,
            "base_point": settings.default_base_point,
            "seed": settings.seed,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


# Named instances

def identity_complex(ring: LocalRing) -> FreeComplex:
    """F_ID: 0 -> O -1-> O -> 0"""
    return FreeComplex.build(ring, (1, 1), [[[1]]])


def split_pair_complex(ring: LocalRing) -> FreeComplex:
    """F_SP1: 0 -> O^2 -> O^2 -> 0 with d = [[0, pi], [-pi, 0]]"""
    pi = ring.pi
    return FreeComplex.build(ring, (2, 2), [[[ring.zero, pi], [-pi, ring.zero]]])


def counterexample_complex(ring: LocalRing) -> FreeComplex:
    """F_CE: 0 -> O -pi-> O -> 0"""
    return FreeComplex.build(ring, (1, 1), [[[ring.pi]]])


def contractible_summand(ring: LocalRing, length: int, degree: int) -> FreeComplex:
    """F_ID placed in degrees degree, degree + 1 of a complex of the given length"""
    ranks = [0] * (length + 1)
    ranks[degree] = ranks[degree + 1] = 1
    diffs = [MatrixLocal.zeros(ring, ranks[i + 1], ranks[i]) for i in range(length)]
    diffs[degree] = MatrixLocal.identity(ring, 1)
    return FreeComplex(ring, tuple(ranks), tuple(diffs))


# Random building blocks

def random_poly(ring: LocalRing, rng: random.Random, degree_bound: int, coeff_bound: int) -> LocalScalar:
    return ring.poly([rng.randint(-coeff_bound, coeff_bound) for _ in range(degree_bound + 1)])


def _random_unit_constant(ring: LocalRing, rng: random.Random, coeff_bound: int) -> LocalScalar:
    field = ring.field
    if field.kind is FieldKind.PRIME:
        return ring.scalar(rng.randrange(1, field.characteristic))
    return ring.scalar(rng.choice([-1, 1]) * rng.randint(1, coeff_bound))


def random_unimodular(
    ring: LocalRing,
    size: int,
    rng: random.Random,
    max_ops: int = 10,
    degree_bound: int = 2,
    coeff_bound: int = 3,
) -> Tuple[MatrixLocal, MatrixLocal]:
    """(g, g^-1) as a product of at most max_ops transvections and unit scalings"""
    g = [[ring.one if i == j else ring.zero for j in range(size)] for i in range(size)]
    g_inv = [row[:] for row in g]
    if size == 0:
        return MatrixLocal.zeros(ring, 0, 0), MatrixLocal.zeros(ring, 0, 0)
    for _ in range(rng.randint(0, max_ops)):
        if size > 1 and rng.random() < 0.75:
            i, j = rng.sample(range(size), 2)
            c = random_poly(ring, rng, degree_bound, coeff_bound)
            # row_i += c row_j on g, col_j -= c col_i on the inverse
            g[i] = [a + c * b for a, b in zip(g[i], g[j])]
            for row in g_inv:
                row[j] = row[j] - c * row[i]
        else:
            i = rng.randrange(size)
            u = _random_unit_constant(ring, rng, coeff_bound)
            g[i] = [u * a for a in g[i]]
            u_inv = ring.one / u
            for row in g_inv:
                row[i] = row[i] * u_inv
    return (
        MatrixLocal(ring, size, size, tuple(tuple(row) for row in g)),
        MatrixLocal(ring, size, size, tuple(tuple(row) for row in g_inv)),
    )


def _block_map(ring: LocalRing, rows: Tuple[int, int], cols: Tuple[int, int], block: MatrixLocal) -> MatrixLocal:
    """Map Z (+) W -> Z' (+) W' that is `block` from W to Z' and zero elsewhere"""
    return MatrixLocal.block(ring, list(rows), list(cols), {(0, 1): block})


def _random_matrix(ring: LocalRing, rng: random.Random, rows: int, cols: int, params: GenParams,
                   factor: Optional[LocalScalar] = None) -> MatrixLocal:
    return MatrixLocal.from_function(
        ring, rows, cols,
        lambda i, j: (factor or ring.one) * random_poly(ring, rng, params.degree_bound, params.coeff_bound)
    )


def _split_ranks(rng: random.Random, params: GenParams, length: int) -> List[Tuple[int, int]]:
    """(z_p, w_p) with z_p + w_p <= max_rank per degree"""
    splits = []
    for _ in range(length + 1):
        r = rng.randint(0, params.max_rank)
        z = rng.randint(0, r)
        splits.append((z, r - z))
    return splits


# Generators

@track_performance("gen_special")
def gen_special_complex(params: GenParams) -> SpecialComplex:
    """Random special complex; every differential vanishes at s0"""
    ring = params.ring()
    rng = random.Random(params.seed)
    m = params.m
    if params.require_nonzero_beta and params.max_rank < 2:
        raise InfeasibleRanks(f"a nonzero alternating beta needs rank >= 2 in degree {m}, "
                              f"max_rank is {params.max_rank}")
    splits = _split_ranks(rng, params, m)
    if params.require_nonzero_beta and splits[m][1] < 2:
        z = rng.randint(0, params.max_rank - 2)
        splits[m] = (z, params.max_rank - z)

    pi = ring.pi
    alphas = []
    for p in range(m):
        (z0, w0), (z1, w1) = splits[p], splits[p + 1]
        block = _random_matrix(ring, rng, z1, w0, params, pi)
        alphas.append(_block_map(ring, (z1, w1), (z0, w0), block))

    z_m, w_m = splits[m]
    X = _random_matrix(ring, rng, w_m, w_m, params)
    skew = (X - X.T).scale(pi)
    if params.require_nonzero_beta and skew.is_zero():
        bump = MatrixLocal.from_function(
            ring, w_m, w_m, lambda i, j: pi if (i, j) == (0, 1) else (-pi if (i, j) == (1, 0) else ring.zero)
        )
        skew = skew + bump
    beta = MatrixLocal.block(ring, [z_m, w_m], [z_m, w_m], {(1, 1): skew})

    # Congruence by random unimodular bases in each lower degree
    ranks = [z + w for z, w in splits]
    changes = [random_unimodular(ring, r, rng, params.max_ops, params.degree_bound, params.coeff_bound)
               for r in ranks]
    alphas = [changes[p + 1][0] @ alphas[p] @ changes[p][1] for p in range(m)]
    g_inv = changes[m][1]
    beta = g_inv.T @ beta @ g_inv

    lower = FreeComplex(ring, tuple(ranks), tuple(alphas))
    special = SpecialComplex(m, lower, beta).validate()
    logger.debug("Generated special complex", seed=params.seed, ranks=list(special.full().ranks))
    return special


def gen_special(params: GenParams) -> Tuple[FreeComplex, Pairing]:
    """Special complex with its tautological pairing"""
    special = gen_special_complex(params)
    if not special.ring.field.two_is_unit:
        raise CharTwo("gen_special pairing")
    return special.full(), special.pairing()


@track_performance("gen_complex")
def gen_complex(params: GenParams) -> FreeComplex:
    """Random complex of length n, not necessarily self-dual, with unit entries"""
    ring = params.ring()
    rng = random.Random(params.seed)
    n = params.n
    splits = _split_ranks(rng, params, n)
    diffs = []
    for p in range(n):
        (z0, w0), (z1, w1) = splits[p], splits[p + 1]
        diffs.append(_block_map(ring, (z1, w1), (z0, w0), _random_matrix(ring, rng, z1, w0, params)))
    ranks = [z + w for z, w in splits]
    changes = [random_unimodular(ring, r, rng, params.max_ops, params.degree_bound, params.coeff_bound)
               for r in ranks]
    diffs = [changes[p + 1][0] @ diffs[p] @ changes[p][1] for p in range(n)]
    return FreeComplex(ring, tuple(ranks), tuple(diffs))


# Scrambling

@dataclass(frozen=True)
class ScrambleResult:
    """witness: original -> complex; retraction: complex -> original"""
    complex: FreeComplex
    pairing: Pairing
    witness: ChainMap
    retraction: ChainMap


def scramble(
    C: FreeComplex,
    P: Pairing,
    seed: int,
    max_summands: Optional[int] = None,
    max_ops: int = 10,
    degree_bound: int = 2,
    coeff_bound: int = 3,
) -> ScrambleResult:
    """Insert contractible summands, change bases, transport the pairing"""
    if max_summands is None:
        max_summands = get_settings().max_summands
    ring = C.ring
    rng = random.Random(seed)
    n = C.length
    summands = FreeComplex.zero(ring, n)
    if n > 0:
        for _ in range(rng.randint(0, max_summands)):
            summands = direct_sum(summands, contractible_summand(ring, n, rng.randrange(n)))
    inc = inclusion(C, summands)
    proj = projection(C, summands)
    S = inc.target

    changes = [random_unimodular(ring, r, rng, max_ops, degree_bound, coeff_bound) for r in S.ranks]
    diffs = tuple(changes[p + 1][0] @ S.diffs[p] @ changes[p][1] for p in range(n))
    scrambled = FreeComplex(ring, S.ranks, diffs)
    forward = ChainMap(S, scrambled, tuple(g for g, _ in changes))
    backward = ChainMap(scrambled, S, tuple(g_inv for _, g_inv in changes))

    witness = forward.compose(inc)
    retraction = proj.compose(backward)
    logger.debug("Scrambled complex", seed=seed, ranks=list(scrambled.ranks))
    return ScrambleResult(scrambled, transport(P, retraction), witness, retraction)


# Fiber scans

@track_performance("fiber_scan")
def fiber_scan(C: FreeComplex, points: Sequence[Any], max_workers: int = 4) -> FiberReport:
    """dim H^i, psi and parity per point, with jumps over the generic dimensions"""
    generic = generic_cohomology(C)
    field = C.ring.field

    def row(s: Any) -> FiberRow:
        dims = fiber_cohomology(C, s)
        psi = sum(d for i, d in enumerate(dims) if i % 2 == 0)
        return FiberRow(
            point=field.format(field.element(s)),
            dims=dims,
            psi=psi,
            parity=psi % 2,
            jumps=[i for i, (d, g) in enumerate(zip(dims, generic)) if d > g],
        )

    return FiberReport(
        field=field.label,
        base_point=C.ring.base_point_label,
        generic_dims=generic,
        euler_characteristic=euler_characteristic(C),
        rows=map_points(row, list(points), max_workers),
    )


def default_points(C: FreeComplex, samples: Optional[int] = None, seed: Optional[int] = None,
                   extra: Sequence[MatrixLocal] = ()) -> List[Any]:
    settings = get_settings()
    return pole_free_points(
        C,
        settings.samples if samples is None else samples,
        settings.seed if seed is None else seed,
        extra=extra,
        sample_range=settings.sample_range,
        max_attempts=settings.max_sample_attempts,
    )


def counterexample_demo(samples: int = 20, seed: int = 0, max_workers: int = 4) -> CounterexampleReport:
    """F_CE parity jump, the characteristic-2 failure and the degenerate-duality failure"""
    ring = LocalRing.rationals()
    ce = counterexample_complex(ring)
    scan = fiber_scan(ce, pole_free_points(ce, samples, seed), max_workers)

    try:
        symmetrize(zero_pairing(split_pair_complex(LocalRing.prime(2)), 0))
        char_two = "no error"
    except CharTwo as e:
        char_two = e.code

    try:
        candidate = Pairing.from_components(ce, 0, [MatrixLocal.identity(ring, 1),
                                                    MatrixLocal.identity(ring, 1).scale(-1)])
        theorem2_pipeline(ce, candidate, verify_quasi_iso=False)
        duality = "no error"
    except NotPerfectOnCohomology as e:
        duality = e.code

    return CounterexampleReport(fiber=scan, char_two_error=char_two, cohomology_error=duality)
