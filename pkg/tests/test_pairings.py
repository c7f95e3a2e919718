"""
Tests for duality pairings, symmetry and perfection
"""
import pytest

from psi_parity.complexes import ChainMap, FreeComplex, dual_twist, induced_cohomology_map
from psi_parity.exact_linalg import MatrixLocal, invert_unit
from psi_parity.exceptions import (
    CharTwo, NotChainCompatible, NotPerfect, NotPerfectOnCohomology, NotSymmetric, ShapeMismatch
)
from psi_parity.lab import GenParams, gen_special, scramble, split_pair_complex
from psi_parity.pairings import (
    Pairing, check_chain, check_perfection_on_cohomology, check_symmetry, cohomology_pairing,
    direct_sum_pairing, is_symmetric_on_tensor, pairing_functional, perfection_at_point,
    swapped_functional, symmetrize, symmetry_kind, symmetry_sign, tautological_pairing, transport,
    zero_pairing
)
from psi_parity.scalars import LocalRing


@pytest.fixture
def antisymmetric_candidate(f_ce, Q):
    """Chain compatible on F_CE but with gamma o tau = -gamma"""
    return Pairing.from_components(f_ce, 0, [MatrixLocal.identity(Q, 1), MatrixLocal.identity(Q, 1).scale(-1)])


def test_symmetry_kind():
    """Test the duality type by twist"""
    assert symmetry_kind(1) == "symmetric"
    assert symmetry_kind(3) == "skew"
    assert symmetry_kind(5) == "symmetric"
    with pytest.raises(ShapeMismatch):
        symmetry_kind(2)


def test_symmetry_sign():
    """Test the componentwise symmetry sign"""
    assert symmetry_sign(1, 0, 0) == 1
    assert symmetry_sign(3, 1, 0) == -1
    assert symmetry_sign(3, 1, 1) == -1


@pytest.mark.parametrize("m", range(5))
def test_symmetry_sign_depends_only_on_m(m):
    """Test p(n-p) is even for odd n, so every degree carries (-1)^m"""
    n = 2 * m + 1
    assert {symmetry_sign(n, m, p) for p in range(n + 1)} == {(-1) ** m}


def test_tautological_pairing_on_split_pair(f_sp1_pairing):
    """Test F_SP1 with its tautological pairing is chain compatible and symmetric"""
    check_chain(f_sp1_pairing)
    verified = check_symmetry(f_sp1_pairing)
    assert verified.symmetry_verified
    assert not f_sp1_pairing.symmetry_verified
    assert is_symmetric_on_tensor(f_sp1_pairing)
    perfection_at_point(f_sp1_pairing, 0)


def test_pairing_as_chain_map(f_sp1_pairing):
    """Test R is a chain map into the twisted dual"""
    f = f_sp1_pairing.as_chain_map()
    assert f.target == dual_twist(f_sp1_pairing.host, 1)
    f.validate()


def test_identity_complex_has_no_tautological_chain_pairing(f_id):
    """Test the identity pairing on O -1-> O fails the chain condition"""
    with pytest.raises(NotChainCompatible) as exc_info:
        check_chain(tautological_pairing(f_id, 0))
    assert exc_info.value.details["degree"] == 0
    check_chain(zero_pairing(f_id, 0))


def test_chain_condition_failure(f_sp1, Q):
    """Test NotChainCompatible for a rescaled component"""
    P = Pairing.from_components(f_sp1, 0, [MatrixLocal.identity(Q, 2), MatrixLocal.diagonal(Q, [1, 2])])
    with pytest.raises(NotChainCompatible):
        check_chain(P)


def test_symmetry_failure(antisymmetric_candidate):
    """Test NotSymmetric at degree 0"""
    check_chain(antisymmetric_candidate)
    with pytest.raises(NotSymmetric) as exc_info:
        check_symmetry(antisymmetric_candidate)
    assert exc_info.value.details["degree"] == 0
    assert not is_symmetric_on_tensor(antisymmetric_candidate)


def test_functionals_agree_up_to_sign(f_sp1_pairing):
    """Test gamma o tau = (-1)^m gamma through the tensor product"""
    gamma = pairing_functional(f_sp1_pairing)
    assert gamma.shape == (1, 8)
    assert swapped_functional(f_sp1_pairing) == gamma


def test_symmetrize_degenerate(antisymmetric_candidate):
    """Test symmetrizing an antisymmetric pairing leaves zero, which fails on cohomology"""
    P = symmetrize(antisymmetric_candidate)
    assert P.symmetry_verified
    assert all(R.is_zero() for R in P.components)
    with pytest.raises(NotPerfectOnCohomology) as exc_info:
        check_perfection_on_cohomology(P, 0)
    assert exc_info.value.exit_code == 4


def test_symmetrize_is_idempotent_on_symmetric(f_sp1_pairing):
    """Test symmetric pairings are fixed by symmetrize"""
    assert symmetrize(f_sp1_pairing) == f_sp1_pairing


def test_symmetrize_char_two():
    """Test symmetrize over F_2 raises CharTwo"""
    F2 = LocalRing.prime(2)
    P = tautological_pairing(split_pair_complex(F2), 0)
    with pytest.raises(CharTwo) as exc_info:
        symmetrize(P)
    assert exc_info.value.message.startswith("CharTwo")


def test_perfection_at_point(f_sp1, f_sp1_pairing):
    """Test NotPerfect on the zero pairing"""
    with pytest.raises(NotPerfect):
        perfection_at_point(zero_pairing(f_sp1, 0), 0)
    perfection_at_point(f_sp1_pairing, 3)


def test_cohomology_pairing(f_sp1_pairing):
    """Test the induced pairing on H(s0) is the identity and vanishes generically"""
    field = f_sp1_pairing.ring.field
    one, zero = field.domain.one, field.domain.zero
    u = cohomology_pairing(f_sp1_pairing, 0)
    assert u.dimensions == (2, 2)
    assert u.matrices[0] == [[one, zero], [zero, one]]
    assert u.shape(0) == (2, 2)
    check_perfection_on_cohomology(f_sp1_pairing, 0)
    assert cohomology_pairing(f_sp1_pairing, 1).dimensions == (0, 0)
    check_perfection_on_cohomology(f_sp1_pairing, 1)


def test_transport_along_identity(f_sp1_pairing):
    """Test transport along the identity is the identity"""
    assert transport(f_sp1_pairing, ChainMap.identity(f_sp1_pairing.host)) == f_sp1_pairing


def test_transport_along_basis_change(f_sp1, f_sp1_pairing, Q):
    """Test a transported pairing stays chain compatible and symmetric"""
    g = MatrixLocal.build(Q, [[1, "t+1"], [0, 2]])
    h_inv = MatrixLocal.build(Q, [[1, 0], ["t", 1]])
    M = FreeComplex(Q, (2, 2), (g @ f_sp1.diffs[0] @ h_inv,))
    h = ChainMap(M, f_sp1, (h_inv, invert_unit(g))).validate()
    P = transport(f_sp1_pairing, h)
    check_chain(P)
    check_symmetry(P)
    perfection_at_point(P, 0)
    check_perfection_on_cohomology(P, 0)


def test_transport_target_mismatch(f_sp1_pairing, f_ce):
    """Test transport requires a map into the host"""
    with pytest.raises(ShapeMismatch):
        transport(f_sp1_pairing, ChainMap.identity(f_ce))


def test_direct_sum_pairing(f_sp1_pairing):
    """Test orthogonal sums of symmetric pairings"""
    P = direct_sum_pairing(f_sp1_pairing, f_sp1_pairing)
    assert P.host.ranks == (4, 4)
    check_chain(P)
    check_symmetry(P)


def test_pairing_shape_validation(f_sp1, Q):
    """Test component shapes and twist are checked"""
    with pytest.raises(ShapeMismatch):
        Pairing(f_sp1, 3, 1, ())
    with pytest.raises(ShapeMismatch):
        Pairing.from_components(f_sp1, 0, [MatrixLocal.identity(Q, 2), MatrixLocal.identity(Q, 1)])


def test_symmetrize_is_idempotent_on_non_symmetric(f_sp1, Q):
    """Test R = [[1, 1], [-1, 1]] on F_SP1 is chain compatible, not symmetric, and symmetrizes once"""
    X = MatrixLocal.build(Q, [[1, 1], [-1, 1]])
    P = Pairing.from_components(f_sp1, 0, [X, X])
    check_chain(P)
    with pytest.raises(NotSymmetric):
        check_symmetry(P)
    once = symmetrize(P)
    assert once.components == (MatrixLocal.identity(Q, 2), MatrixLocal.identity(Q, 2))
    assert symmetrize(once) == once


def scaled_identity(C, c):
    return ChainMap(C, C, tuple(MatrixLocal.identity(C.ring, r).scale(c) for r in C.ranks)).validate()


@pytest.mark.parametrize("seed", range(4))
def test_transport_along_chain_map_keeps_structure(seed):
    """Test transport along t * (random retraction) is chain compatible, symmetric and scales by t^2"""
    field = "F5" if seed % 2 else "Q"
    C, P = gen_special(GenParams(n=[1, 3][seed % 2], max_rank=2, seed=seed, field=field))
    scrambled = scramble(C, P, seed=seed + 70, max_summands=2, max_ops=4)
    ring = C.ring
    h = scaled_identity(C, ring.t).compose(scrambled.retraction)
    h.validate()
    Q = transport(P, h)
    check_chain(Q)
    assert check_symmetry(Q).symmetry_verified
    base = transport(P, scrambled.retraction)
    assert Q.components == tuple(R.scale(ring.t ** 2) for R in base.components)


def assert_congruent(P, h, point):
    """u^M_i = H_{n-i}^T u^L_i H_i for the pullback Q = transport(P, h) along h: M -> L"""
    n = P.n
    u_L = cohomology_pairing(P, point)
    u_M = cohomology_pairing(transport(P, h), point)
    H = [induced_cohomology_map(h, point, i) for i in range(n + 1)]
    zero = P.ring.field.domain.zero
    for i in range(n + 1):
        rows, cols = u_M.shape(i)
        expected = [[sum((H[n - i][c][a] * u_L.matrices[i][c][e] * H[i][e][b]
                          for c in range(u_L.dimensions[n - i]) for e in range(u_L.dimensions[i])), zero)
                     for b in range(cols)] for a in range(rows)]
        assert [list(row) for row in u_M.matrices[i]] == expected


def test_cohomology_pairing_congruence_on_split_pair(f_sp1_pairing):
    """Test congruence along a scrambling retraction of F_SP1, and twice it, at s0"""
    scrambled = scramble(f_sp1_pairing.host, f_sp1_pairing, seed=12, max_summands=3)
    assert_congruent(f_sp1_pairing, scrambled.retraction, 0)
    doubled = scaled_identity(f_sp1_pairing.host, 2).compose(scrambled.retraction)
    assert_congruent(f_sp1_pairing, doubled, 0)
    four = f_sp1_pairing.ring.field.domain(4)
    u = cohomology_pairing(transport(f_sp1_pairing, doubled), 0)
    base = cohomology_pairing(transport(f_sp1_pairing, scrambled.retraction), 0)
    assert u.dimensions == (2, 2)
    assert u.matrices[0] == [[four * x for x in row] for row in base.matrices[0]]


@pytest.mark.parametrize("seed", range(4))
def test_cohomology_pairing_congruence_on_generated(seed):
    """Test congruence on generated special complexes at s0 and at generic points"""
    field = "F5" if seed % 2 else "Q"
    C, P = gen_special(GenParams(n=[1, 3][seed % 2], max_rank=2, seed=seed, field=field,
                                 require_nonzero_beta=True))
    scrambled = scramble(C, P, seed=seed + 90, max_summands=2, max_ops=4)
    for point in [0, 1, 2]:
        assert_congruent(P, scrambled.retraction, point)
    assert_congruent(P, scaled_identity(C, C.ring.t).compose(scrambled.retraction), 2)


if __name__ == "__main__":
    pytest.main([__file__])
