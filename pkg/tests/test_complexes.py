"""
Tests for free complexes, chain maps and cohomology
"""
import random

import pytest

from psi_parity.complexes import (
    ChainMap, FreeComplex, cocycle_basis, direct_sum, double_dual_iso, dual_twist,
    euler_characteristic, fiber_cohomology, generic_cohomology, homology, inclusion,
    induced_cohomology_map, is_quasi_iso, map_points, mapping_cone, pole_free_points, projection,
    screen_point, semi_euler, tau, tensor, validate
)
from psi_parity.exact_linalg import MatrixLocal
from psi_parity.exceptions import LengthExceedsTwist, NotAChainMap, NotAComplex, ShapeMismatch
from psi_parity.functional_types import Failure, Success
from psi_parity.lab import GenParams, gen_complex


def test_validate_rejects_nonzero_composite(Q):
    """Test d^1 d^0 != 0 raises NotAComplex at degree 0"""
    C = FreeComplex.build(Q, (1, 1, 1), [[[1]], [[1]]])
    with pytest.raises(NotAComplex) as exc_info:
        validate(C)
    assert exc_info.value.message == "NotAComplex at degree 0"


def test_shape_checks(Q):
    """Test differential shapes must match ranks"""
    with pytest.raises(ShapeMismatch):
        FreeComplex(Q, (1, 2), (MatrixLocal.zeros(Q, 1, 1),))
    with pytest.raises(ShapeMismatch):
        FreeComplex(Q, (), ())


def test_fiber_cohomology_split_pair(f_sp1):
    """Test F_SP1 has cohomology (2, 2) at s0 and (0, 0) at t = 1"""
    assert fiber_cohomology(f_sp1, 0) == [2, 2]
    assert fiber_cohomology(f_sp1, 1) == [0, 0]
    assert semi_euler(f_sp1, 0) == 2
    assert semi_euler(f_sp1, 1) == 0


def test_counterexample_parity_jumps(f_ce):
    """Test psi(F_CE) is 1 at t = 0 and 0 at t = 1"""
    assert semi_euler(f_ce, 0) % 2 == 1
    assert semi_euler(f_ce, 1) % 2 == 0
    assert euler_characteristic(f_ce, 0) == euler_characteristic(f_ce, 1) == euler_characteristic(f_ce) == 0


def test_identity_complex_is_acyclic(f_id):
    """Test F_ID has no cohomology anywhere"""
    assert fiber_cohomology(f_id, 0) == [0, 0]
    assert homology(f_id).is_zero()


def test_homology_torsion(f_ce, f_sp1):
    """Test torsion-aware homology profiles"""
    profile = homology(f_ce)
    assert profile[0].is_zero()
    assert profile[1].free_rank == 0
    assert profile[1].torsion == (1,)
    assert profile.describe() == ["H^0 = 0", "H^1 = O/pi"]
    assert profile.fiber_dims_at_base_point() == fiber_cohomology(f_ce, 0)
    assert homology(f_sp1)[1].torsion == (1, 1)


def test_homology_free_part(Q):
    """Test free ranks with a zero differential"""
    C = FreeComplex.build(Q, (2, 1), [[["t^2", "0"]]])
    profile = homology(C)
    assert profile[0].free_rank == 1
    assert profile[1].torsion == (2,)
    assert profile.describe()[1] == "H^1 = O/pi^2"
    assert generic_cohomology(C) == [1, 0]


def test_dual_twist(f_ce):
    """Test the dual of O -t-> O with twist 1"""
    D = dual_twist(f_ce, 1)
    assert D.ranks == (1, 1)
    assert D.diffs[0] == f_ce.diffs[0].scale(-1)
    validate(D)


def test_dual_twist_length_check(f_ce):
    """Test twist shorter than the complex"""
    with pytest.raises(LengthExceedsTwist):
        dual_twist(f_ce, 0)


@pytest.mark.parametrize("seed", range(4))
def test_double_dual_iso(seed):
    """Test the sign isomorphism into the double dual is a chain map"""
    params = GenParams(n=3, max_rank=2, seed=seed)
    C = gen_complex(params)
    for n in (3, 4):
        f = double_dual_iso(C, n)
        f.validate()
        assert f.is_degreewise_iso()


def test_tensor_is_a_complex(f_sp1, f_ce):
    """Test d o d = 0 on tensor products"""
    T = tensor(f_sp1, f_ce)
    assert T.ranks == (2, 4, 2)
    validate(T)
    validate(tensor(f_sp1, f_sp1))


def test_tensor_unit(f_sp1, Q):
    """Test the one-term complex O is a unit for tensor"""
    assert tensor(FreeComplex.point(Q), f_sp1) == f_sp1


def test_tau_is_involutive_chain_map(f_sp1):
    """Test tau commutes with d and squares to the identity"""
    t = tau(f_sp1)
    t.validate()
    assert t.compose(t) == ChainMap.identity(t.source)


def test_tau_on_random_complex():
    """Test tau on a longer complex"""
    C = gen_complex(GenParams(n=1, max_rank=2, seed=7))
    t = tau(C.padded(2))
    t.validate()


def test_chain_map_validation(f_ce, Q):
    """Test NotAChainMap on a map that does not commute"""
    f = ChainMap(f_ce, f_ce, (MatrixLocal.identity(Q, 1), MatrixLocal.zeros(Q, 1, 1)))
    with pytest.raises(NotAChainMap) as exc_info:
        f.validate()
    assert exc_info.value.details["degree"] == 0


def test_mapping_cone_of_zero_map(f_ce, Q):
    """Test the cone of 0 -> F_CE carries the torsion one degree up"""
    f = ChainMap.zero(FreeComplex.zero(Q, 1), f_ce)
    cone = mapping_cone(f)
    assert cone.ranks == (0, 1, 1)
    profile = homology(cone)
    assert profile[2].torsion == (1,)
    assert not is_quasi_iso(f)


def test_quasi_isomorphisms(f_ce, f_id):
    """Test identity and contractible inclusions are quasi-isomorphisms"""
    assert is_quasi_iso(ChainMap.identity(f_ce))
    assert not is_quasi_iso(ChainMap.zero(f_ce, f_ce))
    assert is_quasi_iso(inclusion(f_ce, f_id))
    assert is_quasi_iso(projection(f_ce, f_id))


def test_direct_sum_and_projections(f_ce, f_sp1):
    """Test projection o inclusion = id"""
    S = direct_sum(f_ce, f_sp1)
    assert S.ranks == (3, 3)
    validate(S)
    assert projection(f_ce, f_sp1).compose(inclusion(f_ce, f_sp1)) == ChainMap.identity(f_ce)


def test_chain_map_inverse(Q, f_sp1):
    """Test the inverse of a degreewise isomorphism"""
    g = MatrixLocal.build(Q, [[1, "t"], [0, 1]])
    target = FreeComplex(Q, f_sp1.ranks, (g @ f_sp1.diffs[0],))
    f = ChainMap(f_sp1, target, (MatrixLocal.identity(Q, 2), g)).validate()
    assert f.is_degreewise_iso()
    assert f.inverse().compose(f) == ChainMap.identity(f_sp1)


def test_cocycle_basis_matches_fiber_dimensions():
    """Test explicit bases have the fiber cohomology dimensions"""
    for seed in range(5):
        C = gen_complex(GenParams(n=3, max_rank=3, seed=seed))
        dims = fiber_cohomology(C, 0)
        assert [cocycle_basis(C, i, 0).dimension for i in range(C.length + 1)] == dims


def test_induced_map_of_identity(f_sp1):
    """Test the identity induces the identity on fiber cohomology"""
    field = f_sp1.ring.field
    one, zero = field.domain.one, field.domain.zero
    matrix = induced_cohomology_map(ChainMap.identity(f_sp1), 0, 0)
    assert matrix == [[one, zero], [zero, one]]


def test_pole_free_points(F5):
    """Test sampled points avoid poles and start at s0"""
    C = FreeComplex.build(F5, (1, 1), [[["1/(t-1)"]]])
    points = pole_free_points(C, 10, seed=1)
    assert points[0] == F5.base_point
    assert len(points) == 11
    assert all(s != F5.field.element(1) for s in points)
    assert pole_free_points(C, 10, seed=1) == points


def test_pole_free_points_budget(F5):
    """Test the attempt budget stops sampling"""
    C = FreeComplex.build(F5, (1, 1), [[["1/(t-1)"]]])
    points = pole_free_points(C, 10, seed=1, max_attempts=3)
    assert len(points) <= 4


def test_screen_point(Q):
    """Test point screening returns Success or Failure"""
    A = MatrixLocal.build(Q, [["1/(t-2)"]])
    assert isinstance(screen_point([A], Q.field.element(1)), Success)
    assert isinstance(screen_point([A], Q.field.element(2)), Failure)


def test_map_points_keeps_order():
    """Test threaded evaluation preserves point order"""
    points = list(range(20))
    random.Random(0).shuffle(points)
    assert map_points(lambda s: s * s, points, max_workers=4) == [s * s for s in points]


def kunneth_dims(A, B, point):
    a, b = fiber_cohomology(A, point), fiber_cohomology(B, point)
    return [sum(a[i] * b[q - i] for i in range(len(a)) if 0 <= q - i < len(b))
            for q in range(len(a) + len(b) - 1)]


@pytest.mark.parametrize("point", [0, 1, 2])
def test_tensor_fiber_cohomology_is_kunneth(f_sp1, f_ce, f_id, point):
    """Test dim H^q of a tensor product at a point is the convolution of the factors' dims"""
    for A, B in [(f_sp1, f_ce), (f_ce, f_ce), (f_sp1, f_sp1), (f_id, f_ce)]:
        assert fiber_cohomology(tensor(A, B), point) == kunneth_dims(A, B, point)


@pytest.mark.parametrize("seed", range(4))
def test_tensor_fiber_cohomology_is_kunneth_on_generated(seed):
    """Test the Kunneth dimensions on generated complexes over Q and F_5"""
    field = "F5" if seed % 2 else "Q"
    A = gen_complex(GenParams(n=1, max_rank=2, seed=seed, field=field, degree_bound=1))
    B = gen_complex(GenParams(n=1 + 2 * (seed % 2), max_rank=2, seed=seed + 50, field=field, degree_bound=1))
    T = tensor(A, B)
    validate(T)
    for point in [0, 1]:
        assert fiber_cohomology(T, point) == kunneth_dims(A, B, point)


if __name__ == "__main__":
    pytest.main([__file__])
