"""
Tests for generators, scrambling and fiber scans
"""
import random

import pytest
from pydantic import ValidationError

from psi_parity.complexes import ChainMap, is_quasi_iso, validate
from psi_parity.config import reload_settings
from psi_parity.exact_linalg import MatrixLocal
from psi_parity.exceptions import CharTwo, InfeasibleRanks
from psi_parity.lab import (
    GenParams, counterexample_demo, default_points, fiber_scan, gen_complex, gen_special,
    gen_special_complex, random_unimodular, scramble
)
from psi_parity.pairings import check_chain, check_symmetry, perfection_at_point
from psi_parity.scalars import FieldKind


def test_gen_params_validation():
    """Test the twist must be odd"""
    with pytest.raises(ValidationError):
        GenParams(n=2)
    assert GenParams(n=5).m == 2


def test_gen_params_from_settings(monkeypatch):
    """Test settings defaults and explicit overrides"""
    monkeypatch.setenv("PSI_DEFAULT_FIELD", "F7")
    monkeypatch.setenv("PSI_SEED", "9")
    reload_settings()
    params = GenParams.from_settings(n=3)
    assert params.field == "F7"
    assert params.seed == 9
    assert params.ring().field.kind is FieldKind.PRIME
    assert GenParams.from_settings(seed=1, field=None).seed == 1


@pytest.mark.parametrize("n,field", [(1, "Q"), (3, "Q"), (3, "F5"), (5, "F7")])
def test_gen_special_postconditions(n, field):
    """Test generated instances are minimal, symmetric and perfect at s0"""
    for seed in range(3):
        C, P = gen_special(GenParams(n=n, max_rank=3, seed=seed, field=field))
        validate(C)
        check_chain(P)
        check_symmetry(P)
        perfection_at_point(P, C.ring.base_point)
        assert C.length == n
        assert all(d.vanishes_at_base_point() for d in C.diffs)


def test_gen_special_is_deterministic():
    """Test the seed fixes the instance"""
    params = GenParams(n=3, max_rank=2, seed=5)
    assert gen_special(params)[0] == gen_special(params)[0]


def test_gen_special_nonzero_beta():
    """Test require_nonzero_beta"""
    for seed in range(5):
        special = gen_special_complex(GenParams(n=3, max_rank=2, seed=seed, require_nonzero_beta=True))
        assert not special.beta.is_zero()


def test_gen_special_infeasible():
    """Test InfeasibleRanks when the bound leaves no room for beta"""
    with pytest.raises(InfeasibleRanks) as exc_info:
        gen_special_complex(GenParams(n=1, max_rank=1, require_nonzero_beta=True))
    assert exc_info.value.exit_code == 7


def test_gen_special_char_two():
    """Test the pairing needs 2 to be a unit"""
    with pytest.raises(CharTwo):
        gen_special(GenParams(n=1, max_rank=2, field="F2"))


def test_gen_complex_is_a_complex():
    """Test random complexes satisfy d o d = 0"""
    for seed in range(5):
        C = gen_complex(GenParams(n=5, max_rank=3, seed=seed))
        validate(C)
        assert C.length == 5


def test_random_unimodular(Q, F5):
    """Test g @ g^-1 = I"""
    rng = random.Random(1)
    for ring in (Q, F5):
        for size in range(4):
            g, g_inv = random_unimodular(ring, size, rng, max_ops=8)
            assert g @ g_inv == MatrixLocal.identity(ring, size)


def test_scramble(f_sp1_pairing):
    """Test scrambled complexes are homotopy equivalent with a transported pairing"""
    for seed in range(4):
        result = scramble(f_sp1_pairing.host, f_sp1_pairing, seed=seed, max_summands=2, max_ops=5)
        validate(result.complex)
        result.witness.validate()
        result.retraction.validate()
        assert result.retraction.compose(result.witness) == ChainMap.identity(f_sp1_pairing.host)
        assert is_quasi_iso(result.witness)
        check_chain(result.pairing)
        check_symmetry(result.pairing)


def test_scramble_reads_summand_bound_from_settings(monkeypatch, f_sp1_pairing):
    """Test PSI_MAX_SUMMANDS bounds the inserted contractible summands"""
    monkeypatch.setenv("PSI_MAX_SUMMANDS", "0")
    reload_settings()
    for seed in range(4):
        assert scramble(f_sp1_pairing.host, f_sp1_pairing, seed=seed, max_ops=3).complex.ranks == (2, 2)

    monkeypatch.setenv("PSI_MAX_SUMMANDS", "4")
    reload_settings()
    sizes = {sum(scramble(f_sp1_pairing.host, f_sp1_pairing, seed=seed, max_ops=3).complex.ranks)
             for seed in range(12)}
    assert max(sizes) > 4
    assert all(size <= 4 + 2 * 4 for size in sizes)


def test_fiber_scan_counterexample(f_ce):
    """Test the F_CE scan shows the parity jump"""
    report = fiber_scan(f_ce, [0, 1, 2], max_workers=2)
    assert report.generic_dims == [0, 0]
    assert report.parities == [1, 0, 0]
    assert not report.parity_constant
    assert report.euler_constant
    assert report.rows[0].jumps == [0, 1]
    assert report.rows[1].point == "1"


def test_fiber_scan_split_pair(f_sp1):
    """Test parity stays even on F_SP1"""
    report = fiber_scan(f_sp1, [0, 1, -4])
    assert [row.psi for row in report.rows] == [2, 0, 0]
    assert report.parity_constant


def test_default_points_follow_settings(monkeypatch, f_ce):
    """Test sample count comes from PSI_SAMPLES"""
    monkeypatch.setenv("PSI_SAMPLES", "3")
    reload_settings()
    assert len(default_points(f_ce)) == 4
    assert len(default_points(f_ce, samples=6)) == 7


def test_counterexample_demo():
    """Test the three hypothesis failures"""
    report = counterexample_demo(samples=5, seed=0, max_workers=1)
    assert not report.fiber.parity_constant
    assert report.fiber.rows[0].parity == 1
    assert report.char_two_error == "CHAR_TWO"
    assert report.cohomology_error == "NOT_PERFECT_ON_COHOMOLOGY"


@pytest.mark.parametrize("seed", range(10))
def test_euler_characteristic_constant_while_dims_jump(seed):
    """Test chi is the same at every point while dim H^i jumps at s0 on special complexes"""
    field = "F5" if seed % 2 else "Q"
    params = GenParams(n=[1, 3][seed % 2], max_rank=2, seed=seed, field=field, require_nonzero_beta=True)
    C, _ = gen_special(params)
    report = fiber_scan(C, default_points(C, samples=6, seed=seed), max_workers=2)
    assert report.euler_constant
    for row in report.rows:
        assert all(d >= g for d, g in zip(row.dims, report.generic_dims))
    assert report.rows[0].point == "0"
    assert report.rows[0].jumps


@pytest.mark.parametrize("seed", range(6))
def test_euler_characteristic_constant_on_generated_complexes(seed):
    """Test chi is constant across points on complexes that are not self-dual"""
    field = "F5" if seed % 2 else "Q"
    C = gen_complex(GenParams(n=3, max_rank=3, seed=seed + 20, field=field))
    report = fiber_scan(C, default_points(C, samples=6, seed=seed), max_workers=2)
    assert report.euler_constant
    assert all(d >= g for row in report.rows for d, g in zip(row.dims, report.generic_dims))


if __name__ == "__main__":
    pytest.main([__file__])
