"""
Tests for document parsing, validation and canonical serialization
"""
import json
import random

import pytest

from psi_parity.complexes import FreeComplex
from psi_parity.documents import (
    decode_json_safe, document_to_objects, dump_document, load_document, load_objects, loads_document,
    objects_to_document, read_text_safe, write_text
)
from psi_parity.exceptions import DocumentError, InputUnreadable
from psi_parity.functional_types import Failure
from psi_parity.lab import GenParams, gen_complex, gen_special, random_poly, scramble, split_pair_complex
from psi_parity.models import ComplexDocument
from psi_parity.pairings import tautological_pairing
from psi_parity.scalars import LocalRing


def test_split_pair_document(f_sp1, f_sp1_pairing):
    """Test objects -> document -> objects"""
    document = objects_to_document(f_sp1, f_sp1_pairing, name="F_SP1")
    assert document.field == "Q"
    assert document.diffs == [[["0", "t"], ["-t", "0"]]]
    assert document.pairing.n == 1
    C, P = document_to_objects(loads_document(dump_document(document)))
    assert C == f_sp1
    assert P == f_sp1_pairing


def test_dump_round_trip_is_byte_identical():
    """Test write -> read -> write on generated instances"""
    for seed, field in [(0, "Q"), (1, "F5"), (2, "Q")]:
        C, P = gen_special(GenParams(n=3, max_rank=2, seed=seed, field=field))
        text = dump_document(objects_to_document(C, P, name="special", seed=seed))
        C2, P2 = document_to_objects(loads_document(text))
        assert dump_document(objects_to_document(C2, P2, name="special", seed=seed)) == text
        assert dump_document(loads_document(text)) == text


def test_prime_field_descriptor():
    """Test field descriptors are canonicalized"""
    document = ComplexDocument(field="F5", ranks=[1])
    assert document.field == {"Fp": 5}
    assert ComplexDocument(field={"Fp": 7}, ranks=[1]).field == {"Fp": 7}


def test_fractional_entries_round_trip(Q):
    """Test rational function entries survive serialization"""
    text = json.dumps({"ranks": [1, 1], "diffs": [[["(t^2-1)/(t-2)"]]]})
    C, P = document_to_objects(loads_document(text))
    assert P is None
    assert C.diffs[0][0, 0] == Q.parse("(t^2-1)/(t-2)")
    assert objects_to_document(C).diffs == [[["(t^2 - 1)/(t - 2)"]]]


def test_empty_matrices(Q):
    """Test zero-size differentials serialize as empty lists"""
    text = json.dumps({"ranks": [0, 0], "diffs": [[]]})
    C, _ = document_to_objects(loads_document(text))
    assert C.ranks == (0, 0)
    assert objects_to_document(C).diffs == [[]]


def test_pairing_component_shapes_and_padding(Q):
    """Test pairing shapes, and padding of a complex shorter than the twist"""
    text = json.dumps({
        "ranks": [1],
        "diffs": [],
        "pairing": {"n": 1, "m": 0, "components": [[], [["1"]]]},
    })
    with pytest.raises(DocumentError):
        document_to_objects(loads_document(text))
    text = json.dumps({
        "ranks": [1, 1],
        "diffs": [[["0"]]],
        "pairing": {"n": 3, "m": 1, "components": [[], [], [], []]},
    })
    C, P = document_to_objects(loads_document(text))
    assert C.ranks == (1, 1, 0, 0)
    assert P.n == 3


def test_json_syntax_error_has_position():
    """Test malformed JSON reports line and column"""
    result = decode_json_safe('{\n  "ranks": [1,\n}')
    assert isinstance(result, Failure)
    assert result.error.details["line"] == 3
    assert result.error.exit_code == 3
    with pytest.raises(DocumentError) as exc_info:
        loads_document('{"ranks": [1,}')
    assert "line 1" in exc_info.value.message


@pytest.mark.parametrize("payload,location", [
    ({"ranks": [-1]}, "$.ranks"),
    ({"ranks": [1], "extra": 1}, "$.extra"),
    ({"ranks": [1], "field": {"Fp": 4}}, "$.field"),
    ({"ranks": [1], "schema_version": 2}, "$.schema_version"),
    ({"ranks": [1, 1], "diffs": [[["1"]]], "pairing": {"n": 2, "m": 0, "components": []}}, "$.pairing"),
])
def test_schema_errors(payload, location):
    """Test schema violations name their location"""
    with pytest.raises(DocumentError) as exc_info:
        loads_document(json.dumps(payload))
    assert exc_info.value.details["location"] == location


def test_scalar_error_location():
    """Test unparsable entries are located inside the matrix"""
    text = json.dumps({"ranks": [1, 2], "diffs": [[["1"], ["t +* 1"]]]})
    with pytest.raises(DocumentError) as exc_info:
        document_to_objects(loads_document(text))
    assert exc_info.value.details["location"] == "$.diffs[0][1][0]"


def test_shape_errors():
    """Test wrong matrix shapes and differential counts"""
    with pytest.raises(DocumentError):
        document_to_objects(loads_document(json.dumps({"ranks": [1, 2], "diffs": [[["1", "2"]]]})))
    with pytest.raises(DocumentError):
        document_to_objects(loads_document(json.dumps({"ranks": [1, 1], "diffs": []})))


def test_base_point_vanishing_denominator():
    """Test denominators vanishing at a nonzero s0 are rejected"""
    text = json.dumps({"base_point": "2", "ranks": [1, 1], "diffs": [[["1/(t-2)"]]]})
    with pytest.raises(DocumentError):
        document_to_objects(loads_document(text))


def test_missing_file(tmp_path):
    """Test unreadable input"""
    missing = tmp_path / "missing.json"
    assert isinstance(read_text_safe(missing), Failure)
    with pytest.raises(InputUnreadable) as exc_info:
        load_document(missing)
    assert exc_info.value.message.startswith("cannot read input")
    assert exc_info.value.exit_code == 2


def test_load_objects_from_file(tmp_path):
    """Test file loading over F_5 at a nonzero base point"""
    ring = LocalRing.prime(5, base_point=3)
    C = split_pair_complex(ring)
    path = tmp_path / "sp1.json"
    write_text(path, dump_document(objects_to_document(C, tautological_pairing(C, 0))))
    document, C2, P2 = load_objects(path)
    assert document.base_point == "3"
    assert document.field == {"Fp": 5}
    assert C2 == C
    assert P2 is not None


@pytest.mark.parametrize("seed", range(6))
def test_canonical_round_trip_on_random_documents(seed):
    """Test dump -> load -> objects -> dump is byte-identical on scrambled and generic instances"""
    field = ["Q", "F5"][seed % 2]
    base_point = ["0", "2"][(seed // 2) % 2]
    params = GenParams(n=[1, 3][seed % 2], max_rank=2, seed=seed, field=field, base_point=base_point)
    C, P = gen_special(params)
    scrambled = scramble(C, P, seed=seed + 300, max_summands=2, max_ops=4)
    instances = [(scrambled.complex, scrambled.pairing), (gen_complex(params), None)]
    for K, pairing in instances:
        text = dump_document(objects_to_document(K, pairing))
        K2, P2 = document_to_objects(loads_document(text))
        assert K2 == K
        assert P2 == pairing
        assert dump_document(objects_to_document(K2, P2)) == text


@pytest.mark.parametrize("ring", [LocalRing.rationals(), LocalRing.prime(5), LocalRing.prime(7, base_point=3)],
                         ids=["Q", "F5", "F7-at-3"])
def test_fractional_entries_canonical_round_trip(ring):
    """Test random quotients by units keep their canonical strings through a document"""
    rng = random.Random(41)
    entries = [[random_poly(ring, rng, 2, 4) / (ring.one + ring.pi * random_poly(ring, rng, 1, 3))
                for _ in range(3)] for _ in range(2)]
    C = FreeComplex.build(ring, (3, 2), [entries])
    text = dump_document(objects_to_document(C))
    C2, _ = document_to_objects(loads_document(text))
    assert C2 == C
    assert all(ring.parse(str(a)) == a for row in entries for a in row)
    assert dump_document(objects_to_document(C2)) == text


if __name__ == "__main__":
    pytest.main([__file__])
