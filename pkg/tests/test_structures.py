import json

import pytest
from hypothesis import given

from laminar_mso.structures import (DESC_VOCAB, RELATION, SET_VOCAB, SETPRED, ArityConflict,
                                    ArityMismatch, ElementOutOfUniverse, EmptyUniverse, Structure,
                                    StructureError, UnknownSymbol, Vocabulary, base_of, copy_id,
                                    make_structure, union)

from .conftest import structures


def test_smallest_laminar_structure():
    s = make_structure(SET_VOCAB, ["b", "a"], {"SET": [["a", "b"], ["a"], ["b"]]})
    assert s.universe == ("a", "b")
    assert len(s.setpred("SET")) == 3


def test_empty_universe_rejected():
    with pytest.raises(EmptyUniverse):
        make_structure(SET_VOCAB, [], {"SET": []})


def test_reflexive_desc_pair():
    s = make_structure(DESC_VOCAB, ["0", "1"], {"desc": [("1", "0"), ("0", "0"), ("1", "1")]})
    assert ("1", "0") in s.relation("desc")
    assert ("0", "1") not in s.relation("desc")


@pytest.mark.parametrize("interps, error", [
    ({"missing": []}, UnknownSymbol),
    ({"desc": [("a",)]}, ArityMismatch),
    ({"desc": [("a", "z")]}, ElementOutOfUniverse),
])
def test_validation_errors(interps, error):
    with pytest.raises(error):
        make_structure(DESC_VOCAB, ["a"], interps)


def test_vocabulary_rules():
    with pytest.raises(StructureError):
        Vocabulary.of(("Q", RELATION, 1), ("Q", SETPRED, 1))
    with pytest.raises(StructureError):
        Vocabulary.of(("Q", RELATION, 0))
    assert Vocabulary.of(("b", RELATION, 1), ("a", RELATION, 1)).names == ("a", "b")


def test_union_disjoint_vocabularies():
    a = make_structure(SET_VOCAB, ["a"], {"SET": [["a"]]})
    b = make_structure(DESC_VOCAB, ["x"], {"desc": [("x", "x")]})
    u = union(a, b)
    assert u.universe == ("a", "x")
    assert u.vocabulary.names == ("SET", "desc")


def test_union_idempotent_and_merging():
    a = make_structure(SET_VOCAB, ["a", "b"], {"SET": [["a"]]})
    b = make_structure(SET_VOCAB, ["a", "b"], {"SET": [["b"]]})
    assert union(a, a) == a
    assert union(a, b).setpred("SET") == {frozenset("a"), frozenset("b")}


def test_union_arity_conflict():
    a = make_structure(Vocabulary.of(("Q", RELATION, 1)), ["a"])
    b = make_structure(Vocabulary.of(("Q", RELATION, 2)), ["a"])
    with pytest.raises(ArityConflict):
        union(a, b)


def test_json_schema_is_canonical():
    s = make_structure(SET_VOCAB, ["b", "a"], {"SET": [["b"], ["a"], ["b", "a"]]})
    assert s.to_json() == {"vocabulary": [{"name": "SET", "kind": "setpred", "arity": 1}],
                           "universe": ["a", "b"], "relations": {},
                           "setPredicates": {"SET": [["a", "b"], ["a"], ["b"]]}}
    assert Structure.loads(s.dumps()).dumps() == s.dumps()


def test_copy_ids():
    assert copy_id(0, "a") == "a"
    assert base_of(copy_id(3, "a")) == (3, "a")
    assert base_of("a") == (0, "a")


@given(structures(), structures())
def test_union_commutes(a, b):
    assert union(a, b) == union(b, a)


@given(structures(), structures(), structures())
def test_union_associates(a, b, c):
    assert union(union(a, b), c) == union(a, union(b, c))


@given(structures())
def test_json_round_trip(s):
    again = Structure.from_json(json.loads(s.dumps()))
    assert again == s
    assert again.dumps() == s.dumps()
