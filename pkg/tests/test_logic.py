from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from laminar_mso import formulas as fl
from laminar_mso.laminar import SetSystem, build_laminar_tree, check_laminar
from laminar_mso.logic import (Assignment, Eq, Evaluator, Exists, ExistsSet, Forall, ForallSet,
                               FormulaSyntaxError, Implies, In, Not, ResourceLimitExceeded,
                               Subset, UnboundVariable, evaluate, free_variables, parse_formula,
                               to_text)
from laminar_mso.structures import SET_VOCAB, ArityMismatch, UnknownSymbol, make_structure
from laminar_mso.transduction import tree_structure, tree_to_setsystem
from laminar_mso.verify import element_names, exhaustive_corpus

from .conftest import MIXED, formulas, structures

TWO = make_structure(SET_VOCAB, ["a", "b"], {"SET": [["a", "b"], ["a"], ["b"]]})


def test_parse_examples():
    assert parse_formula("(exists x (= x x))") == Exists("x", Eq("x", "x"))
    assert parse_formula("(forall X (exists x (in x X)))") == ForallSet("X", Exists("x", In("x", "X")))


def test_unbalanced_reports_position():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula("(and (pred SET X) (not (pred LEAF X))")
    assert exc.value.position >= 0


def test_parse_checks_vocabulary():
    with pytest.raises(UnknownSymbol):
        parse_formula("(pred LEAF X)", SET_VOCAB)
    with pytest.raises(ArityMismatch):
        parse_formula("(rel E x)", MIXED)


def test_eval_examples():
    assert evaluate(TWO, parse_formula("(exists x (= x x))"))
    assert not evaluate(TWO, parse_formula("(forall X (exists x (in x X)))"))


def test_corrected_laminarity_on_three_leaves(three_leaf):
    assert evaluate(three_leaf.to_structure(), fl.laminarity_sentence(True))


def test_corrected_laminarity_matches_native_on_all_families():
    f = fl.laminarity_sentence(True)
    for n in range(1, 5):
        u = element_names(n)
        subsets = [frozenset(c) for k in range(n + 1) for c in combinations(u, k)]
        for mask in range(1 << len(subsets)):
            fam = [s for j, s in enumerate(subsets) if mask >> j & 1]
            st_ = make_structure(SET_VOCAB, u, {"SET": fam})
            assert evaluate(st_, f) == check_laminar(SetSystem(u, fam)), fam


def test_free_variables_examples():
    assert free_variables(Exists("x", In("x", "X"))) == (frozenset(), {"X"})
    assert free_variables(Eq("x", "y")) == ({"x", "y"}, frozenset())
    assert free_variables(fl.laminarity_sentence(True)) == (frozenset(), frozenset())


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        evaluate(TWO, In("x", "X"))


def test_resource_cap():
    big = make_structure(SET_VOCAB, element_names(5))
    f = ExistsSet("X", Exists("x", In("x", "X")))
    with pytest.raises(ResourceLimitExceeded):
        evaluate(big, f, max_subset_universe=4)
    assert evaluate(big, f, max_subset_universe=5)


def test_assignment_json():
    a = Assignment.of({"x": "a", "X": ["a", "b"]})
    assert Assignment.from_json(a.to_json()) == a


@given(formulas)
def test_print_parse_round_trip(f):
    assert parse_formula(to_text(f), MIXED) == f


def _close(f, s, data):
    elems, sets = free_variables(f)
    u = list(s.universe)
    env = {v: data.draw(st.sampled_from(u)) for v in elems}
    env.update({v: data.draw(st.frozensets(st.sampled_from(u))) for v in sets})
    return env


@given(formulas, structures(), st.data())
def test_negation(f, s, data):
    env = _close(f, s, data)
    assert evaluate(s, Not(f), env) == (not evaluate(s, f, env))


@given(formulas, structures(), st.data())
def test_set_quantifier_duality(f, s, data):
    g = ForallSet("X", f)
    env = _close(g, s, data)
    assert evaluate(s, g, env) == evaluate(s, Not(ExistsSet("X", Not(f))), env)


@given(formulas, structures(), st.data())
def test_element_quantifier_duality(f, s, data):
    g = Forall("x", f)
    env = _close(g, s, data)
    assert evaluate(s, g, env) == evaluate(s, Not(Exists("x", Not(f))), env)


@given(formulas, structures(), st.data())
def test_guarded_equals_unguarded(f, s, data):
    env = _close(f, s, data)
    assert evaluate(s, f, env) == evaluate(s, f, env, guarded=False)


@given(structures(), st.data())
def test_subset_is_sugar(s, data):
    env = _close(Subset("X", "Y"), s, data)
    expansion = Forall("z", Implies(In("z", "X"), In("z", "Y")))
    assert evaluate(s, Subset("X", "Y"), env) == evaluate(s, expansion, env)


@pytest.mark.parametrize("text", [
    "(existsSet X (and (pred SET X) (forall x (in x X))))",
    "(forallSet X (implies (and (pred SET X) (exists x (in x X))) (exists y (in y X))))",
    "(existsSet R (and (forall x (implies (in x R) (rel P x))) (exists y (in y R))))",
    "(forallSet R (implies (and (forall x (implies (in x R) (rel P x))) (pred SET R)) (exists y (in y R))))",
])
@given(s=structures())
def test_guarded_shapes(text, s):
    f = parse_formula(text, MIXED)
    assert evaluate(s, f) == evaluate(s, f, guarded=False)


def test_comprehension_range_in_backwards_interpretation():
    for system in exhaustive_corpus(4):
        ts = tree_structure(build_laminar_tree(system))
        assert tree_to_setsystem(ts) == tree_to_setsystem(ts, guarded=False)
