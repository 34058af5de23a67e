from itertools import combinations

import pytest
from hypothesis import given, settings

from laminar_mso import formulas as fl
from laminar_mso.laminar import (FULLY, MISSED, SINGLE, SetSystem, build_laminar_tree,
                                 build_representative_sets, check_laminar, identifying_colouring,
                                 system_from_nested, thin_partition)
from laminar_mso.logic import Evaluator, evaluate, free_variables
from laminar_mso.structures import make_structure
from laminar_mso.transduction import coloured_structure, tree_structure
from laminar_mso.verify import RootedTree, exhaustive_corpus, random_corpus

from .conftest import laminar_systems

P16 = fl.FormulaLibraryConfig()
ONE = fl.FormulaLibraryConfig(1)


def _subsets(universe):
    return [frozenset(c) for k in range(len(universe) + 1) for c in combinations(universe, k)]


def _coloured(system, A):
    return make_structure(ONE.coloured_vocabulary(), system.universe,
                          {"SET": system.family, "A_1": [(e,) for e in A]})


@pytest.fixture
def witness(three_leaf):
    tree = build_laminar_tree(three_leaf)
    tp = thin_partition(tree)
    col = identifying_colouring(tree, tp)
    return tree, tp, col, Evaluator(coloured_structure(three_leaf, col))


def test_set_level_examples(three_leaf):
    s = three_leaf.to_structure()
    assert evaluate(s, fl.derived_predicate("ROOT", "X"), {"X": "abc"})
    child = fl.derived_predicate("CHILD", "Y", "X")
    assert evaluate(s, child, {"Y": "ab", "X": "abc"})
    assert not evaluate(s, child, {"Y": "a", "X": "abc"})


def test_unknown_predicate():
    with pytest.raises(fl.UnknownPredicateName):
        fl.derived_predicate("SIBLING", "X", "Y")
    with pytest.raises(fl.UnknownPredicateName):
        fl.named_formula("nonsense")


def test_leaf_a_needs_colour():
    with pytest.raises(ValueError):
        fl.derived_predicate("LEAF_A", "X")


@settings(max_examples=20)
@given(laminar_systems(6))
def test_derived_predicates_vs_tree(system):
    tree = build_laminar_tree(system)
    ev = Evaluator(system.to_structure())
    sets = {t: tree.leafset[t] for t in tree.nodes}
    desc = fl.derived_predicate("DESC", "Y", "X")
    anc = fl.derived_predicate("ANC", "X", "Y")
    child = fl.derived_predicate("CHILD", "Y", "X")
    parent = fl.derived_predicate("PARENT", "X", "Y")
    for y, Y in sets.items():
        assert ev.evaluate(fl.derived_predicate("ROOT", "X"), {"X": Y}) == (y == tree.root)
        assert ev.evaluate(fl.derived_predicate("LEAF", "X"), {"X": Y}) == tree.is_leaf(y)
        for x, X in sets.items():
            env = {"X": X, "Y": Y}
            assert ev.evaluate(desc, env) == tree.is_descendant(y, x)
            assert ev.evaluate(anc, env) == tree.is_descendant(y, x)
            assert ev.evaluate(child, env) == (tree.parent[y] == x)
            assert ev.evaluate(parent, env) == (tree.parent[y] == x)


def test_derived_predicates_on_thousand_random_systems():
    corpus = random_corpus(11, 1000, 6)
    preds = [fl.derived_predicate(n, "Y", "X") for n in ("DESC", "CHILD")]
    for system in corpus:
        tree = build_laminar_tree(system)
        ev = Evaluator(system.to_structure())
        for y in tree.nodes:
            for x in tree.nodes:
                env = {"X": tree.leafset[x], "Y": tree.leafset[y]}
                assert ev.evaluate(preds[0], env) == tree.is_descendant(y, x)
                assert ev.evaluate(preds[1], env) == (tree.parent[y] == x)


def test_tree_level_predicates(three_leaf_tree):
    ev = Evaluator(tree_structure(three_leaf_tree))
    root = f"@{three_leaf_tree.root}"
    ab = f"@{three_leaf_tree.node_of('ab')}"
    assert ev.evaluate(fl.derived_predicate("root", "x"), {"x": root})
    assert ev.evaluate(fl.derived_predicate("leaf", "x"), {"x": "c"})
    assert not ev.evaluate(fl.derived_predicate("leaf", "x"), {"x": ab})
    assert ev.evaluate(fl.derived_predicate("child", "x", "y"), {"x": "a", "y": ab})
    assert not ev.evaluate(fl.derived_predicate("child", "x", "y"), {"x": ab, "y": ab})


def test_laminarity_examples():
    f = fl.laminarity_sentence(True)
    assert evaluate(SetSystem("ab", ["ab", "a", "b"]).to_structure(), f)
    assert not evaluate(SetSystem("abc", ["abc", "a", "b", "c", "ab", "bc"]).to_structure(), f)


def test_printed_laminarity_is_not_the_property():
    f = fl.laminarity_sentence(False)
    crossing = SetSystem("abc", ["abc", "a", "b", "c", "ab", "bc"])
    assert evaluate(crossing.to_structure(), f) != check_laminar(crossing)


def test_branch_examples(three_leaf):
    assert evaluate(_coloured(three_leaf, "abc"), fl.branch_formula(FULLY, "A_1"), {"X": "abc"})
    assert evaluate(_coloured(three_leaf, "c"), fl.branch_formula(MISSED, "A_1"), {"X": "ab"})
    assert not evaluate(_coloured(three_leaf, "c"), fl.branch_formula(SINGLE, "A_1"), {"X": "ab"})


def test_rep_star_on_three_leaves(witness):
    tree, tp, col, ev = witness
    f = fl.rep_formula("A_1", True)
    hits = [(R, X) for R in _subsets(tree.universe) for X in _subsets(tree.universe)
            if ev.evaluate(f, {"R": R, "X": X})]
    assert hits == [(frozenset("ab"), frozenset("abc"))]


def test_rep_star_rejects_empty_representative():
    for system in exhaustive_corpus(4):
        tree = build_laminar_tree(system)
        col = identifying_colouring(tree, thin_partition(tree))
        ev = Evaluator(coloured_structure(system, col))
        for i in range(1, 17):
            f = fl.rep_formula(P16.colour_a(i), True)
            for X in tree.leafset.values():
                assert not ev.evaluate(f, {"R": frozenset(), "X": X})


def _rep_agrees(system, **options) -> bool:
    tree = build_laminar_tree(system)
    tp = thin_partition(tree)
    ev = Evaluator(coloured_structure(system, identifying_colouring(tree, tp)))
    subsets = _subsets(tree.universe)
    for i, part in enumerate(tp.parts, start=1):
        if not part:
            continue
        rep = build_representative_sets(tree, part)
        f = fl.rep_formula(P16.colour_a(i), True, **options)
        for X in subsets:
            x = next((t for t in part if tree.leafset[t] == X), None)
            for R in subsets:
                expected = x is not None and rep.sets[x] == R
                if ev.evaluate(f, {"R": R, "X": X}) != expected:
                    return False
    return True


def test_rep_star_matches_representatives():
    assert all(_rep_agrees(s) for s in exhaustive_corpus(4))


def test_reflexive_tip_clause_breaks_rep_star():
    assert not _rep_agrees(SetSystem("ab", ["ab", "a", "b"]), strict=False)


def test_branching_clauses_cover_the_tip():
    # two representative sets of one part meet a four-way node below the tip
    system = system_from_nested(["b", [["a", "h"], ["c", "e"], ["f", "g"]]])
    assert _rep_agrees(system)
    assert not _rep_agrees(system, strict_below=True)


def test_printed_rep_star_breaks_on_deeper_trees():
    system = system_from_nested(["b", ["a", ["c", "d"]]])
    assert _rep_agrees(system)
    assert not _rep_agrees(system, printed=True)


def test_leader_zero():
    s = SetSystem("ab", ["ab", "a", "b"]).to_structure()
    f = fl.leader_formula(0)
    assert evaluate(s, f, {"r": "a", "X": "a"})
    assert not evaluate(s, f, {"r": "b", "X": "a"})
    with pytest.raises(fl.IndexOutOfRange):
        fl.leader_formula(17)


def test_unique_leader_of_universe(witness):
    tree, _, _, ev = witness
    pairs = [(i, r) for i in range(17) for r in tree.universe
             if ev.evaluate(fl.leader_formula(i), {"r": r, "X": frozenset("abc")})]
    assert pairs == [(1, "a")]


def test_leaders_are_injective_per_part():
    for system in exhaustive_corpus(4):
        tree = build_laminar_tree(system)
        ev = Evaluator(coloured_structure(system, identifying_colouring(tree, thin_partition(tree))))
        for i in range(17):
            f = fl.leader_formula(i)
            seen = {}
            for X in tree.leafset.values():
                for r in tree.universe:
                    if ev.evaluate(f, {"r": r, "X": X}):
                        assert seen.setdefault(r, X) == X


def test_chi_examples(three_leaf, witness):
    tree, tp, col, ev = witness
    chi = fl.chi_sentence(P16)
    assert ev.evaluate(chi)
    no_leader = type(col)(col.A, (frozenset(),) + col.B[1:])
    assert not evaluate(coloured_structure(three_leaf, no_leader), chi)
    spare = next(j for j in range(16) if not col.A[j] and not col.B[j])
    A, B = list(col.A), list(col.B)
    A[spare], B[spare] = col.A[0], col.B[0]
    assert not evaluate(coloured_structure(three_leaf, type(col)(tuple(A), tuple(B))), chi)


def _star(n):
    return RootedTree((None,) + (0,) * n)


def test_countkids_on_star():
    t = _star(3)
    ev = Evaluator(t.structure())
    env = {"v": "n0", "S": frozenset(t.name(v) for v in t.leaves())}
    assert ev.evaluate(fl.countkids(3), env)
    assert not ev.evaluate(fl.countkids(2), env)
    assert ev.evaluate(fl.oddkids(3), env)
    assert not ev.evaluate(fl.oddkids(2), env)


def test_evenleaf_on_binary_tree():
    t = RootedTree((None, 0, 0, 1, 1, 2, 2))
    ev = Evaluator(t.structure())
    assert ev.evaluate(fl.evenleaf(2), {"X": {"n3", "n5"}})
    assert not ev.evaluate(fl.evenleaf(2), {"X": {"n3", "n4", "n5"}})


def test_evenleaf_fooled_beyond_degree():
    t = _star(3)
    assert evaluate(t.structure(), fl.evenleaf(1), {"X": {"n1", "n2", "n3"}})


SIGNATURES = {
    "ROOT": "X", "LEAF": "X", "ANC": "X Y", "DESC": "X Y", "PDESC": "X Y", "PARENT": "X Y",
    "CHILD": "X Y", "laminarity": "", "LEAF_A": "X", "fully_A": "X", "single_A": "X",
    "missed_A": "X", "REP_A": "R X", "REP*_A": "R X", "chi": "", "root": "x", "leaf": "x",
    "child": "x y",
}


def test_library_signatures():
    for name, (_, f) in fl.library(2).items():
        family = name.split("_")[0]
        if family in ("countkids", "oddkids"):
            expected = {"v", "S"}
        elif family == "evenleaf":
            expected = {"X"}
        elif family == "leader":
            expected = {"r", "X"}
        else:
            expected = set(SIGNATURES[name].split())
        assert set(f.free) == expected, name
        assert fl.named_formula(name, 2) == f


def test_counting_formula_dispatch():
    assert fl.counting_formula("countkids", 2) == fl.countkids(2)
    assert fl.counting_formula("evenleaf", 1) == fl.evenleaf(1)
    with pytest.raises(fl.UnknownPredicateName):
        fl.counting_formula("evenkids", 1)
