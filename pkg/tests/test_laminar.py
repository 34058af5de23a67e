import pytest
from hypothesis import given

from laminar_mso.laminar import (FULLY, MISSED, N_PARTS, PARTIAL, SINGLE, ContainsLeaf, LaminarTree,
                                 NotInnerNode, NotLaminar, NotThin, SetSystem, TipUndefined,
                                 build_laminar_tree, build_representative_sets, check_laminar,
                                 classify_branch, identifying_colouring, is_representative_tree,
                                 is_thin, system_from_nested, thin_partition, tip_and_uptree)
from laminar_mso.verify import exhaustive_corpus

from .conftest import laminar_systems


@pytest.mark.parametrize("universe, sets, expected", [
    ("ab", ["ab", "a", "b"], True),
    ("ab", ["a", "b"], False),
    ("abc", ["abc", "a", "b", "c", "ab", "bc"], False),
    ("abc", ["abc", "a", "b", "c", "ab", ""], False),
])
def test_check_laminar(universe, sets, expected):
    assert check_laminar(SetSystem(universe, sets)) is expected


def test_singleton_tree():
    tree = build_laminar_tree(SetSystem("a", ["a"]))
    assert tree.nodes == (0,) and tree.is_leaf(tree.root)


def test_cherry_tree(three_leaf_tree):
    t = three_leaf_tree
    ab, c = t.node_of("ab"), t.node_of("c")
    assert t.children[t.root] == (ab, c)
    assert {t.element(x) for x in t.children[ab]} == {"a", "b"}
    labels = {"".join(sorted(t.leafset[x])): t.depth_label(x) for x in t.nodes}
    assert labels == {"abc": 0, "ab": 1, "c": 1, "a": 2, "b": 2}


def test_not_laminar():
    with pytest.raises(NotLaminar):
        build_laminar_tree(SetSystem("abc", ["abc", "a", "b", "c", "ab", "bc"]))


def test_tip_and_uptree(three_leaf_tree):
    t = three_leaf_tree
    ab, a = t.node_of("ab"), t.node_of("a")
    assert tip_and_uptree(t, "ab") == (t.root, frozenset({t.root, ab, a, t.node_of("b")}))
    assert tip_and_uptree(t, "a") == (ab, frozenset({ab, a}))
    with pytest.raises(TipUndefined):
        tip_and_uptree(t, "ac")


def test_classify_branch(three_leaf_tree):
    t = three_leaf_tree
    ab = t.node_of("ab")
    assert classify_branch(t, "abc", t.root).kind == FULLY
    single = classify_branch(t, "a", t.root)
    assert (single.kind, single.child) == (SINGLE, ab)
    assert classify_branch(t, "c", ab).kind == MISSED
    with pytest.raises(NotInnerNode):
        classify_branch(t, "a", t.node_of("a"))


def test_representative_tree_checks(three_leaf_tree):
    t = three_leaf_tree
    a, ab, c = t.node_of("a"), t.node_of("ab"), t.node_of("c")
    assert is_representative_tree(t, a, {a})
    assert not is_representative_tree(t, t.root, {t.root, ab, c})


def test_thin_examples():
    t = build_laminar_tree(system_from_nested([["a", "b"], ["c", "d"]]))
    assert is_thin(t, {t.root})
    assert is_thin(t, set())
    assert not is_thin(t, {t.node_of("ab"), t.node_of("cd")})
    with pytest.raises(ContainsLeaf):
        is_thin(t, {t.node_of("a")})


def test_thin_partition_small(three_leaf_tree):
    t = three_leaf_tree
    assert all(not p for p in thin_partition(build_laminar_tree(SetSystem("a", ["a"]))).parts)
    tp = thin_partition(t)
    assert len(tp.parts) == N_PARTS
    assert tp.parts[0] == {t.root}
    ab_part = tp.part_of(t.node_of("ab"))
    assert tp.parts[ab_part] == {t.node_of("ab")} and tp.part_label[ab_part] == 1
    assert all(is_thin(t, p) for p in tp.parts)


def test_representative_sets_of_root(three_leaf_tree):
    t = three_leaf_tree
    rep = build_representative_sets(t, {t.root})
    assert rep.trees[t.root] == {t.root, t.node_of("ab"), t.node_of("a"), t.node_of("b")}
    assert rep.sets[t.root] == {"a", "b"}
    assert tip_and_uptree(t, rep.sets[t.root])[0] == t.root
    assert build_representative_sets(t, set()).trees == {}
    with pytest.raises(NotThin):
        build_representative_sets(build_laminar_tree(system_from_nested([["a", "b"], ["c", "d"]])),
                                  {1, 4})


def test_identifying_colouring(three_leaf_tree):
    t = three_leaf_tree
    single = identifying_colouring(build_laminar_tree(SetSystem("a", ["a"])),
                                   thin_partition(build_laminar_tree(SetSystem("a", ["a"]))))
    assert not any(single.A) and not any(single.B)
    col = identifying_colouring(t, thin_partition(t))
    assert (col.A[0], col.B[0]) == ({"a", "b"}, {"a"})
    j = thin_partition(t).part_of(t.node_of("ab"))
    assert col.A[j] == {"a"} and col.B[j] == {"a"}


def test_tree_json_and_dot(three_leaf_tree):
    t = three_leaf_tree
    again = LaminarTree.from_json(t.to_json())
    assert again.to_json() == t.to_json()
    assert "{a,b}" in t.to_dot()


def _check_tree(system):
    t = build_laminar_tree(system)
    assert set(t.leafset.values()) == system.family
    for x in t.inner_nodes:
        assert len(t.children[x]) >= 2
    for x in t.nodes:
        for y in t.nodes:
            assert t.is_descendant(x, y) == (t.leafset[x] <= t.leafset[y])
    tp = thin_partition(t)
    covered = [x for p in tp.parts for x in p]
    assert sorted(covered) == sorted(t.inner_nodes)
    for part, label in zip(tp.parts, tp.part_label):
        assert is_thin(t, part)
        assert all(t.depth_label(x) == label for x in part)
        rep = build_representative_sets(t, part)
        used = set()
        for s in part:
            H = rep.trees[s]
            assert is_representative_tree(t, s, H)
            assert not H & used and not H & rep.parents
            used |= H
            assert tip_and_uptree(t, rep.sets[s])[0] == s
    col = identifying_colouring(t, tp)
    for part, A, B in zip(tp.parts, col.A, col.B):
        rep = build_representative_sets(t, part)
        assert B <= A
        assert all(len(B & rep.sets[s]) == 1 for s in part)


@given(laminar_systems(12))
def test_random_systems(system):
    _check_tree(system)


def test_exhaustive_small():
    for system in exhaustive_corpus(5):
        _check_tree(system)


@given(laminar_systems(10))
def test_branch_classes_exclusive(system):
    t = build_laminar_tree(system)
    for B in ("", "a", "ab", "abc"):
        B = set(B) & set(t.universe)
        for x in t.inner_nodes:
            hits = sum(1 for c in t.children[x] if t.leafset[c] & B)
            expected = {0: MISSED, 1: SINGLE, len(t.children[x]): FULLY}.get(hits, PARTIAL)
            assert classify_branch(t, B, x).kind == expected
