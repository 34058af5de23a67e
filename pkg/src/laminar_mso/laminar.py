"""Laminar set systems, laminar trees and the representative-set machinery.

Everything here is computed natively, without formulas; the formula library
is checked against these functions.

Tree nodes are integers numbered in preorder with children ordered by their
smallest leaf element, so "the first child" and "the child with the smallest
id" are the same node.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .structures import SET_VOCAB, Structure, make_structure

N_PARTS = 16


class LaminarError(ValueError):
    pass


class NotLaminar(LaminarError):
    pass


class TipUndefined(LaminarError):
    pass


class NotInnerNode(LaminarError):
    pass


class NotASubtree(LaminarError):
    pass


class ContainsLeaf(LaminarError):
    pass


class NotThin(LaminarError):
    pass


# -- set systems ----------------------------------------------------------

@dataclass(frozen=True)
class SetSystem:
    universe: tuple[str, ...]
    family: frozenset[frozenset[str]]

    def __init__(self, universe: Iterable[str], family: Iterable[Iterable[str]]):
        universe = tuple(sorted(set(universe)))
        if not universe:
            raise LaminarError("set systems need a nonempty universe")
        fam = frozenset(frozenset(s) for s in family)
        u = frozenset(universe)
        for s in fam:
            if not s <= u:
                raise LaminarError(f"member {sorted(s)} is not a subset of the universe")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "family", fam)

    def sorted_sets(self) -> list[list[str]]:
        return [list(t) for t in sorted((tuple(sorted(s)) for s in self.family),
                                        key=lambda t: (-len(t), t))]

    def to_json(self) -> dict:
        return {"universe": list(self.universe), "sets": self.sorted_sets()}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping) -> "SetSystem":
        if "vocabulary" in data:
            return cls.from_structure(Structure.from_json(dict(data)))
        return cls(data["universe"], data["sets"])

    def to_structure(self) -> Structure:
        return make_structure(SET_VOCAB, self.universe, {"SET": self.family})

    @classmethod
    def from_structure(cls, st: Structure) -> "SetSystem":
        return cls(st.universe, st.set_predicates.get("SET", ()))


def system_from_nested(nested) -> SetSystem:
    """Set system of a tree written as nested lists of element names.

    ``["a", ["b", "c"]]`` is a root with leaf ``a`` and a cherry on ``b, c``.
    """
    family: list[frozenset[str]] = []

    def walk(node) -> frozenset[str]:
        if isinstance(node, str):
            s = frozenset((node,))
        else:
            s = frozenset().union(*(walk(c) for c in node))
        family.append(s)
        return s

    universe = walk(nested)
    return SetSystem(universe, family)


def check_laminar(sys: SetSystem) -> bool:
    """U and all singletons are members, no member is empty, and no two members cross."""
    fam = sys.family
    if frozenset(sys.universe) not in fam:
        return False
    if any(frozenset((u,)) not in fam for u in sys.universe):
        return False
    if frozenset() in fam:
        return False
    for a, b in combinations(fam, 2):
        inter = a & b
        if inter and inter != a and inter != b:
            return False
    return True


# -- laminar trees --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LaminarTree:
    root: int
    parent: dict[int, int | None]
    children: dict[int, tuple[int, ...]]
    leafset: dict[int, frozenset[str]]
    leaf_of: dict[str, int]
    depth: dict[int, int]
    _node_of_set: dict[frozenset[str], int] = field(default_factory=dict, repr=False)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(range(len(self.parent)))

    @property
    def universe(self) -> tuple[str, ...]:
        return tuple(sorted(self.leaf_of))

    def depth_label(self, t: int) -> int:
        return self.depth[t] % 4

    def is_leaf(self, t: int) -> bool:
        return not self.children[t]

    @property
    def inner_nodes(self) -> tuple[int, ...]:
        return tuple(t for t in self.nodes if self.children[t])

    @property
    def leaves(self) -> tuple[int, ...]:
        return tuple(t for t in self.nodes if not self.children[t])

    def element(self, leaf: int) -> str:
        (e,) = self.leafset[leaf]
        return e

    def node_of(self, s: Iterable[str]) -> int:
        return self._node_of_set[frozenset(s)]

    def ancestors(self, t: int) -> list[int]:
        """t and its proper ancestors, bottom-up."""
        out = [t]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    def is_descendant(self, a: int, b: int) -> bool:
        """Whether a is a (reflexive) descendant of b."""
        return self.leafset[a] <= self.leafset[b] and self.depth[a] >= self.depth[b]

    def subtree(self, t: int) -> list[int]:
        out, stack = [], [t]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    def lca(self, elements: Iterable[str]) -> int:
        elements = frozenset(elements)
        if not elements:
            raise LaminarError("lca of an empty set")
        t = self.leaf_of[next(iter(elements))]
        while not elements <= self.leafset[t]:
            t = self.parent[t]
        return t

    def family(self) -> frozenset[frozenset[str]]:
        return frozenset(self.leafset.values())

    def to_system(self) -> SetSystem:
        return SetSystem(self.universe, self.leafset.values())

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "nodes": [{"id": t, "parent": self.parent[t], "leaves": sorted(self.leafset[t])}
                      for t in self.nodes],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping) -> "LaminarTree":
        sets = [n["leaves"] for n in data["nodes"]]
        universe = set().union(*map(set, sets))
        tree = build_laminar_tree(SetSystem(universe, sets))
        for n in data["nodes"]:
            t = tree.node_of(n["leaves"])
            if t != n["id"] or tree.parent[t] != n["parent"]:
                raise LaminarError(f"node {n['id']} does not match the canonical numbering")
        return tree

    def to_dot(self, name: str = "laminar") -> str:
        lines = [f"digraph {name} {{", "  node [shape=box];"]
        for t in self.nodes:
            label = ",".join(sorted(self.leafset[t]))
            shape = "" if self.children[t] else ", shape=ellipse"
            lines.append(f'  n{t} [label="{{{label}}}"{shape}];')
        for t in self.nodes:
            for c in self.children[t]:
                lines.append(f"  n{t} -> n{c};")
        lines.append("}")
        return "\n".join(lines)


def build_laminar_tree(sys: SetSystem) -> LaminarTree:
    """The laminar tree: parent of a member is its smallest strict superset."""
    if not check_laminar(sys):
        raise NotLaminar("the set system is not laminar")
    by_size = sorted(sys.family, key=len)
    parent_set: dict[frozenset, frozenset | None] = {}
    for i, s in enumerate(by_size):
        parent_set[s] = next((t for t in by_size[i + 1:] if s < t), None)
    kids: dict[frozenset, list[frozenset]] = {s: [] for s in by_size}
    for s, p in parent_set.items():
        if p is not None:
            kids[p].append(s)
    for k in kids.values():
        k.sort(key=min)

    root_set = frozenset(sys.universe)
    ids: dict[frozenset, int] = {}
    order: list[frozenset] = []
    stack = [root_set]
    while stack:
        s = stack.pop()
        ids[s] = len(order)
        order.append(s)
        stack.extend(reversed(kids[s]))

    parent = {ids[s]: (None if parent_set[s] is None else ids[parent_set[s]]) for s in order}
    children = {ids[s]: tuple(ids[c] for c in kids[s]) for s in order}
    depth: dict[int, int] = {}
    for s in order:
        p = parent[ids[s]]
        depth[ids[s]] = 0 if p is None else depth[p] + 1
    return LaminarTree(
        root=0,
        parent=parent,
        children=children,
        leafset={ids[s]: s for s in order},
        leaf_of={next(iter(s)): ids[s] for s in order if len(s) == 1},
        depth=depth,
        _node_of_set=dict(ids),
    )


# -- tips and branching ---------------------------------------------------

def tip_and_uptree(tree: LaminarTree, B: Iterable[str]) -> tuple[int, frozenset[int]]:
    B = frozenset(B)
    if not B:
        raise TipUndefined("tip of the empty set")
    top = tree.lca(B)
    tip = tree.parent[top]
    if tip is None:
        raise TipUndefined("the least common ancestor is the root")
    nodes = {tip}
    for e in B:
        for t in tree.ancestors(tree.leaf_of[e]):
            if t in nodes:
                break
            nodes.add(t)
    return tip, frozenset(nodes)


def tip(tree: LaminarTree, B: Iterable[str]) -> int | None:
    """Tip of B, or None where undefined (empty B, or the lca is the root)."""
    B = frozenset(B)
    if not B:
        return None
    return tree.parent[tree.lca(B)]


FULLY, SINGLE, MISSED, PARTIAL = "fully", "single", "missed", "partial"


@dataclass(frozen=True)
class BranchClass:
    kind: str
    child: int | None = None


def classify_branch(tree: LaminarTree, B: Iterable[str], node: int) -> BranchClass:
    """How the children of an inner node meet B.

    ``partial`` covers nodes with three or more children of which more than
    one but not all contain an element of B.
    """
    if tree.is_leaf(node):
        raise NotInnerNode(node)
    B = frozenset(B)
    hit = [c for c in tree.children[node] if tree.leafset[c] & B]
    if not hit:
        return BranchClass(MISSED)
    if len(hit) == 1:
        return BranchClass(SINGLE, hit[0])
    if len(hit) == len(tree.children[node]):
        return BranchClass(FULLY)
    return BranchClass(PARTIAL)


# -- representative trees and thin sets -----------------------------------

def is_representative_tree(tree: LaminarTree, s: int, H: Iterable[int]) -> bool:
    H = frozenset(H)
    if not H:
        raise NotASubtree("empty node set")
    tops = [t for t in H if tree.parent[t] not in H]
    if len(tops) != 1:
        raise NotASubtree("node set is not connected")
    if tops[0] != s:
        return False
    parity = tree.depth[s] % 2
    for t in H:
        if tree.is_leaf(t):
            continue
        inside = sum(1 for c in tree.children[t] if c in H)
        if tree.depth[t] % 2 == parity:
            if inside != 1:
                return False
        elif inside != len(tree.children[t]):
            return False
    return True


def is_thin(tree: LaminarTree, S: Iterable[int]) -> bool:
    S = frozenset(S)
    for s in S:
        if tree.is_leaf(s):
            raise ContainsLeaf(s)
    if len({tree.depth_label(s) for s in S}) > 1:
        return False
    for s in S:
        p = tree.parent[s]
        if p is None:
            continue
        if all(c in S for c in tree.children[p]):
            return False
        if p == tree.root:
            continue
        aunts = [a for a in tree.children[tree.parent[p]] if a != p]
        if not any(all(c not in S for c in tree.children[a]) for a in aunts):
            return False
    return True


@dataclass(frozen=True)
class ThinPartition:
    parts: tuple[frozenset[int], ...]
    part_label: tuple[int, ...]

    def part_of(self, t: int) -> int | None:
        """0-based index of the part holding node t."""
        for i, part in enumerate(self.parts):
            if t in part:
                return i
        return None

    def to_json(self) -> dict:
        return {"parts": [sorted(p) for p in self.parts], "labels": list(self.part_label)}


def thin_partition(tree: LaminarTree) -> ThinPartition:
    """Partition the inner nodes into 16 thin sets, four per depth label.

    Part ``4*i + m`` holds depth-label-``i`` nodes. Under each parent the
    first inner child goes to an even ``m`` and the remaining inner children
    to an odd ``m``; ``m < 2`` when the parent is the first child of the
    grandparent that has inner children, ``m >= 2`` otherwise. The root and
    its children are placed in parts 0 and 1 of their label.
    """
    parts: list[set[int]] = [set() for _ in range(N_PARTS)]
    inner = tree.inner_nodes
    root = tree.root
    for i in range(4):
        j1, j2 = (i - 1) % 4, (i - 2) % 4
        p1: set[int] = set()
        p2: set[int] = set()
        for t in inner:
            if tree.depth_label(t) != j1:
                continue
            kids = [c for c in tree.children[t] if not tree.is_leaf(c)]
            if kids:
                p1.add(kids[0])
                p2.update(kids[1:])
        if i == 0 and root in inner:
            p1.add(root)

        s1, s2, s3, s4 = (parts[4 * i + m] for m in range(4))
        for t in inner:
            if tree.depth_label(t) != j2:
                continue
            with_inner = [c for c in tree.children[t]
                          if any(not tree.is_leaf(g) for g in tree.children[c])]
            for k, c in enumerate(with_inner):
                for g in tree.children[c]:
                    if g in p1:
                        (s1 if k == 0 else s3).add(g)
                    elif g in p2:
                        (s2 if k == 0 else s4).add(g)
        if i == 0 and root in inner:
            s1.add(root)
        if i == 1:
            for c in tree.children[root]:
                if c in p1:
                    s1.add(c)
                elif c in p2:
                    s2.add(c)
    return ThinPartition(tuple(frozenset(p) for p in parts),
                         tuple(k // 4 for k in range(N_PARTS)))


@dataclass(frozen=True)
class RepAssignment:
    parents: frozenset[int]
    trees: dict[int, frozenset[int]]
    sets: dict[int, frozenset[str]]

    def __iter__(self):
        return iter(sorted(self.trees))

    def to_json(self) -> dict:
        return {"parents": sorted(self.parents),
                "reps": [{"node": s, "tree": sorted(self.trees[s]), "set": sorted(self.sets[s])}
                         for s in self]}


def build_representative_sets(tree: LaminarTree, S: Iterable[int]) -> RepAssignment:
    """Pairwise disjoint representative trees for a thin set, grown level by level.

    Relative to the common depth label i of S, a node with label i takes its
    first child, label i+2 its first child outside the parent set P of S, and
    labels i+1, i+3 take all children.
    """
    S = frozenset(S)
    if not is_thin(tree, S):
        raise NotThin(sorted(S))
    if not S:
        return RepAssignment(frozenset(), {}, {})
    i = tree.depth_label(next(iter(S)))
    P = frozenset(tree.parent[s] for s in S if tree.parent[s] is not None)
    trees: dict[int, frozenset[int]] = {}
    sets: dict[int, frozenset[str]] = {}
    for s in S:
        H = {s}
        level = [s]
        while level:
            nxt = []
            for t in level:
                kids = tree.children[t]
                if not kids:
                    continue
                rel = (tree.depth_label(t) - i) % 4
                if rel == 0:
                    nxt.append(kids[0])
                elif rel == 2:
                    nxt.append(next(c for c in kids if c not in P))
                else:
                    nxt.extend(kids)
            H.update(nxt)
            level = nxt
        trees[s] = frozenset(H)
        sets[s] = frozenset(tree.element(t) for t in H if tree.is_leaf(t))
    return RepAssignment(P, trees, sets)


@dataclass(frozen=True)
class IdentifyingColouring:
    A: tuple[frozenset[str], ...]
    B: tuple[frozenset[str], ...]

    @property
    def parts(self) -> int:
        return len(self.A)

    def interpretations(self) -> dict[str, list[tuple[str]]]:
        """Unary relations A_1..A_p, B_1..B_p."""
        out: dict[str, list[tuple[str]]] = {}
        for k, (a, b) in enumerate(zip(self.A, self.B), start=1):
            out[f"A_{k}"] = [(e,) for e in sorted(a)]
            out[f"B_{k}"] = [(e,) for e in sorted(b)]
        return out

    def to_json(self) -> dict:
        return {"A": [sorted(a) for a in self.A], "B": [sorted(b) for b in self.B]}

    @classmethod
    def from_json(cls, data: Mapping) -> "IdentifyingColouring":
        return cls(tuple(frozenset(a) for a in data["A"]),
                   tuple(frozenset(b) for b in data["B"]))


def identifying_colouring(tree: LaminarTree, tp: ThinPartition) -> IdentifyingColouring:
    A, B = [], []
    for part in tp.parts:
        rep = build_representative_sets(tree, part)
        A.append(frozenset().union(*rep.sets.values()) if part else frozenset())
        B.append(frozenset(min(rep.sets[s]) for s in part))
    return IdentifyingColouring(tuple(A), tuple(B))


def representatives(tree: LaminarTree, tp: ThinPartition) -> list[RepAssignment]:
    return [build_representative_sets(tree, part) for part in tp.parts]


def compact_colouring(col: IdentifyingColouring, parts: int) -> IdentifyingColouring:
    """Move the nonempty colour pairs into the first slots of a ``parts``-slot colouring."""
    used = [(a, b) for a, b in zip(col.A, col.B) if a or b]
    if len(used) > parts:
        raise LaminarError(f"{len(used)} nonempty thin parts do not fit into {parts} slots")
    used += [(frozenset(), frozenset())] * (parts - len(used))
    return IdentifyingColouring(tuple(a for a, _ in used), tuple(b for _, b in used))


def leaf_subsets(tree: LaminarTree) -> Sequence[frozenset[str]]:
    u = tree.universe
    return [frozenset(c) for k in range(len(u) + 1) for c in combinations(u, k)]
