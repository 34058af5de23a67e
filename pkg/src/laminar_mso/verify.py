"""Corpora, brute-force oracles and the acceptance checks.

Oracles use only the structures and laminar primitives, never the formula
library, so agreement between a formula and its oracle is real evidence.
"""
from __future__ import annotations

import json
import random
import string
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations, product
from typing import Callable, Iterable, Iterator, Sequence

from . import formulas as fl
from .laminar import (FULLY, MISSED, N_PARTS, SINGLE, IdentifyingColouring, LaminarTree,
                      SetSystem, build_laminar_tree, build_representative_sets, classify_branch,
                      compact_colouring, identifying_colouring,
                      is_representative_tree, is_thin, thin_partition, tip)
from .logic.evaluator import Evaluator, ResourceLimitExceeded, subsets_in_order
from .logic.parser import parse_formula
from .logic.printer import pretty, to_text
from .structures import DESC_VOCAB, SET_VOCAB, Structure, make_structure
from .transduction import (coloured_structure, desc_part, laminar_to_tree, rooted_tree_iso,
                           tree_structure, tree_to_setsystem)

MAX_ENUMERATE = 8


class RangeError(ValueError):
    pass


# -- corpora --------------------------------------------------------------

def element_names(n: int) -> list[str]:
    if n <= 26:
        return list(string.ascii_lowercase[:n])
    return [f"e{k:03d}" for k in range(n)]


def _partitions(items: Sequence[str]) -> Iterator[list[list[str]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in _partitions(rest):
        for k in range(len(p)):
            yield p[:k] + [[first] + p[k]] + p[k + 1:]
        yield [[first]] + p


def _families(items: Sequence[str]) -> Iterator[list[frozenset[str]]]:
    """Member lists of every laminar tree on ``items`` without unary inner nodes."""
    if len(items) == 1:
        yield [frozenset(items)]
        return
    for blocks in _partitions(items):
        if len(blocks) < 2:
            continue
        for subs in product(*(list(_families(b)) for b in blocks)):
            yield [frozenset(items)] + [m for sub in subs for m in sub]


def iter_laminar(n: int) -> Iterator[SetSystem]:
    if not 1 <= n <= MAX_ENUMERATE:
        raise RangeError(f"leaf count {n} outside 1..{MAX_ENUMERATE}")
    u = element_names(n)
    for fam in _families(u):
        yield SetSystem(u, fam)


@dataclass
class Corpus:
    name: str
    provenance: str
    systems: list[SetSystem]

    def __len__(self) -> int:
        return len(self.systems)

    def __iter__(self):
        return iter(self.systems)

    def to_json(self) -> dict:
        return {"name": self.name, "provenance": self.provenance,
                "systems": [s.to_json() for s in self.systems]}


def enumerate_laminar(n: int) -> Corpus:
    return Corpus(f"exhaustive-{n}", f"exhaustive-{n}", list(iter_laminar(n)))


def exhaustive_corpus(max_leaves: int) -> Corpus:
    systems = [s for n in range(1, max_leaves + 1) for s in iter_laminar(n)]
    return Corpus(f"exhaustive-<={max_leaves}", f"exhaustive-{max_leaves}", systems)


@dataclass(frozen=True)
class ArityBias:
    """Child counts: 2 with probability ``binary``, else uniform in 3..max_arity."""
    binary: float = 0.5
    max_arity: int = 4


def gen_laminar(seed: int, n: int, bias: ArityBias = ArityBias()) -> SetSystem:
    """Random laminar system on ``n`` leaves; deterministic per seed."""
    if n < 1:
        raise RangeError("need at least one leaf")
    rng = random.Random(seed)
    u = element_names(n)
    family: list[frozenset[str]] = []

    def split(block: list[str]) -> None:
        family.append(frozenset(block))
        if len(block) == 1:
            return
        top = min(len(block), bias.max_arity)
        k = 2 if top == 2 or rng.random() < bias.binary else rng.randint(3, top)
        order = block[:]
        rng.shuffle(order)
        cuts = sorted(rng.sample(range(1, len(order)), k - 1))
        for lo, hi in zip([0] + cuts, cuts + [len(order)]):
            split(sorted(order[lo:hi]))

    split(u)
    return SetSystem(u, family)


def random_corpus(seed: int, count: int, max_leaves: int, bias: ArityBias = ArityBias()) -> Corpus:
    rng = random.Random(seed)
    systems = [gen_laminar(rng.getrandbits(32), rng.randint(1, max_leaves), bias)
               for _ in range(count)]
    return Corpus(f"random-{seed}", f"random seed={seed} count={count} n<={max_leaves}", systems)


# -- rooted trees with unary nodes (for counting) -------------------------

@dataclass(frozen=True)
class RootedTree:
    """Parent array; node 0 is the root."""
    parent: tuple[int | None, ...]

    @property
    def size(self) -> int:
        return len(self.parent)

    def children(self, v: int) -> list[int]:
        return [c for c, p in enumerate(self.parent) if p == v]

    def leaves(self) -> list[int]:
        return [v for v in range(self.size) if not self.children(v)]

    def max_degree(self) -> int:
        return max(len(self.children(v)) for v in range(self.size))

    def name(self, v: int) -> str:
        return f"n{v}"

    def structure(self) -> Structure:
        pairs = []
        for v in range(self.size):
            a = v
            while a is not None:
                pairs.append((self.name(v), self.name(a)))
                a = self.parent[a]
        return make_structure(DESC_VOCAB, [self.name(v) for v in range(self.size)], {fl.DESC: pairs})

    def shape(self, v: int = 0) -> str:
        return "(" + "".join(sorted(self.shape(c) for c in self.children(v))) + ")"


def rooted_trees(max_nodes: int) -> list[RootedTree]:
    """Every rooted tree with at most ``max_nodes`` nodes, one per isomorphism class."""
    seen: dict[str, RootedTree] = {}
    layer = [RootedTree((None,))]
    seen[layer[0].shape()] = layer[0]
    for _ in range(max_nodes - 1):
        nxt = []
        for t in layer:
            for v in range(t.size):
                grown = RootedTree(t.parent + (v,))
                key = grown.shape()
                if key not in seen:
                    seen[key] = grown
                    nxt.append(grown)
        layer = nxt
    return list(seen.values())


# -- native oracles -------------------------------------------------------

def leafset(tree: LaminarTree, t: int) -> frozenset[str]:
    return frozenset(tree.element(x) for x in tree.subtree(t) if tree.is_leaf(x))


def _lemma_conditions(tree: LaminarTree, A: frozenset[str], B: frozenset[str], s: int) -> bool:
    """Conditions (i)-(iv) of the characterisation, checked on the tree."""
    if not B <= A:
        return False
    if tip(tree, B) != s:
        return False
    for t in tree.subtree(s):
        if tree.is_leaf(t):
            continue
        kind = classify_branch(tree, B, t).kind
        kids = tree.children[t]
        leaf_in = [c for c in kids if tree.is_leaf(c) and tree.element(c) in B]
        if kind == FULLY:
            for c in kids:
                if c in leaf_in:
                    continue
                if tree.is_leaf(c) or classify_branch(tree, B, c).kind != SINGLE:
                    return False
        elif kind == SINGLE:
            good = [c for c in kids if c in leaf_in
                    or (not tree.is_leaf(c) and classify_branch(tree, B, c).kind == FULLY)]
            if len(good) != 1:
                return False
            for c in kids:
                if c == good[0]:
                    continue
                if tree.is_leaf(c):
                    if tree.element(c) in B:
                        return False
                elif classify_branch(tree, B, c).kind != MISSED:
                    return False
    return True


@dataclass
class CheckResult:
    name: str
    instances: int = 0
    passed: int = 0
    seconds: float = 0.0
    counterexample: dict | None = None
    skipped: str | None = None
    warnings: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.skipped is None and self.passed == self.instances

    def record(self, good: bool, witness: Callable[[], dict] | None = None) -> None:
        self.instances += 1
        if good:
            self.passed += 1
        elif self.counterexample is None and witness is not None:
            self.counterexample = witness()

    def line(self) -> str:
        if self.skipped is not None:
            verdict = f"SKIP ({self.skipped})"
        else:
            verdict = "PASS" if self.ok else "FAIL"
        return f"{verdict:4} {self.name}: {self.passed}/{self.instances} in {self.seconds:.1f}s"


def oracle_unique_rep(tree: LaminarTree, S: Iterable[int], rep=None) -> CheckResult:
    """(B, s) satisfies the characterisation iff s is in S and B is its representative set.

    Maximality is checked against every proper superset B' and ancestor s'.
    """
    S = frozenset(S)
    if rep is None:
        rep = build_representative_sets(tree, S)
    A = frozenset().union(*rep.sets.values()) if rep.sets else frozenset()
    leaves = tree.universe
    subsets = [frozenset(c) for k in range(len(leaves) + 1) for c in combinations(leaves, k)]
    base = {(B, s): _lemma_conditions(tree, A, B, s) for B in subsets for s in tree.nodes}
    res = CheckResult("unique_rep")
    for (B, s), ok in base.items():
        full = ok and not any(
            base[(B2, s2)] for B2 in subsets if B < B2 for s2 in tree.ancestors(s) + [s])
        expected = s in S and rep.sets[s] == B
        res.record(full == expected, lambda: {
            "tree": tree.to_json(), "S": sorted(S), "B": sorted(B), "s": s,
            "oracle": full, "expected": expected})
    return res


def native_leader(tree: LaminarTree, col: IdentifyingColouring, i: int, r: str,
                  X: frozenset[str]) -> bool:
    """r leads the member X in part i; part 0 are the leaves."""
    nodes = {leafset(tree, t): t for t in tree.nodes}
    if X not in nodes:
        return False
    t = nodes[X]
    if i == 0:
        return tree.is_leaf(t) and X == {r}
    if r not in col.B[i - 1]:
        return False
    tp = thin_partition(tree)
    part = tp.parts[i - 1]
    if t not in part:
        return False
    return r in build_representative_sets(tree, part).sets[t]


def evenleaf_native(t: RootedTree, X: frozenset[int], k: int) -> bool:
    """Exhaustive search for a parity witness S over all node sets."""
    leaves = set(t.leaves())
    kids = [t.children(v) for v in range(t.size)]
    for bits in range(1 << t.size):
        S = {v for v in range(t.size) if bits >> v & 1}
        if 0 in S:
            continue
        if any((v in S) != (v in X) for v in leaves):
            continue
        ok = True
        for v in range(t.size):
            if v in leaves:
                continue
            n = sum(1 for c in kids[v] if c in S)
            if (v in S) != (n % 2 == 1 and n <= k):
                ok = False
                break
        if ok:
            return True
    return False


# -- configuration and report ---------------------------------------------

@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    parts: int = N_PARTS
    end_to_end_leaves: int = 6
    unique_rep_leaves: int = 5
    exhaustive_leaves: int = 6
    random_count: int = 500
    random_leaves: int = 12
    chi_leaves: int = 5
    mutants: int = 20
    formula_leaves: int = 5
    counting_nodes: int = 8
    counting_degrees: tuple[int, ...] = (1, 2, 3)
    guard_leaves: int = 4
    guard_any_elements: int = 4
    guard_colour_elements: int = 3
    guard_budget: int = 256
    guard_random: int = 200
    guard_random_elements: int = 6
    checks: tuple[str, ...] | None = None
    max_subset_universe: int | None = None


@dataclass
class VerificationReport:
    config: VerifyConfig
    results: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_json(self) -> dict:
        return {"ok": self.ok, "config": asdict(self.config),
                "checks": [asdict(r) | {"ok": r.ok} for r in self.results]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, default=sorted)

    def to_text(self) -> str:
        lines = [r.line() for r in self.results]
        for r in self.results:
            lines += [f"  warning ({r.name}): {w}" for w in r.warnings]
            if r.counterexample is not None:
                lines.append(f"  counterexample ({r.name}): {json.dumps(r.counterexample, default=sorted)}")
        lines.append("ALL PASS" if self.ok else "FAILURES")
        return "\n".join(lines)


# -- checks ---------------------------------------------------------------

def _corpora(cfg: VerifyConfig) -> list[SetSystem]:
    return (exhaustive_corpus(cfg.exhaustive_leaves).systems
            + random_corpus(cfg.seed, cfg.random_count, cfg.random_leaves).systems)


def check_end_to_end(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("end_to_end")
    for system in exhaustive_corpus(cfg.end_to_end_leaves):
        out = laminar_to_tree(system.to_structure(), parts=cfg.parts,
                              max_subset_universe=cfg.max_subset_universe)
        tree = build_laminar_tree(system)
        good = (out.size == len(system.family)
                and rooted_tree_iso(desc_part(out), tree)
                and out.set_predicates[fl.SET] == system.family)
        res.record(good, lambda: {"system": system.to_json(), "output": out.to_json()})
    return res


def check_unique_rep(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("unique_rep")
    for system in exhaustive_corpus(cfg.unique_rep_leaves):
        tree = build_laminar_tree(system)
        for part in thin_partition(tree).parts:
            if not part:
                continue
            sub = oracle_unique_rep(tree, part)
            res.record(sub.ok, lambda: sub.counterexample)
    return res


def check_thin_partition(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("thin_partition")
    for system in _corpora(cfg):
        tree = build_laminar_tree(system)
        tp = thin_partition(tree)
        covered = [t for p in tp.parts for t in p]
        good = (all(is_thin(tree, p) for p in tp.parts if p)
                and len(covered) == len(set(covered))
                and set(covered) == set(tree.inner_nodes))
        res.record(good, lambda: {"system": system.to_json(), "parts": tp.to_json()})
    return res


def check_representative_trees(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("representative_trees")
    for system in _corpora(cfg):
        tree = build_laminar_tree(system)
        good = True
        for part in thin_partition(tree).parts:
            if not part:
                continue
            rep = build_representative_sets(tree, part)
            trees = list(rep.trees.values())
            good &= all(is_representative_tree(tree, s, rep.trees[s]) for s in part)
            good &= all(not (a & b) for a, b in combinations(trees, 2))
            good &= all(not (h & rep.parents) for h in trees)
            good &= all(tip(tree, rep.sets[s]) == s for s in part)
        res.record(good, lambda: {"system": system.to_json()})
    return res


def colouring_mutants(col: IdentifyingColouring, tree: LaminarTree,
                      limit: int) -> list[tuple[str, IdentifyingColouring]]:
    """Colourings that lose a leader or give a member two leaders.

    Kinds: drop a leader; move it outside the part's colour; add a second
    leader from the same representative set; copy a part into one or two
    empty slots.
    """
    A, B = list(col.A), list(col.B)
    reps = [build_representative_sets(tree, p) for p in thin_partition(tree).parts]
    out: dict[str, tuple[str, IdentifyingColouring]] = {}

    def add(kind: str, A2, B2) -> None:
        m = IdentifyingColouring(tuple(A2), tuple(B2))
        if m != col:
            out.setdefault(json.dumps(m.to_json()), (kind, m))

    universe = tree.universe
    for i, rep in enumerate(reps):
        for s in rep:
            lead = min(rep.sets[s])
            B2 = B[:]
            B2[i] = B[i] - {lead}
            add("drop", A, B2)
            for e in universe:
                if e not in A[i]:
                    B3 = B2[:]
                    B3[i] = B2[i] | {e}
                    add("outside", A, B3)
            for e in sorted(rep.sets[s] - {lead}):
                B4 = B[:]
                B4[i] = B[i] | {e}
                add("second", A, B4)
    empty = [j for j in range(len(A)) if not A[j] and not B[j]]
    for i in range(len(A)):
        if A[i]:
            for j in empty:
                A2, B2 = A[:], B[:]
                A2[j], B2[j] = A[i], B[i]
                add("duplicate", A2, B2)
            for j, k in combinations(empty, 2):
                A2, B2 = A[:], B[:]
                A2[j], B2[j] = A2[k], B2[k] = A[i], B[i]
                add("triplicate", A2, B2)
    # interleave kinds so a small limit still covers each of them
    by_kind: dict[str, list] = {}
    for kind, m in out.values():
        by_kind.setdefault(kind, []).append((kind, m))
    picked = []
    while len(picked) < limit and any(by_kind.values()):
        for kind in sorted(by_kind):
            if by_kind[kind] and len(picked) < limit:
                picked.append(by_kind[kind].pop(0))
    return picked


def check_chi_filter(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("chi_filter")
    lib = fl.FormulaLibraryConfig(cfg.parts)
    chi = fl.chi_sentence(lib)
    short = 0
    for system in exhaustive_corpus(cfg.chi_leaves):
        tree = build_laminar_tree(system)
        col = identifying_colouring(tree, thin_partition(tree))
        if cfg.parts != N_PARTS:
            col = compact_colouring(col, cfg.parts)
        ev = Evaluator(coloured_structure(system, col), max_subset_universe=cfg.max_subset_universe)
        res.record(ev.evaluate(chi), lambda: {"system": system.to_json(), "colouring": col.to_json(),
                                              "expected": True})
        mutants = colouring_mutants(col, tree, cfg.mutants)
        # too few mutants is a failed instance, not a pass
        short += len(mutants) < cfg.mutants
        res.record(len(mutants) >= cfg.mutants, lambda: {
            "system": system.to_json(), "mutants": len(mutants), "required": cfg.mutants})
        for kind, m in mutants:
            ev = Evaluator(coloured_structure(system, m), max_subset_universe=cfg.max_subset_universe)
            res.record(not ev.evaluate(chi), lambda: {"system": system.to_json(), "mutant": kind,
                                                      "colouring": m.to_json(), "expected": False})
    if short:
        res.warnings.append(f"{short} instances have fewer than {cfg.mutants} distinct mutants")
    res.details["short_instances"] = short
    return res


def check_round_trip(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("round_trip")
    for system in _corpora(cfg):
        tree = build_laminar_tree(system)
        back = SetSystem.from_structure(tree_to_setsystem(tree_structure(tree),
                                                          max_subset_universe=cfg.max_subset_universe))
        again = build_laminar_tree(back)
        res.record(back == system and rooted_tree_iso(again, tree),
                   lambda: {"system": system.to_json(), "back": back.to_json()})
    return res


def _all_sets(universe: Sequence[str]) -> list[frozenset[str]]:
    return subsets_in_order(universe)


def check_formula_vs_native(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("formula_vs_native")
    lib = fl.FormulaLibraryConfig(cfg.parts)
    set_unary = {"ROOT": fl.root_set("X"), "LEAF": fl.leaf_set("X")}
    set_binary = {"DESC": fl.desc_set("X", "Y"), "PDESC": fl.proper_desc_set("X", "Y"),
                  "ANC": fl.anc_set("X", "Y"), "CHILD": fl.child_set("X", "Y"),
                  "PARENT": fl.parent_set("X", "Y")}
    tree_preds = {"root": fl.root("x"), "leaf": fl.leaf("x"), "child": fl.child("x", "y")}
    leaders = [fl.leader_formula(i, config=lib) for i in range(cfg.parts + 1)]
    for system in exhaustive_corpus(cfg.formula_leaves):
        tree = build_laminar_tree(system)
        tp = thin_partition(tree)
        col = identifying_colouring(tree, tp)
        if cfg.parts != N_PARTS:
            col = compact_colouring(col, cfg.parts)
        ev = Evaluator(coloured_structure(system, col), max_subset_universe=cfg.max_subset_universe)
        node = {leafset(tree, t): t for t in tree.nodes}
        subsets = _all_sets(tree.universe)

        def fail(name, **args):
            return lambda: {"system": system.to_json(), "predicate": name,
                            "args": {k: sorted(v) if isinstance(v, frozenset) else v
                                     for k, v in args.items()}}

        for X in subsets:
            t = node.get(X)
            native = {"ROOT": t == tree.root, "LEAF": t is not None and tree.is_leaf(t)}
            for name, f in set_unary.items():
                res.record(ev.evaluate(f, {"X": X}) == native[name], fail(name, X=X))
            for Y in subsets:
                u = node.get(Y)
                both = t is not None and u is not None
                native = {
                    "DESC": both and tree.is_descendant(t, u),
                    "PDESC": both and t != u and tree.is_descendant(t, u),
                    "ANC": both and tree.is_descendant(u, t),
                    "CHILD": both and tree.parent[t] == u,
                    "PARENT": both and tree.parent[u] == t,
                }
                for name, f in set_binary.items():
                    res.record(ev.evaluate(f, {"X": X, "Y": Y}) == native[name], fail(name, X=X, Y=Y))
        for i in range(1, cfg.parts + 1):
            A = col.A[i - 1]
            colour = lib.colour_a(i)
            branch = {k: fl.branch_formula(k, colour) for k in (FULLY, SINGLE, MISSED)}
            leaf_a = fl.leaf_in("X", colour)
            rep_star = fl.rep_formula(colour, True)
            part = tp.parts[i - 1] if cfg.parts == N_PARTS else None
            rep = build_representative_sets(tree, part) if part else None
            for X in subsets:
                t = node.get(X)
                inner = t is not None and not tree.is_leaf(t)
                kind = classify_branch(tree, A, t).kind if inner else None
                for k, f in branch.items():
                    res.record(ev.evaluate(f, {"X": X}) == (kind == k), fail(f"{k}_{colour}", X=X))
                res.record(ev.evaluate(leaf_a, {"X": X}) == (t is not None and tree.is_leaf(t) and X <= A),
                           fail(f"LEAF_{colour}", X=X))
                if rep is None:
                    continue
                for R in subsets:
                    expected = t in part and rep.sets[t] == R
                    res.record(ev.evaluate(rep_star, {"R": R, "X": X}) == expected,
                               fail(f"REP*_{colour}", R=R, X=X))
        if cfg.parts == N_PARTS:
            for i, f in enumerate(leaders):
                for r in tree.universe:
                    for X in subsets:
                        res.record(ev.evaluate(f, {"r": r, "X": X}) == native_leader(tree, col, i, r, X),
                                   fail(f"leader_{i}", r=r, X=X))
        one = fl.FormulaLibraryConfig(1)
        any_branch = {k: fl.branch_formula(k, one.colour_a(1)) for k in (FULLY, SINGLE, MISSED)}
        any_leaf = fl.leaf_in("X", one.colour_a(1))
        for A in subsets:
            aev = Evaluator(make_structure(one.coloured_vocabulary(), system.universe, {
                fl.SET: system.family, one.colour_a(1): [(e,) for e in A]}))
            for X in subsets:
                t = node.get(X)
                inner = t is not None and not tree.is_leaf(t)
                kind = classify_branch(tree, A, t).kind if inner else None
                for k, f in any_branch.items():
                    res.record(aev.evaluate(f, {"X": X}) == (kind == k), fail(f"{k}_A", A=A, X=X))
                res.record(aev.evaluate(any_leaf, {"X": X}) == (t is not None and tree.is_leaf(t) and X <= A),
                           fail("LEAF_A", A=A, X=X))
        ts = tree_structure(tree)
        tev = Evaluator(ts)
        names = {t: (tree.element(t) if tree.is_leaf(t) else f"@{t}") for t in tree.nodes}
        for t in tree.nodes:
            x = names[t]
            res.record(tev.evaluate(tree_preds["root"], {"x": x}) == (t == tree.root), fail("root", x=x))
            res.record(tev.evaluate(tree_preds["leaf"], {"x": x}) == tree.is_leaf(t), fail("leaf", x=x))
            for u in tree.nodes:
                y = names[u]
                res.record(tev.evaluate(tree_preds["child"], {"x": x, "y": y}) == (tree.parent[t] == u),
                           fail("child", x=x, y=y))
    return res


def check_even_leaf(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("even_leaf")
    trees = rooted_trees(cfg.counting_nodes)
    for k in cfg.counting_degrees:
        f = fl.evenleaf(k)
        for t in trees:
            if t.max_degree() > k:
                continue
            ev = Evaluator(t.structure(), max_subset_universe=cfg.max_subset_universe)
            leaves = t.leaves()
            for m in range(len(leaves) + 1):
                for X in combinations(leaves, m):
                    X_names = frozenset(t.name(v) for v in X)
                    res.record(ev.evaluate(f, {"X": X_names}) == (m % 2 == 0), lambda: {
                        "k": k, "parent": list(t.parent), "X": sorted(X_names)})
    # sharpness: degree 3 exceeds k = 1, and the formula is fooled
    star = RootedTree((None, 0, 0, 0))
    X = frozenset(star.leaves())
    formula = Evaluator(star.structure()).evaluate(fl.evenleaf(1), {"X": frozenset(star.name(v) for v in X)})
    native = evenleaf_native(star, X, 1)
    res.details["sharpness"] = {"formula": formula, "witness_search": native, "leaves": len(X)}
    res.record(formula and native and len(X) % 2 == 1, lambda: res.details["sharpness"])
    return res


def _guard_structures(cfg: VerifyConfig, rng: random.Random):
    """(kind, structure) pairs: exhaustive small ones, then random ones."""
    lib = fl.FormulaLibraryConfig(1)
    vocab = lib.coloured_vocabulary()
    for n in range(1, cfg.guard_any_elements + 1):
        u = element_names(n)
        sets = _all_sets(u)
        pairs = list(product(u, repeat=2))
        colourings = ([(a, b) for a in sets for b in sets] if n <= cfg.guard_colour_elements
                      else None)
        for bits in product((0, 1), repeat=len(sets)):
            family = [s for s, on in zip(sets, bits) if on]
            yield fl.SET_LEVEL, make_structure(SET_VOCAB, u, {fl.SET: family})
            for A, B in colourings or [(rng.choice(sets), rng.choice(sets))]:
                yield fl.COLOURED, make_structure(vocab, u, {
                    fl.SET: family, "A_1": [(e,) for e in A], "B_1": [(e,) for e in B]})
        for bits in product((0, 1), repeat=len(pairs)):
            yield fl.TREE_LEVEL, make_structure(DESC_VOCAB, u, {fl.DESC: [p for p, on in zip(pairs, bits) if on]})
    for system in exhaustive_corpus(cfg.guard_leaves):
        yield fl.SET_LEVEL, system.to_structure()
        u = list(system.universe)
        for a_bits in product((0, 1), repeat=len(u)):
            A = [e for e, on in zip(u, a_bits) if on]
            for b_bits in product((0, 1), repeat=len(u)):
                B = [e for e, on in zip(u, b_bits) if on]
                yield fl.COLOURED, make_structure(vocab, u, {
                    fl.SET: system.family, "A_1": [(e,) for e in A], "B_1": [(e,) for e in B]})
        yield fl.TREE_LEVEL, tree_structure(build_laminar_tree(system))
    for t in rooted_trees(cfg.guard_leaves):
        yield fl.TREE_LEVEL, t.structure()
    for _ in range(cfg.guard_random):
        n = rng.randint(1, cfg.guard_random_elements)
        u = element_names(n)
        sets = _all_sets(u)
        family = [s for s in sets if rng.random() < 0.3]
        A = [(e,) for e in u if rng.random() < 0.5]
        B = [(e,) for e in u if rng.random() < 0.5]
        yield fl.COLOURED, make_structure(vocab, u, {fl.SET: family, "A_1": A, "B_1": B})
        yield fl.SET_LEVEL, make_structure(SET_VOCAB, u, {fl.SET: family})
        desc = [(a, b) for a in u for b in u if a == b or rng.random() < 0.3]
        yield fl.TREE_LEVEL, make_structure(DESC_VOCAB, u, {fl.DESC: desc})


def _assignments(f, universe: Sequence[str], rng: random.Random, budget: int):
    """All assignments of the free variables, or ``budget`` random ones if there are more."""
    evars = sorted(v for v in f.free if v[0].islower())
    svars = sorted(v for v in f.free if v[0].isupper())
    sets = _all_sets(universe)
    total = len(universe) ** len(evars) * len(sets) ** len(svars)
    if total <= budget:
        for ev in product(universe, repeat=len(evars)):
            for sv in product(sets, repeat=len(svars)):
                yield dict(zip(evars, ev)) | dict(zip(svars, sv))
        return
    for _ in range(budget):
        yield ({v: rng.choice(universe) for v in evars}
               | {v: rng.choice(sets) for v in svars})


def check_guarded_ranges(cfg: VerifyConfig) -> CheckResult:
    """Guarded and unguarded evaluation agree on every library formula.

    Structures: every family and every binary relation on at most
    ``guard_any_elements`` elements, each family under every one-part
    colouring up to ``guard_colour_elements`` elements and under one seeded
    colouring beyond, every laminar system on at most ``guard_leaves``
    leaves under every one-part colouring, and random structures. Each formula gets every assignment when there are at most
    ``guard_budget`` of them, else that many random ones.
    """
    res = CheckResult("guarded_ranges")
    rng = random.Random(cfg.seed)
    catalogue = fl.library(1)
    for kind, st in _guard_structures(cfg, rng):
        fast = Evaluator(st, guarded=True)
        slow = Evaluator(st, guarded=False)
        for name, (fkind, f) in catalogue.items():
            if fkind != kind:
                continue
            # assignments are drawn from the universe, so the closures can be called directly
            quick, naive = fast.compile(f), slow.compile(f)
            for a in _assignments(f, st.universe, rng, cfg.guard_budget):
                res.record(quick(a) == naive(a), lambda: {
                    "formula": name, "structure": st.to_json(),
                    "assignment": {k: sorted(v) if isinstance(v, frozenset) else v for k, v in a.items()}})
    return res


def check_serialization(cfg: VerifyConfig) -> CheckResult:
    res = CheckResult("serialization")
    for system in _corpora(cfg):
        st = system.to_structure()
        tree = build_laminar_tree(system)
        col = identifying_colouring(tree, thin_partition(tree))
        good = (SetSystem.from_json(json.loads(system.dumps())) == system
                and Structure.loads(st.dumps()) == st
                and Structure.loads(st.dumps()).dumps() == st.dumps()
                and LaminarTree.from_json(json.loads(tree.dumps())).dumps() == tree.dumps()
                and IdentifyingColouring.from_json(col.to_json()) == col)
        res.record(good, lambda: {"system": system.to_json()})
    for name, (_, f) in sorted(fl.library(2).items()):
        text = to_text(f)
        good = parse_formula(text) == f and to_text(parse_formula(text)) == text
        good &= parse_formula(pretty(f)) == f
        res.record(good, lambda: {"formula": name, "text": text})
    return res


CHECKS: dict[str, Callable[[VerifyConfig], CheckResult]] = {
    "end_to_end": check_end_to_end,
    "unique_rep": check_unique_rep,
    "thin_partition": check_thin_partition,
    "representative_trees": check_representative_trees,
    "chi_filter": check_chi_filter,
    "round_trip": check_round_trip,
    "formula_vs_native": check_formula_vs_native,
    "even_leaf": check_even_leaf,
    "guarded_ranges": check_guarded_ranges,
    "serialization": check_serialization,
}


def run_check(name: str, cfg: VerifyConfig) -> CheckResult:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; known: {sorted(CHECKS)}")
    t0 = time.perf_counter()
    try:
        res = CHECKS[name](cfg)
    except ResourceLimitExceeded as exc:
        res = CheckResult(name, skipped=str(exc))
    res.seconds = time.perf_counter() - t0
    if res.instances == 0 and res.skipped is None:
        res.warnings.append("no instances: pass is vacuous")
    return res


def run_verification_suite(cfg: VerifyConfig = VerifyConfig()) -> VerificationReport:
    names = sorted(cfg.checks) if cfg.checks else sorted(CHECKS)
    report = VerificationReport(cfg, [run_check(n, cfg) for n in names])
    small = [f for f in ("end_to_end_leaves", "unique_rep_leaves", "exhaustive_leaves",
                         "chi_leaves", "formula_leaves") if getattr(cfg, f) <= 1]
    if small:
        for r in report.results:
            r.warnings.append(f"caps of 1 make this check near-vacuous: {', '.join(small)}")
    return report
