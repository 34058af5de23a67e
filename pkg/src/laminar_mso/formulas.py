"""Builders for the MSO formulas used by the laminar-tree transduction.

Set-level predicates (uppercase) talk about members of a set system through
the set predicate ``SET``; tree-level predicates (lowercase) talk about nodes
of a rooted tree through the binary relation ``desc``. Binary predicates read
"first argument is a descendant/child of the second".

Every builder takes the names of its free variables, so formulas can be
instantiated without capture; bound variables are chosen deterministically,
which lets structurally equal subformulas share evaluator memo tables.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .logic.syntax import (FALSE, TRUE, Eq, Exists, ExistsSet, Forall, ForallSet, Formula,
                           Iff, Implies, In, Not, Pred, Rel, SetEq, Subset, conj, disj,
                           exists, forall)
from .structures import RELATION, SETPRED, Vocabulary

SET = "SET"
DESC = "desc"


class UnknownPredicateName(KeyError):
    pass


class IndexOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class FormulaLibraryConfig:
    parts: int = 16

    def __post_init__(self):
        if self.parts < 1:
            raise ValueError("need at least one part")

    def colour_a(self, i: int) -> str:
        return f"A_{i}"

    def colour_b(self, i: int) -> str:
        return f"B_{i}"

    def copy_rel(self, i: int) -> str:
        return f"copy_{i}"

    def coloured_vocabulary(self) -> Vocabulary:
        specs = [(SET, SETPRED, 1)]
        for i in range(1, self.parts + 1):
            specs += [(self.colour_a(i), RELATION, 1), (self.colour_b(i), RELATION, 1)]
        return Vocabulary.of(*specs)

    def copied_vocabulary(self) -> Vocabulary:
        specs = [(self.copy_rel(i), RELATION, 2) for i in range(self.parts + 1)]
        return self.coloured_vocabulary().union(Vocabulary.of(*specs))


DEFAULT = FormulaLibraryConfig()


def _fresh(base: str, avoid) -> str:
    if base not in avoid:
        return base
    k = 1
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"


def _fresh_many(bases: str, avoid) -> list[str]:
    out: list[str] = []
    taken = set(avoid)
    for b in bases.split():
        name = _fresh(b, taken)
        taken.add(name)
        out.append(name)
    return out


def is_set(X: str) -> Formula:
    return Pred(SET, X)


# -- set-level derived predicates -----------------------------------------

@lru_cache(maxsize=None)
def desc_set(Y: str, X: str) -> Formula:
    """Y's node is a (reflexive) descendant of X's node."""
    return conj(is_set(Y), is_set(X), Subset(Y, X))


@lru_cache(maxsize=None)
def proper_desc_set(Y: str, X: str) -> Formula:
    return conj(desc_set(Y, X), Not(SetEq(Y, X)))


@lru_cache(maxsize=None)
def anc_set(X: str, Y: str) -> Formula:
    """X's node is a (reflexive) ancestor of Y's node."""
    return desc_set(Y, X)


@lru_cache(maxsize=None)
def child_set(Y: str, X: str) -> Formula:
    (Z,) = _fresh_many("Z", {X, Y})
    between = conj(is_set(Z), Subset(Y, Z), Subset(Z, X))
    return conj(is_set(Y), is_set(X), Subset(Y, X), Not(SetEq(Y, X)),
                ForallSet(Z, Implies(between, disj(SetEq(Z, Y), SetEq(Z, X)))))


@lru_cache(maxsize=None)
def parent_set(X: str, Y: str) -> Formula:
    return child_set(Y, X)


@lru_cache(maxsize=None)
def root_set(X: str) -> Formula:
    (Y,) = _fresh_many("Y", {X})
    return conj(is_set(X), ForallSet(Y, Implies(is_set(Y), Subset(Y, X))))


@lru_cache(maxsize=None)
def leaf_set(X: str) -> Formula:
    (Y,) = _fresh_many("Y", {X})
    return conj(is_set(X), ForallSet(Y, Implies(conj(is_set(Y), Subset(Y, X)), SetEq(Y, X))))


def _coloured(y: str, colour: str, by_set: bool) -> Formula:
    return In(y, colour) if by_set else Rel(colour, (y,))


@lru_cache(maxsize=None)
def leaf_in(X: str, colour: str, by_set: bool = False) -> Formula:
    """LEAF_A(X): X is a leaf whose element has the colour."""
    (x,) = _fresh_many("x", {X, colour})
    return conj(leaf_set(X), Forall(x, Implies(In(x, X), _coloured(x, colour, by_set))))


# -- tree-level derived predicates ----------------------------------------

def desc(x: str, y: str) -> Formula:
    return Rel(DESC, (x, y))


@lru_cache(maxsize=None)
def root(x: str) -> Formula:
    (y,) = _fresh_many("y", {x})
    return Forall(y, Implies(desc(x, y), Eq(y, x)))


@lru_cache(maxsize=None)
def leaf(x: str) -> Formula:
    (y,) = _fresh_many("y", {x})
    return Forall(y, Implies(desc(y, x), Eq(y, x)))


@lru_cache(maxsize=None)
def child(x: str, y: str) -> Formula:
    """x is a child of y; ``x != y`` is needed because desc is reflexive."""
    (z,) = _fresh_many("z", {x, y})
    return conj(desc(x, y), Not(Eq(x, y)),
                Forall(z, Implies(conj(desc(x, z), desc(z, y)), disj(Eq(z, x), Eq(z, y)))))


_DERIVED = {
    "ROOT": (root_set, ("X",)),
    "LEAF": (leaf_set, ("X",)),
    "LEAF_A": (leaf_in, ("X",)),
    "ANC": (anc_set, ("X", "Y")),
    "DESC": (desc_set, ("X", "Y")),
    "PDESC": (proper_desc_set, ("X", "Y")),
    "PARENT": (parent_set, ("X", "Y")),
    "CHILD": (child_set, ("X", "Y")),
    "root": (root, ("x",)),
    "leaf": (leaf, ("x",)),
    "child": (child, ("x", "y")),
}


def derived_predicate(name: str, *args: str, colour: str | None = None) -> Formula:
    """One of the named helper predicates, with default argument names."""
    try:
        fn, defaults = _DERIVED[name]
    except KeyError:
        raise UnknownPredicateName(name) from None
    args = args or defaults
    if len(args) != len(defaults):
        raise ValueError(f"{name} takes {len(defaults)} arguments")
    if name == "LEAF_A":
        if colour is None:
            raise ValueError("LEAF_A needs a colour")
        return leaf_in(args[0], colour)
    return fn(*args)


# -- laminarity -----------------------------------------------------------

@lru_cache(maxsize=None)
def laminarity_sentence(corrected: bool = True) -> Formula:
    """Sentence true exactly on laminar set systems.

    ``corrected=False`` gives the disjunctive rendering as printed, kept for
    inspection only; it is not equivalent to laminarity.
    """
    x, y = "x", "y"
    U, S, F1, F2 = "U", "S", "F1", "F2"
    no_cross_body = disj(
        Forall(x, Not(conj(In(x, F1), In(x, F2)))),
        Subset(F1, F2),
        Subset(F2, F1),
    )
    if not corrected:
        return disj(
            ExistsSet(U, Forall(x, disj(In(x, U), is_set(U)))),
            Forall(x, ExistsSet(S, Forall(y, disj(is_set(S), Iff(In(y, S), Eq(y, x)))))),
            forall("F1 F2", Implies(conj(is_set(F1), is_set(F2)), no_cross_body)),
        )
    return conj(
        ExistsSet(U, conj(is_set(U), Forall(x, In(x, U)))),
        Forall(x, ExistsSet(S, conj(is_set(S), Forall(y, Iff(In(y, S), Eq(y, x)))))),
        forall("F1 F2", Implies(conj(is_set(F1), is_set(F2)), no_cross_body)),
        ForallSet("X", Implies(is_set("X"), Exists(x, In(x, "X")))),
    )


# -- branching ------------------------------------------------------------

FULLY, SINGLE, MISSED = "fully", "single", "missed"


@lru_cache(maxsize=None)
def branch_formula(kind: str, colour: str, X: str = "X", *, by_set: bool = False) -> Formula:
    """fully/single/missed: X is an inner member and its children meet the colour.

    With ``by_set`` the colour is a set variable rather than a unary relation.
    """
    avoid = {X, colour}
    base = conj(is_set(X), Not(leaf_set(X)))
    if kind == MISSED:
        (x,) = _fresh_many("x", avoid)
        return conj(base, Forall(x, Implies(In(x, X), Not(_coloured(x, colour, by_set)))))
    Y, Z, y, z = _fresh_many("Y Z y z", avoid)

    def meets(V: str, v: str) -> Formula:
        return Exists(v, conj(In(v, V), _coloured(v, colour, by_set)))

    if kind == FULLY:
        return conj(base, ForallSet(Y, Implies(child_set(Y, X), meets(Y, y))))
    if kind == SINGLE:
        others = ForallSet(Z, Implies(conj(child_set(Z, X), meets(Z, z)), SetEq(Z, Y)))
        return conj(base, ExistsSet(Y, conj(child_set(Y, X), meets(Y, y), others)))
    raise ValueError(f"unknown branch kind {kind!r}")


# -- representative sets and leaders --------------------------------------

@lru_cache(maxsize=None)
def rep_formula(colour: str, starred: bool = True, R: str = "R", X: str = "X", *,
                printed: bool = False, strict: bool = True, strict_below: bool = False) -> Formula:
    """REP_A(R, X) and its maximal version REP*_A(R, X).

    R is the representative set (inside colour A) whose tip is X's node.
    Branching in the structural clauses is measured against R, other children
    of a single-branched node may be missed nodes or leaves outside R, and
    maximality only rules out proper supersets of R.

    ``printed=True`` instead measures branching against the colour, requires
    the other children to be missed inner nodes, and rules out every other
    pair at an ancestor.

    The tip clause looks at proper descendants of X; ``strict=False`` makes
    them reflexive, which leaves it unsatisfiable. The branching clauses
    include X itself, forcing the lca of R to be fully branched;
    ``strict_below=True`` skips X and then admits unions of representative
    sets whose lca has three or more children.
    """
    avoid = {R, X, colour}
    Y, Y2, Z, Z2, x = _fresh_many("Y Y' Z Z' x", avoid)
    bc, by_set = (colour, False) if printed else (R, True)

    within = Forall(x, Implies(In(x, R), Rel(colour, (x,))))
    tip_below = proper_desc_set if strict else desc_set
    below = proper_desc_set if strict_below else desc_set
    tip_clause = ExistsSet(Y, conj(
        child_set(Y, X), Subset(R, Y),
        ForallSet(Y2, Implies(conj(tip_below(Y2, X), Subset(R, Y2)), SetEq(Y2, Y)))))
    fully_clause = ForallSet(Y, Implies(
        conj(below(Y, X), branch_formula(FULLY, bc, Y, by_set=by_set)),
        ForallSet(Z, Implies(child_set(Z, Y),
                             disj(leaf_in(Z, bc, by_set), branch_formula(SINGLE, bc, Z, by_set=by_set))))))
    if printed:
        other_ok = branch_formula(MISSED, bc, Z2, by_set=by_set)
    else:
        other_ok = disj(branch_formula(MISSED, bc, Z2, by_set=True),
                        conj(leaf_set(Z2), Not(leaf_in(Z2, bc, True))))
    single_clause = ForallSet(Y, Implies(
        conj(below(Y, X), branch_formula(SINGLE, bc, Y, by_set=by_set)),
        ExistsSet(Z, conj(
            child_set(Z, Y),
            disj(leaf_in(Z, bc, by_set), branch_formula(FULLY, bc, Z, by_set=by_set)),
            ForallSet(Z2, Implies(conj(child_set(Z2, Y), Not(SetEq(Z2, Z))), other_ok))))))
    rep = conj(is_set(X), within, tip_clause, fully_clause, single_clause)
    if not starred:
        return rep

    X2, R2 = _fresh_many("X' R'", avoid | {Y, Y2, Z, Z2})
    other = rep_formula(colour, False, R2, X2, printed=printed, strict=strict,
                        strict_below=strict_below)
    guard = [anc_set(X2, X), other] if printed else [anc_set(X2, X), other, Subset(R, R2)]
    maximal = forall(f"{X2} {R2}", Implies(conj(*guard), conj(SetEq(R2, R), SetEq(X2, X))))
    return conj(rep, maximal)


@lru_cache(maxsize=None)
def leader_formula(i: int, r: str = "r", X: str = "X", *,
                   config: FormulaLibraryConfig = DEFAULT, **rep_options) -> Formula:
    """leader_i(r, X): r is the leader of X's node in part i (part 0: leaves)."""
    if not 0 <= i <= config.parts:
        raise IndexOutOfRange(f"leader index {i} outside 0..{config.parts}")
    if i == 0:
        return conj(leaf_set(X), In(r, X))
    (R,) = _fresh_many("R", {r, X})
    rep = rep_formula(config.colour_a(i), True, R, X, **rep_options)
    return conj(Rel(config.colour_b(i), (r,)), ExistsSet(R, conj(In(r, R), rep)))


@lru_cache(maxsize=None)
def chi_sentence(config: FormulaLibraryConfig = DEFAULT, **rep_options) -> Formula:
    """Filter sentence: every member has exactly one (part, leader) pair, and
    within a part distinct members have distinct leaders."""
    p = config.parts
    X, X2, r, r2 = "X", "X'", "r", "r'"

    def lead(i, e, V):
        return leader_formula(i, e, V, config=config, **rep_options)

    has = [Exists(r, lead(i, r, X)) for i in range(p + 1)]
    some = disj(*has)
    one_part = [Not(conj(has[i], has[j])) for i, j in combinations(range(p + 1), 2)]
    one_leader = [forall(f"{r} {r2}", Implies(conj(lead(i, r, X), lead(i, r2, X)), Eq(r, r2)))
                  for i in range(p + 1)]
    exactly_one = ForallSet(X, Implies(is_set(X), conj(some, *one_part, *one_leader)))
    injective = [
        forall(f"{X} {X2} {r} {r2}", Implies(
            conj(is_set(X), is_set(X2), Not(SetEq(X, X2)), lead(i, r, X), lead(i, r2, X2)),
            Not(Eq(r, r2))))
        for i in range(p + 1)
    ]
    return conj(exactly_one, *injective)


@lru_cache(maxsize=None)
def realization(x: str = "x", X: str = "X", *, config: FormulaLibraryConfig = DEFAULT,
                **rep_options) -> Formula:
    """real(x, X): x is the i-th copy of X's leader in part i."""
    (r,) = _fresh_many("r", {x, X})
    return Exists(r, disj(*(
        conj(Rel(config.copy_rel(i), (x, r)), leader_formula(i, r, X, config=config, **rep_options))
        for i in range(config.parts + 1))))


@lru_cache(maxsize=None)
def domain_formula(x: str = "x", *, config: FormulaLibraryConfig = DEFAULT, **rep_options) -> Formula:
    (X,) = _fresh_many("X", {x})
    return ExistsSet(X, conj(is_set(X), realization(x, X, config=config, **rep_options)))


@lru_cache(maxsize=None)
def desc_formula(x: str = "x", y: str = "y", *, config: FormulaLibraryConfig = DEFAULT,
                 **rep_options) -> Formula:
    """psi_desc(x, y): x realizes a subset of the member y realizes."""
    X, X2 = _fresh_many("X X'", {x, y})
    outer = ExistsSet(X2, conj(is_set(X2), realization(y, X2, config=config, **rep_options),
                               Subset(X, X2)))
    return ExistsSet(X, conj(is_set(X), realization(x, X, config=config, **rep_options), outer))


# -- counting on bounded-degree trees -------------------------------------

@lru_cache(maxsize=None)
def countkids(ell: int, v: str = "v", S: str = "S") -> Formula:
    """Exactly ``ell`` children of v lie in S."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    avoid = {v, S}
    picks = _fresh_many(" ".join(f"s{k}" for k in range(1, ell + 1)), avoid) if ell else []
    (x,) = _fresh_many("x", avoid | set(picks))
    members = [conj(In(s, S), child(s, v)) for s in picks]
    distinct = [Not(Eq(a, b)) for a, b in combinations(picks, 2)]
    exact = Forall(x, Iff(conj(In(x, S), child(x, v)), disj(*(Eq(x, s) for s in picks)) if picks else FALSE))
    body = conj(*members, *distinct, exact) if (members or distinct) else exact
    return exists(" ".join(picks), body) if picks else body


@lru_cache(maxsize=None)
def oddkids(k: int, v: str = "v", S: str = "S") -> Formula:
    """An odd number (at most k) of v's children lie in S."""
    if k < 1:
        raise ValueError("k must be positive")
    return disj(*(countkids(ell, v, S) for ell in range(1, k + 1, 2)))


@lru_cache(maxsize=None)
def evenleaf(k: int, X: str = "X") -> Formula:
    """EVEN-LEAF_k(X): parity witness S propagated from the leaves to the root."""
    if k < 1:
        raise ValueError("k must be positive")
    S, l, v, r = _fresh_many("S l v r", {X})
    return ExistsSet(S, conj(
        Forall(l, Implies(leaf(l), Iff(In(l, S), In(l, X)))),
        Forall(v, Implies(Not(leaf(v)), Iff(In(v, S), oddkids(k, v, S)))),
        Forall(r, Implies(root(r), Not(In(r, S)))),
    ))


def counting_formula(kind: str, param: int) -> Formula:
    if kind == "countkids":
        return countkids(param)
    if kind == "oddkids":
        return oddkids(param)
    if kind == "evenleaf":
        return evenleaf(param)
    raise UnknownPredicateName(kind)


# -- catalogue ------------------------------------------------------------

SET_LEVEL, COLOURED, TREE_LEVEL = "set", "coloured", "tree"


def library(parts: int = 1) -> dict[str, tuple[str, Formula]]:
    """Every builder instantiated once: name -> (vocabulary kind, formula).

    Colour-dependent entries use colour ``A_1``/``B_1`` of a ``parts``-part
    configuration.
    """
    cfg = FormulaLibraryConfig(parts)
    lib: dict[str, tuple[str, Formula]] = {}
    for name in ("ROOT", "LEAF", "ANC", "DESC", "PDESC", "PARENT", "CHILD"):
        lib[name] = (SET_LEVEL, derived_predicate(name))
    lib["laminarity"] = (SET_LEVEL, laminarity_sentence(True))
    lib["LEAF_A"] = (COLOURED, derived_predicate("LEAF_A", colour="A_1"))
    for kind in (FULLY, SINGLE, MISSED):
        lib[f"{kind}_A"] = (COLOURED, branch_formula(kind, "A_1"))
    lib["REP_A"] = (COLOURED, rep_formula("A_1", starred=False))
    lib["REP*_A"] = (COLOURED, rep_formula("A_1", starred=True))
    for i in range(parts + 1):
        lib[f"leader_{i}"] = (COLOURED, leader_formula(i, config=cfg))
    lib["chi"] = (COLOURED, chi_sentence(cfg))
    for name in ("root", "leaf", "child"):
        lib[name] = (TREE_LEVEL, derived_predicate(name))
    for ell in range(4):
        lib[f"countkids_{ell}"] = (TREE_LEVEL, countkids(ell))
    for k in (1, 2, 3):
        lib[f"oddkids_{k}"] = (TREE_LEVEL, oddkids(k))
        lib[f"evenleaf_{k}"] = (TREE_LEVEL, evenleaf(k))
    return lib


_INDEXED = re.compile(r"(countkids|oddkids|evenleaf|leader)_(\d+)\Z")


def named_formula(name: str, parts: int = 16) -> Formula:
    """Look up a catalogue entry; indexed families such as ``evenleaf_5`` are built on demand."""
    m = _INDEXED.match(name)
    if m:
        kind, k = m.group(1), int(m.group(2))
        if kind == "leader":
            return leader_formula(k, config=FormulaLibraryConfig(parts))
        return counting_formula(kind, k)
    if name == "laminarity_printed":
        return laminarity_sentence(False)
    if name == "chi":
        return chi_sentence(FormulaLibraryConfig(parts))
    lib = library(1)
    if name not in lib:
        raise UnknownPredicateName(name)
    return lib[name][1]


__all__ = [
    "FormulaLibraryConfig", "IndexOutOfRange", "UnknownPredicateName", "anc_set", "branch_formula",
    "chi_sentence", "child", "child_set", "countkids", "counting_formula", "derived_predicate",
    "desc", "desc_formula", "desc_set", "domain_formula", "evenleaf", "laminarity_sentence",
    "leader_formula", "leaf", "named_formula", "leaf_in", "leaf_set", "library", "oddkids", "parent_set",
    "proper_desc_set", "realization", "rep_formula", "root", "root_set", "TRUE",
]
