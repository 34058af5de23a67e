"""Atomic MSO transductions, their composition, and the two laminar pipelines.

``laminar_to_tree`` maps a {SET}-structure of a laminar system to a
{desc, SET}-structure whose desc-part is the laminar tree: colour with an
identifying colouring, filter by the chi sentence, copy ``p`` times, then
keep only realizations of members and order them by containment.
``tree_to_setsystem`` goes back by keeping the leaves and defining each
member as the leaf set below a node.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence, Union

from . import formulas as fl
from .laminar import (N_PARTS, IdentifyingColouring, LaminarTree, NotLaminar, SetSystem,
                      build_laminar_tree, check_laminar, compact_colouring,
                      identifying_colouring, thin_partition)
from .logic.evaluator import Evaluator, ResourceLimitExceeded, default_cap, subsets_in_order
from .logic.syntax import Exists, Forall, Formula, Iff, In, Pred, conj, symbols
from .structures import (DESC_VOCAB, RELATION, SET_VOCAB, SETPRED, Structure, Vocabulary,
                         copy_id, make_structure)

WITNESS, ENUMERATE, PROVIDED = "witness", "enumerate", "provided"


class StepError(ValueError):
    pass


class VocabularyMismatch(StepError):
    pass


class FilterRejectedWitness(RuntimeError):
    """The natively built colouring failed the filter; indicates a bug."""


class NotATree(ValueError):
    pass


# -- steps ----------------------------------------------------------------

@dataclass(frozen=True)
class Colouring:
    """Adds unary relations ``names``: either ``provided`` or every possible choice."""
    names: tuple[str, ...]
    policy: str = PROVIDED
    provided: Mapping[str, frozenset[str]] | None = None

    def __post_init__(self):
        if self.policy not in (PROVIDED, ENUMERATE):
            raise StepError(f"unknown colouring policy {self.policy!r}")
        if self.policy == PROVIDED and self.provided is None:
            raise StepError("provided policy needs colour sets")
        if self.provided is not None and set(self.provided) - set(self.names):
            raise StepError("colour sets for undeclared names")


@dataclass(frozen=True)
class Copying:
    """Adds ``k`` copies of the universe and relations copy_0..copy_k."""
    k: int
    prefix: str = "copy_"

    def __post_init__(self):
        if self.k < 0:
            raise StepError("copy count must be non-negative")

    def names(self) -> list[str]:
        return [f"{self.prefix}{i}" for i in range(self.k + 1)]


@dataclass(frozen=True)
class Filtering:
    sentence: Formula

    def __post_init__(self):
        if self.sentence.free:
            raise StepError(f"filter sentence has free variables {sorted(self.sentence.free)}")


@dataclass(frozen=True)
class OutputSymbol:
    name: str
    kind: str
    params: tuple[str, ...]
    formula: Formula

    def __post_init__(self):
        if self.kind == SETPRED and len(self.params) != 1:
            raise StepError(f"set predicate {self.name} takes one set variable")
        if set(self.params) != set(self.formula.free) or len(set(self.params)) != len(self.params):
            raise StepError(f"{self.name}: free variables {sorted(self.formula.free)} "
                            f"do not match parameters {list(self.params)}")


@dataclass(frozen=True)
class Interpretation:
    """Universe := elements satisfying ``domain``; each output symbol := its formula."""
    domain_var: str
    domain: Formula
    outputs: tuple[OutputSymbol, ...]

    def __post_init__(self):
        if set(self.domain.free) - {self.domain_var}:
            raise StepError("domain formula must have exactly the domain variable free")

    @property
    def vocabulary(self) -> Vocabulary:
        return Vocabulary.of(*((o.name, o.kind, len(o.params)) for o in self.outputs))


TransductionStep = Union[Colouring, Copying, Filtering, Interpretation]


def _used_symbols(step: TransductionStep) -> set[tuple[str, str, int]]:
    if isinstance(step, Filtering):
        return symbols(step.sentence)
    if isinstance(step, Interpretation):
        out = symbols(step.domain)
        for o in step.outputs:
            out |= symbols(o.formula)
        return out
    return set()


def _check_input(s: Structure, step: TransductionStep) -> None:
    vocab = s.vocabulary
    if isinstance(step, Colouring):
        clash = [n for n in step.names if n in vocab]
    elif isinstance(step, Copying):
        clash = [n for n in step.names() if n in vocab]
    else:
        clash = []
    if clash:
        raise VocabularyMismatch(f"symbols already present: {clash}")
    for name, kind, arity in sorted(_used_symbols(step)):
        if name not in vocab:
            raise VocabularyMismatch(f"step uses unknown symbol {name}")
        sym = vocab.get(name)
        if (sym.kind, sym.arity) != (kind, arity):
            raise VocabularyMismatch(f"{name} used as {kind}/{arity}, declared {sym.kind}/{sym.arity}")


def _interps(s: Structure) -> dict[str, Iterable]:
    return {**s.relations, **s.set_predicates}


def apply_step(s: Structure, step: TransductionStep, *, guarded: bool = True,
               max_subset_universe: int | None = None) -> list[Structure]:
    """All output structures of one atomic step (empty when filtered out)."""
    _check_input(s, step)
    cap = default_cap() if max_subset_universe is None else max_subset_universe
    if isinstance(step, Colouring):
        vocab = s.vocabulary.union(Vocabulary.of(*((n, RELATION, 1) for n in step.names)))
        if step.policy == PROVIDED:
            colours = {n: [(e,) for e in sorted(step.provided.get(n, ()))] for n in step.names}
            return [make_structure(vocab, s.universe, {**_interps(s), **colours})]
        bits = len(step.names) * s.size
        if bits > cap:
            raise ResourceLimitExceeded(f"{2 ** bits} colourings exceed the cap of 2^{cap}")
        out = []
        for mask in product((False, True), repeat=bits):
            colours = {}
            for j, n in enumerate(step.names):
                row = mask[j * s.size:(j + 1) * s.size]
                colours[n] = [(e,) for e, on in zip(s.universe, row) if on]
            out.append(make_structure(vocab, s.universe, {**_interps(s), **colours}))
        return out
    if isinstance(step, Copying):
        names = step.names()
        vocab = s.vocabulary.union(Vocabulary.of(*((n, RELATION, 2) for n in names)))
        universe = [copy_id(i, e) for i in range(step.k + 1) for e in s.universe]
        copies = {n: [(copy_id(i, e), e) for e in s.universe] for i, n in enumerate(names)}
        return [make_structure(vocab, universe, {**_interps(s), **copies})]
    ev = Evaluator(s, guarded=guarded, max_subset_universe=cap)
    if isinstance(step, Filtering):
        return [s] if ev.evaluate(step.sentence) else []
    if isinstance(step, Interpretation):
        return [_interpret(s, step, ev)]
    raise StepError(f"not a transduction step: {step!r}")


def _interpret(s: Structure, step: Interpretation, ev: Evaluator) -> Structure:
    keep = ev.compile(step.domain)
    env: dict = {}
    universe = []
    for e in s.universe:
        env[step.domain_var] = e
        if keep(env):
            universe.append(e)
    uset = frozenset(universe)
    interps: dict[str, list] = {}
    for o in step.outputs:
        fn = ev.compile(o.formula)
        if o.kind == RELATION:
            rows = []
            for t in product(universe, repeat=len(o.params)):
                env = dict(zip(o.params, t))
                if fn(env):
                    rows.append(t)
            interps[o.name] = rows
        else:
            (X,) = o.params
            cands = ev.set_candidates(X, o.formula)
            if cands is None:
                if len(universe) > ev.cap:
                    raise ResourceLimitExceeded(
                        f"output set predicate {o.name} over {len(universe)} elements (cap {ev.cap})")
                cands = subsets_in_order(universe)
            interps[o.name] = [c for c in cands if c <= uset and fn({X: c})]
    return make_structure(step.vocabulary, universe, interps)


# -- pipelines ------------------------------------------------------------

@dataclass
class Pipeline:
    steps: list[TransductionStep]
    trace: list[dict] = field(default_factory=list)

    def run(self, s: Structure, *, guarded: bool = True,
            max_subset_universe: int | None = None) -> list[Structure]:
        self.trace.clear()
        current = [s]
        for step in self.steps:
            nxt: list[Structure] = []
            for st in current:
                nxt.extend(apply_step(st, step, guarded=guarded,
                                      max_subset_universe=max_subset_universe))
            entry = {"step": type(step).__name__.lower(), "inputs": len(current),
                     "outputs": len(nxt)}
            if nxt:
                entry["vocabulary"] = list(nxt[0].vocabulary.names)
                entry["universe"] = nxt[0].size
            if isinstance(step, Filtering):
                entry["verdict"] = bool(nxt)
            self.trace.append(entry)
            current = nxt
        return current


def colour_names(parts: int) -> tuple[str, ...]:
    cfg = fl.FormulaLibraryConfig(parts)
    return tuple(n for i in range(1, parts + 1) for n in (cfg.colour_a(i), cfg.colour_b(i)))


def witness_colouring(system: SetSystem, parts: int = N_PARTS) -> IdentifyingColouring:
    tree = build_laminar_tree(system)
    col = identifying_colouring(tree, thin_partition(tree))
    return col if parts == N_PARTS else compact_colouring(col, parts)


def colouring_step(colouring: IdentifyingColouring) -> Colouring:
    cfg = fl.FormulaLibraryConfig(colouring.parts)
    provided = {}
    for i, (a, b) in enumerate(zip(colouring.A, colouring.B), start=1):
        provided[cfg.colour_a(i)] = frozenset(a)
        provided[cfg.colour_b(i)] = frozenset(b)
    return Colouring(colour_names(colouring.parts), PROVIDED, provided)


def coloured_structure(system: SetSystem, colouring: IdentifyingColouring) -> Structure:
    """The {SET, A_i, B_i}-structure of a system under a colouring."""
    (out,) = apply_step(system.to_structure(), colouring_step(colouring))
    return out


def laminar_pipeline(parts: int = N_PARTS, colouring: IdentifyingColouring | None = None,
                     strip_set: bool = False) -> Pipeline:
    """Colour, filter by chi, copy, interpret. Without a colouring every colouring is tried."""
    cfg = fl.FormulaLibraryConfig(parts)
    if colouring is None:
        colour_step = Colouring(colour_names(parts), ENUMERATE)
    else:
        if colouring.parts != parts:
            raise StepError(f"colouring has {colouring.parts} parts, pipeline {parts}")
        colour_step = colouring_step(colouring)
    out = [OutputSymbol(fl.DESC, RELATION, ("x", "y"), fl.desc_formula("x", "y", config=cfg))]
    if not strip_set:
        out.append(OutputSymbol(fl.SET, SETPRED, ("X",), Pred(fl.SET, "X")))
    steps: list[TransductionStep] = [
        colour_step,
        Filtering(fl.chi_sentence(cfg)),
        Copying(parts),
        Interpretation("x", fl.domain_formula("x", config=cfg), tuple(out)),
    ]
    return Pipeline(steps)


def _system_of(s: Structure) -> SetSystem:
    if fl.SET not in s.vocabulary:
        raise VocabularyMismatch("input has no SET predicate")
    system = SetSystem.from_structure(s)
    if not check_laminar(system):
        raise NotLaminar(f"not laminar: {system.sorted_sets()}")
    return system


def laminar_to_tree(s: Structure, policy: str = WITNESS, parts: int = N_PARTS, *,
                    strip_set: bool = False, guarded: bool = True,
                    max_subset_universe: int | None = None,
                    trace: list | None = None) -> Structure:
    """The {desc, SET}-structure of the laminar tree of ``s``.

    Under the enumerate policy every colouring accepted by the filter is
    transduced; they must all agree up to isomorphism, and the first output
    in canonical order is returned.
    """
    system = _system_of(s)
    if policy == WITNESS:
        pipe = laminar_pipeline(parts, witness_colouring(system, parts), strip_set)
    elif policy == ENUMERATE:
        pipe = laminar_pipeline(parts, None, strip_set)
    else:
        raise StepError(f"unknown policy {policy!r}")
    outs = pipe.run(system.to_structure(), guarded=guarded, max_subset_universe=max_subset_universe)
    if trace is not None:
        trace.extend(pipe.trace)
    if not outs:
        raise FilterRejectedWitness(system.sorted_sets())
    outs = sorted(set_of_outputs(outs), key=lambda o: o.dumps())
    first = outs[0]
    if any(not rooted_tree_iso(first, o) for o in outs[1:]):
        raise FilterRejectedWitness("accepted colourings disagree on the output tree")
    return first


def transduce_all(s: Structure, parts: int, *, max_subset_universe: int | None = None) -> list[Structure]:
    """Outputs for every colouring accepted by the filter, deduplicated."""
    system = _system_of(s)
    pipe = laminar_pipeline(parts, None)
    outs = pipe.run(system.to_structure(), max_subset_universe=max_subset_universe)
    return sorted(set_of_outputs(outs), key=lambda o: o.dumps())


def set_of_outputs(outs: Sequence[Structure]) -> list[Structure]:
    seen: dict[str, Structure] = {}
    for o in outs:
        seen.setdefault(o.dumps(), o)
    return list(seen.values())


# -- trees as desc-structures ---------------------------------------------

INNER_PREFIX = "@"


def tree_structure(tree: LaminarTree) -> Structure:
    """desc-structure of a laminar tree: leaves keep their element, inner nodes are ``@n``."""
    def name(t: int) -> str:
        return tree.element(t) if tree.is_leaf(t) else f"{INNER_PREFIX}{t}"

    pairs = [(name(a), name(b)) for b in tree.nodes for a in tree.subtree(b)]
    return make_structure(DESC_VOCAB, [name(t) for t in tree.nodes], {fl.DESC: pairs})


@dataclass(frozen=True)
class TreeShape:
    root: str
    children: dict[str, tuple[str, ...]]

    def leaves(self) -> list[str]:
        return sorted(n for n, kids in self.children.items() if not kids)


def tree_shape(s: Structure) -> TreeShape:
    """Root and child lists of a desc-structure; NotATree unless desc is a rooted tree order."""
    if fl.DESC not in s.relations:
        raise NotATree("no desc relation")
    rel = s.relations[fl.DESC]
    up: dict[str, set[str]] = {u: set() for u in s.universe}
    for a, b in rel:
        up[a].add(b)
    for u in s.universe:
        if u not in up[u]:
            raise NotATree(f"desc is not reflexive at {u}")
    for a, b in rel:
        if a != b and a in up[b]:
            raise NotATree(f"desc is not antisymmetric on {a}, {b}")
        if not up[b] <= up[a]:
            raise NotATree(f"desc is not transitive through {a}, {b}")
    roots = [u for u in s.universe if up[u] == {u}]
    if len(roots) != 1:
        raise NotATree(f"expected one root, found {len(roots)}")
    children: dict[str, list[str]] = {u: [] for u in s.universe}
    for u in s.universe:
        strict = up[u] - {u}
        if not strict:
            continue
        # ancestors must form a chain: the parent is the one with most ancestors
        parent = max(strict, key=lambda w: len(up[w]))
        if up[parent] != strict:
            raise NotATree(f"ancestors of {u} are not a chain")
        children[parent].append(u)
    return TreeShape(roots[0], {u: tuple(sorted(k)) for u, k in children.items()})


def _as_shape(t: LaminarTree | Structure) -> tuple[TreeShape, dict[str, str]]:
    """Shape plus leaf labels (element ids)."""
    if isinstance(t, LaminarTree):
        t = tree_structure(t)
    shape = tree_shape(t)
    return shape, {leaf: leaf for leaf in shape.leaves()}


def canonical_form(t: LaminarTree | Structure, labelled: bool = True) -> str:
    """AHU canonical string; leaves carry their element id when ``labelled``."""
    shape, labels = _as_shape(t)
    memo: dict[str, str] = {}
    order: list[str] = []
    stack = [shape.root]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(shape.children[u])
    for u in reversed(order):
        kids = shape.children[u]
        if not kids:
            memo[u] = labels[u] if labelled else "()"
        else:
            memo[u] = "(" + "".join(sorted(memo[k] for k in kids)) + ")"
    return memo[shape.root]


def rooted_tree_iso(t1: LaminarTree | Structure, t2: LaminarTree | Structure,
                    labelled: bool = True) -> bool:
    return canonical_form(t1, labelled) == canonical_form(t2, labelled)


def backwards_interpretation() -> Interpretation:
    """Leaves become the universe; each member is the leaf set below some node."""
    x, w = "x", "w"
    below = Iff(In(x, "X"), conj(fl.leaf(x), fl.desc(x, w)))
    psi = Exists(w, Forall(x, below))
    return Interpretation(x, fl.leaf(x), (OutputSymbol(fl.SET, SETPRED, ("X",), psi),))


def tree_to_setsystem(s: Structure, *, guarded: bool = True,
                      max_subset_universe: int | None = None) -> Structure:
    tree_shape(s)
    (out,) = apply_step(s, backwards_interpretation(), guarded=guarded,
                        max_subset_universe=max_subset_universe)
    return out


def desc_part(s: Structure) -> Structure:
    return make_structure(DESC_VOCAB, s.universe, {fl.DESC: s.relations[fl.DESC]})


__all__ = [
    "Colouring", "Copying", "ENUMERATE", "FilterRejectedWitness", "Filtering", "Interpretation",
    "NotATree", "OutputSymbol", "PROVIDED", "Pipeline", "StepError", "TransductionStep",
    "TreeShape", "VocabularyMismatch", "WITNESS", "apply_step", "backwards_interpretation",
    "canonical_form", "colour_names", "coloured_structure", "colouring_step", "desc_part", "laminar_pipeline", "laminar_to_tree",
    "rooted_tree_iso", "transduce_all", "tree_shape", "tree_structure", "tree_to_setsystem",
    "witness_colouring", "SET_VOCAB",
]
