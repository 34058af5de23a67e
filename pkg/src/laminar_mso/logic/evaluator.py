"""Exact MSO evaluation over finite extended relational structures.

Formulas are compiled into closures over a mutable environment (variable name
to element id or frozenset). Quantifier nodes memoise their truth value keyed
by the values of their free variables, which is sound because evaluation is
pure for a fixed structure.

Guarded ranges
--------------
With ``guarded=True`` a quantifier may range over a subset of its domain when
the body syntactically makes every other value irrelevant:

* ``existsSet X (and (pred P X) ...)`` / ``forallSet X (implies (and (pred P X) ...) ...)``
  range over the interpretation of ``P``;
* the same shapes with a conjunct ``forall x (implies (in x X) (rel A x))``
  for a unary relation ``A`` range over subsets of ``A``'s extension;
* element quantifiers with a conjunct ``(in x Y)``, ``(= x y)`` or a relation
  atom whose other arguments are already bound range over the matching
  values only; under ``exists`` a disjunction narrows to the union of the
  disjuncts' ranges when every disjunct is guarded.

Guards are looked for through chains of quantifiers of the same polarity
(``exists X exists Y (and guard(X) ...)``), which is sound because a failing
guard falsifies (or, under ``forall``, satisfies) the whole chain. A guard may
only mention the quantified variable and variables bound outside the chain.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations, product
from operator import itemgetter
from typing import Callable, Iterable, Mapping

from ..structures import Structure, UnknownSymbol
from .syntax import (QUANTIFIERS, And, Eq, Exists, ExistsSet, Forall, ForallSet,
                     Formula, Iff, Implies, In, Not, Or, Pred, Rel, SetEq, Subset,
                     is_set_var)

DEFAULT_MAX_SUBSET_UNIVERSE = 16
CAP_ENV = "LAMINAR_MSO_MAX_SUBSET_UNIVERSE"

Env = dict
Closure = Callable[[Env], bool]


class EvaluationError(ValueError):
    pass


class UnboundVariable(EvaluationError):
    pass


class ResourceLimitExceeded(RuntimeError):
    pass


def default_cap() -> int:
    return int(os.environ.get(CAP_ENV, DEFAULT_MAX_SUBSET_UNIVERSE))


@dataclass
class Assignment:
    elements: dict[str, str] = field(default_factory=dict)
    sets: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        self.sets = {k: frozenset(v) for k, v in self.sets.items()}

    @classmethod
    def of(cls, mapping: Mapping[str, object]) -> "Assignment":
        """Split a flat mapping by variable case."""
        a = cls()
        for k, v in mapping.items():
            if is_set_var(k):
                a.sets[k] = frozenset(v)  # type: ignore[arg-type]
            else:
                a.elements[k] = v  # type: ignore[assignment]
        return a

    def env(self) -> Env:
        return {**self.elements, **self.sets}

    def to_json(self) -> dict:
        return {"elements": dict(sorted(self.elements.items())),
                "sets": {k: sorted(v) for k, v in sorted(self.sets.items())}}

    @classmethod
    def from_json(cls, data: Mapping) -> "Assignment":
        if "elements" in data or "sets" in data:
            return cls(dict(data.get("elements", {})), dict(data.get("sets", {})))
        return cls.of(data)


def subsets_in_order(items: Iterable[str]) -> list[frozenset[str]]:
    """All subsets by increasing cardinality, then lexicographically."""
    items = sorted(items)
    return [frozenset(c) for k in range(len(items) + 1) for c in combinations(items, k)]


def conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        out: list[Formula] = []
        for p in f.parts:
            out.extend(conjuncts(p))
        return out
    return [f]


_MISSING = object()


class Evaluator:
    """Evaluates formulas against one structure, sharing compiled code and memo tables."""

    def __init__(self, structure: Structure, *, guarded: bool = True,
                 max_subset_universe: int | None = None, memo: bool = True):
        self.structure = structure
        self.guarded = guarded
        self.memo = memo
        self.cap = default_cap() if max_subset_universe is None else max_subset_universe
        self._compiled: dict[Formula, Closure] = {}
        self._all_subsets: list[frozenset[str]] | None = None
        self._ext_subsets: dict[str, list[frozenset[str]]] = {}
        self._unary: dict[str, frozenset[str]] = {}
        self._index: dict[tuple, dict] = {}
        self._universe = frozenset(structure.universe)

    # -- public API -------------------------------------------------------

    def evaluate(self, formula: Formula, assignment: Assignment | Mapping | None = None) -> bool:
        if assignment is None:
            assignment = Assignment()
        elif not isinstance(assignment, Assignment):
            assignment = Assignment.of(assignment)
        env = assignment.env()
        missing = formula.free - env.keys()
        if missing:
            raise UnboundVariable(f"unbound variables {sorted(missing)}")
        for k, v in assignment.elements.items():
            if v not in self._universe:
                raise EvaluationError(f"{k} = {v!r} is not in the universe")
        for k, v in assignment.sets.items():
            if not v <= self._universe:
                raise EvaluationError(f"{k} = {sorted(v)} is not a subset of the universe")
        return self.compile(formula)(env)

    def compile(self, f: Formula) -> Closure:
        fn = self._compiled.get(f)
        if fn is None:
            fn = self._compile(f)
            self._compiled[f] = fn
        return fn

    def set_candidates(self, var: str, body: Formula) -> list[frozenset[str]] | None:
        """Guarded range for ``existsSet var body``, or None if unguarded.

        Besides the quantifier guards, a body ``exists y ... (and (forall x (iff
        (in x X) theta)) ...)`` with ``theta`` free of X pins X to one set per
        choice of the prefix variables.
        """
        if not self.guarded:
            return None
        found = self._static_set_range(var, conjuncts(body), frozenset({var}))
        if found is None:
            found = self._comprehension_range(var, body)
        return found

    # -- domains ----------------------------------------------------------

    def all_subsets(self) -> list[frozenset[str]]:
        if self._all_subsets is None:
            n = len(self.structure.universe)
            if n > self.cap:
                raise ResourceLimitExceeded(
                    f"set quantifier over a universe of {n} elements (cap {self.cap})")
            self._all_subsets = subsets_in_order(self.structure.universe)
        return self._all_subsets

    def _unary_ext(self, name: str) -> frozenset[str]:
        ext = self._unary.get(name)
        if ext is None:
            ext = frozenset(t[0] for t in self._rel(name))
            self._unary[name] = ext
        return ext

    def _subsets_of_ext(self, name: str) -> list[frozenset[str]]:
        subs = self._ext_subsets.get(name)
        if subs is None:
            ext = self._unary_ext(name)
            if len(ext) > self.cap:
                raise ResourceLimitExceeded(
                    f"guarded set quantifier over {len(ext)} elements (cap {self.cap})")
            subs = subsets_in_order(ext)
            self._ext_subsets[name] = subs
        return subs

    def _rel(self, name: str):
        try:
            return self.structure.relations[name]
        except KeyError:
            raise UnknownSymbol(name) from None

    def _family(self, name: str):
        try:
            return self.structure.set_predicates[name]
        except KeyError:
            raise UnknownSymbol(name) from None

    def _rel_index(self, name: str, positions: tuple[int, ...], others: tuple[int, ...]):
        key = (name, positions, others)
        idx = self._index.get(key)
        if idx is None:
            idx = {}
            for t in sorted(self._rel(name)):
                vals = {t[p] for p in positions}
                if len(vals) == 1:
                    idx.setdefault(tuple(t[o] for o in others), []).append(t[positions[0]])
            self._index[key] = idx
        return idx

    # -- compilation ------------------------------------------------------

    def _compile(self, f: Formula) -> Closure:
        if isinstance(f, Rel):
            args = f.args
            if len(args) == 1:
                ext = self._unary_ext(f.name)
                a = args[0]
                return lambda env: env[a] in ext
            rel = self._rel(f.name)
            get = itemgetter(*args)
            return lambda env: get(env) in rel
        if isinstance(f, Pred):
            fam = self._family(f.name)
            x = f.var
            return lambda env: env[x] in fam
        if isinstance(f, In):
            x, s = f.elem, f.setvar
            return lambda env: env[x] in env[s]
        if isinstance(f, (Eq, SetEq)):
            a, b = f.left, f.right
            return lambda env: env[a] == env[b]
        if isinstance(f, Subset):
            a, b = f.left, f.right
            return lambda env: env[a] <= env[b]
        if isinstance(f, Not):
            g = self.compile(f.body)
            return lambda env: not g(env)
        if isinstance(f, And):
            parts = [self.compile(p) for p in f.parts]
            if len(parts) == 2:
                p0, p1 = parts
                return lambda env: p0(env) and p1(env)
            if len(parts) == 3:
                p0, p1, p2 = parts
                return lambda env: p0(env) and p1(env) and p2(env)
            return lambda env: all(p(env) for p in parts)
        if isinstance(f, Or):
            parts = [self.compile(p) for p in f.parts]
            if len(parts) == 2:
                p0, p1 = parts
                return lambda env: p0(env) or p1(env)
            return lambda env: any(p(env) for p in parts)
        if isinstance(f, Implies):
            a, b = self.compile(f.left), self.compile(f.right)
            return lambda env: (not a(env)) or b(env)
        if isinstance(f, Iff):
            a, b = self.compile(f.left), self.compile(f.right)
            return lambda env: a(env) == b(env)
        if isinstance(f, QUANTIFIERS):
            return self._compile_quantifier(f)
        raise TypeError(f"not a formula: {f!r}")

    def _compile_quantifier(self, f: Formula) -> Closure:
        body = self.compile(f.body)
        v = f.var
        is_exists = isinstance(f, (Exists, ExistsSet))
        rng = self._range(f) if self.guarded else None
        if rng is None:
            if isinstance(f, (ExistsSet, ForallSet)):
                rng = lambda env: self.all_subsets()
            else:
                universe = self.structure.universe
                rng = lambda env: universe

        keyvars = tuple(sorted(f.free))
        if not keyvars:
            key = lambda env: ()
        else:
            key = itemgetter(*keyvars)
        memo: dict = {}
        use_memo = self.memo

        if is_exists:
            def quant(env):
                if use_memo:
                    k = key(env)
                    r = memo.get(k)
                    if r is not None:
                        return r
                old = env.get(v, _MISSING)
                res = False
                for val in rng(env):
                    env[v] = val
                    if body(env):
                        res = True
                        break
                if old is _MISSING:
                    env.pop(v, None)
                else:
                    env[v] = old
                if use_memo:
                    memo[k] = res
                return res
        else:
            def quant(env):
                if use_memo:
                    k = key(env)
                    r = memo.get(k)
                    if r is not None:
                        return r
                old = env.get(v, _MISSING)
                res = True
                for val in rng(env):
                    env[v] = val
                    if not body(env):
                        res = False
                        break
                if old is _MISSING:
                    env.pop(v, None)
                else:
                    env[v] = old
                if use_memo:
                    memo[k] = res
                return res
        return quant

    # -- guard analysis ---------------------------------------------------

    def _range(self, f: Formula):
        """A function env -> values for quantifier ``f``, or None for the full domain."""
        v = f.var
        chain_types = (Exists, ExistsSet) if isinstance(f, (Exists, ExistsSet)) else (Forall, ForallSet)
        g = f.body
        chained: set[str] = set()
        while isinstance(g, chain_types):
            if g.var == v:
                return None
            chained.add(g.var)
            g = g.body
        allowed = (f.free - chained) | {v}
        if chain_types[0] is Exists:
            if isinstance(g, Or) and g.parts:
                alts = [conjuncts(p) for p in g.parts]
            else:
                alts = [conjuncts(g)]
        else:
            if not isinstance(g, Implies):
                return None
            alts = [conjuncts(g.left)]

        if isinstance(f, (ExistsSet, ForallSet)):
            ranges = [self._static_set_range(v, cs, allowed) for cs in alts]
            if any(r is None for r in ranges):
                return None
            if len(ranges) == 1:
                only = ranges[0]
                return lambda env: only
            merged = list(dict.fromkeys(s for r in ranges for s in r))
            return lambda env: merged

        fns = [self._element_range(v, cs, allowed) for cs in alts]
        if any(fn is None for fn in fns):
            return None
        if len(fns) == 1:
            return fns[0]

        def union(env):
            seen: dict = {}
            for fn in fns:
                for val in fn(env):
                    seen[val] = None
            return seen
        return union

    def _static_set_range(self, v: str, cands: list[Formula], allowed) -> list | None:
        preds = [c.name for c in cands if isinstance(c, Pred) and c.var == v]
        colours = [name for c in cands if (name := _colour_guard(c, v)) is not None]
        if not preds and not colours:
            return None
        if preds:
            base = sorted(self._family(preds[0]), key=lambda s: (len(s), sorted(s)))
            base = [s for s in base if all(s in self._family(p) for p in preds[1:])]
        else:
            base = self._subsets_of_ext(colours[0])
            colours = colours[1:]
        for name in colours:
            ext = self._unary_ext(name)
            base = [s for s in base if s <= ext]
        return base

    def _comprehension_range(self, v: str, body: Formula) -> list | None:
        prefix: list[str] = []
        while isinstance(body, Exists):
            prefix.append(body.var)
            body = body.body
        if len(prefix) > 2 or len(set(prefix)) != len(prefix):
            return None
        for c in conjuncts(body):
            if not (isinstance(c, Forall) and isinstance(c.body, Iff)):
                continue
            x = c.var
            left, right = c.body.left, c.body.right
            if isinstance(right, In) and right.elem == x and right.setvar == v:
                left, right = right, left
            if not (isinstance(left, In) and left.elem == x and left.setvar == v):
                continue
            if v in right.free or not right.free <= set(prefix) | {x}:
                continue
            theta = self.compile(right)
            universe = self.structure.universe
            found: dict = {}
            env: Env = {}
            for vals in product(universe, repeat=len(prefix)):
                env.update(zip(prefix, vals))
                members = []
                for u in universe:
                    env[x] = u
                    if theta(env):
                        members.append(u)
                found[frozenset(members)] = None
            return list(found)
        return None

    def _element_range(self, v: str, cands: list[Formula], allowed):
        static = None
        for c in cands:
            if not c.free <= allowed:
                continue
            if isinstance(c, Eq) and c.left != c.right and v in (c.left, c.right):
                other = c.right if c.left == v else c.left
                return lambda env: (env[other],)
            if isinstance(c, In) and c.elem == v:
                s = c.setvar
                return lambda env: env[s]
            if isinstance(c, Rel) and v in c.args:
                pos = tuple(i for i, a in enumerate(c.args) if a == v)
                others = tuple(i for i, a in enumerate(c.args) if a != v)
                if not others:
                    if static is None:
                        idx = self._rel_index(c.name, pos, ())
                        static = tuple(idx.get((), ()))
                    continue
                idx = self._rel_index(c.name, pos, others)
                names = tuple(c.args[i] for i in others)
                if len(names) == 1:
                    n0 = names[0]
                    return lambda env: idx.get((env[n0],), ())
                get = itemgetter(*names)
                return lambda env: idx.get(get(env), ())
        if static is not None:
            return lambda env: static
        return None


def _colour_guard(c: Formula, v: str) -> str | None:
    """Name A if ``c`` is ``forall x (implies (in x v) (rel A x))``."""
    if isinstance(c, Forall) and isinstance(c.body, Implies):
        left, right = c.body.left, c.body.right
        if (isinstance(left, In) and left.elem == c.var and left.setvar == v
                and isinstance(right, Rel) and right.args == (c.var,)):
            return right.name
    return None


def evaluate(structure: Structure, formula: Formula,
             assignment: Assignment | Mapping | None = None, *, guarded: bool = True,
             max_subset_universe: int | None = None) -> bool:
    """Truth value of ``formula`` in ``structure`` under ``assignment``."""
    ev = Evaluator(structure, guarded=guarded, max_subset_universe=max_subset_universe)
    return ev.evaluate(formula, assignment)
