"""MSO abstract syntax.

Element variables start with a lowercase letter, set variables with an
uppercase one. Nodes are immutable and hashable (the hash is cached, since
formulas get large and are used as dictionary keys by the evaluator).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property


def is_element_var(name: str) -> bool:
    return name[:1].islower()


def is_set_var(name: str) -> bool:
    return name[:1].isupper()


class Formula:
    __slots__ = ()

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((type(self).__name__,) + tuple(
                getattr(self, f) for f in self.__dataclass_fields__))
            self.__dict__["_hash"] = h
            return h

    def __str__(self):
        from .printer import to_text
        return to_text(self)

    @cached_property
    def free(self) -> frozenset[str]:
        """All free variable names, element and set alike."""
        return _free(self)

    @cached_property
    def used_symbols(self) -> frozenset[tuple[str, str, int]]:
        return _symbols(self)

    # sugar for builders
    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)

    def implies(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def iff(self, other: "Formula") -> "Formula":
        return Iff(self, other)


def _node(cls):
    cls = dataclass(frozen=True, eq=True)(cls)
    cls.__hash__ = Formula.__hash__
    return cls


@_node
class Rel(Formula):
    name: str
    args: tuple[str, ...]


@_node
class Pred(Formula):
    name: str
    var: str


@_node
class In(Formula):
    elem: str
    setvar: str


@_node
class Eq(Formula):
    left: str
    right: str


@_node
class SetEq(Formula):
    left: str
    right: str


@_node
class Subset(Formula):
    left: str
    right: str


@_node
class Not(Formula):
    body: Formula


@_node
class And(Formula):
    parts: tuple[Formula, ...]


@_node
class Or(Formula):
    parts: tuple[Formula, ...]


@_node
class Implies(Formula):
    left: Formula
    right: Formula


@_node
class Iff(Formula):
    left: Formula
    right: Formula


@_node
class Exists(Formula):
    var: str
    body: Formula


@_node
class Forall(Formula):
    var: str
    body: Formula


@_node
class ExistsSet(Formula):
    var: str
    body: Formula


@_node
class ForallSet(Formula):
    var: str
    body: Formula


QUANTIFIERS = (Exists, Forall, ExistsSet, ForallSet)
TRUE = And(())
FALSE = Or(())


def _free(f: Formula) -> frozenset[str]:
    if isinstance(f, Rel):
        return frozenset(f.args)
    if isinstance(f, Pred):
        return frozenset((f.var,))
    if isinstance(f, In):
        return frozenset((f.elem, f.setvar))
    if isinstance(f, (Eq, SetEq, Subset)):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return f.body.free
    if isinstance(f, (And, Or)):
        return frozenset().union(*(p.free for p in f.parts))
    if isinstance(f, (Implies, Iff)):
        return f.left.free | f.right.free
    if isinstance(f, QUANTIFIERS):
        return f.body.free - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def free_variables(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """Free variables split by kind: (element variables, set variables)."""
    fv = f.free
    return (frozenset(v for v in fv if is_element_var(v)),
            frozenset(v for v in fv if is_set_var(v)))


def conj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, And) else (p,))
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        flat.extend(p.parts if isinstance(p, Or) else (p,))
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def exists(vars_: str, body: Formula) -> Formula:
    """Nested existentials over whitespace-separated variables, kind by case."""
    for v in reversed(vars_.split()):
        body = ExistsSet(v, body) if is_set_var(v) else Exists(v, body)
    return body


def forall(vars_: str, body: Formula) -> Formula:
    for v in reversed(vars_.split()):
        body = ForallSet(v, body) if is_set_var(v) else Forall(v, body)
    return body


def symbols(f: Formula) -> set[tuple[str, str, int]]:
    """Symbols used by ``f`` as (name, kind, arity) triples."""
    return set(f.used_symbols)


def _symbols(f: Formula) -> frozenset[tuple[str, str, int]]:
    if isinstance(f, Rel):
        return frozenset(((f.name, "relation", len(f.args)),))
    if isinstance(f, Pred):
        return frozenset(((f.name, "setpred", 1),))
    if isinstance(f, (Not,) + QUANTIFIERS):
        return f.body.used_symbols
    if isinstance(f, (And, Or)):
        return frozenset().union(*(p.used_symbols for p in f.parts))
    if isinstance(f, (Implies, Iff)):
        return f.left.used_symbols | f.right.used_symbols
    return frozenset()


def size(f: Formula) -> int:
    n, stack = 0, [f]
    while stack:
        g = stack.pop()
        n += 1
        if isinstance(g, Not) or isinstance(g, QUANTIFIERS):
            stack.append(g.body)
        elif isinstance(g, (And, Or)):
            stack.extend(g.parts)
        elif isinstance(g, (Implies, Iff)):
            stack.extend((g.left, g.right))
    return n
