"""Extended relational structures over vocabularies with set predicates.

A structure interprets two kinds of symbols: relation names (tuples of
elements) and set-predicate names (collections of subsets of the universe).
Structures are immutable and canonical, so equality is plain comparison.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import chain
from typing import Iterable, Mapping

RELATION = "relation"
SETPRED = "setpred"

# Separator reserved for flattened copy ids: (i, a) with i >= 1 becomes "i#a".
COPY_SEP = "#"


class StructureError(ValueError):
    pass


class UnknownSymbol(StructureError):
    pass


class ArityMismatch(StructureError):
    pass


class ElementOutOfUniverse(StructureError):
    pass


class EmptyUniverse(StructureError):
    pass


class ArityConflict(StructureError):
    pass


@dataclass(frozen=True, order=True)
class Symbol:
    name: str
    kind: str
    arity: int

    def __post_init__(self):
        if self.kind not in (RELATION, SETPRED):
            raise StructureError(f"unknown symbol kind {self.kind!r}")
        if self.arity < 1:
            raise StructureError(f"symbol {self.name} needs arity >= 1")


@dataclass(frozen=True)
class Vocabulary:
    symbols: tuple[Symbol, ...] = ()

    def __post_init__(self):
        syms = tuple(sorted(self.symbols))
        names = [s.name for s in syms]
        if len(set(names)) != len(names):
            raise StructureError(f"duplicate symbol names in {names}")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def of(cls, *specs: tuple[str, str, int]) -> "Vocabulary":
        return cls(tuple(Symbol(*s) for s in specs))

    def __contains__(self, name: str) -> bool:
        return any(s.name == name for s in self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def get(self, name: str) -> Symbol:
        for s in self.symbols:
            if s.name == name:
                return s
        raise UnknownSymbol(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def union(self, other: "Vocabulary") -> "Vocabulary":
        merged = {s.name: s for s in self.symbols}
        for s in other.symbols:
            if s.name in merged and merged[s.name] != s:
                raise ArityConflict(f"{s.name}: {merged[s.name]} vs {s}")
            merged[s.name] = s
        return Vocabulary(tuple(merged.values()))


SET_VOCAB = Vocabulary.of(("SET", SETPRED, 1))
DESC_VOCAB = Vocabulary.of(("desc", RELATION, 2))


@dataclass(frozen=True, eq=True)
class Structure:
    vocabulary: Vocabulary
    universe: tuple[str, ...]
    relations: Mapping[str, frozenset[tuple[str, ...]]] = field(default_factory=dict)
    set_predicates: Mapping[str, frozenset[frozenset[str]]] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    @property
    def size(self) -> int:
        return len(self.universe)

    def relation(self, name: str) -> frozenset[tuple[str, ...]]:
        return self.relations[name]

    def setpred(self, name: str) -> frozenset[frozenset[str]]:
        return self.set_predicates[name]

    def to_json(self) -> dict:
        return {
            "vocabulary": [
                {"name": s.name, "kind": s.kind, "arity": s.arity}
                for s in self.vocabulary
            ],
            "universe": list(self.universe),
            "relations": {
                name: [list(t) for t in sorted(tuples)]
                for name, tuples in sorted(self.relations.items())
            },
            "setPredicates": {
                name: [list(s) for s in _sorted_sets(sets)]
                for name, sets in sorted(self.set_predicates.items())
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "Structure":
        vocab = Vocabulary(
            tuple(Symbol(d["name"], d["kind"], d["arity"]) for d in data["vocabulary"])
        )
        interps: dict[str, Iterable] = {}
        interps.update(data.get("relations", {}))
        interps.update(data.get("setPredicates", {}))
        return make_structure(vocab, data["universe"], interps)

    @classmethod
    def loads(cls, text: str) -> "Structure":
        return cls.from_json(json.loads(text))


def _sorted_sets(sets: Iterable[Iterable[str]]) -> list[tuple[str, ...]]:
    # larger sets first, then lexicographic: {a,b} < {a} < {b}
    return sorted((tuple(sorted(s)) for s in sets), key=lambda t: (-len(t), t))


def make_structure(
    vocabulary: Vocabulary,
    universe: Iterable[str],
    interpretations: Mapping[str, Iterable] | None = None,
) -> Structure:
    """Validate and canonicalise a structure.

    ``interpretations`` maps each symbol name to its tuples (relations) or to
    its member sets (set predicates). Symbols without an entry are empty.
    """
    universe = tuple(sorted(set(universe)))
    if not universe:
        raise EmptyUniverse("structures need a nonempty universe")
    uset = frozenset(universe)
    interpretations = dict(interpretations or {})
    for name in interpretations:
        if name not in vocabulary:
            raise UnknownSymbol(name)

    relations: dict[str, frozenset] = {}
    set_predicates: dict[str, frozenset] = {}
    for sym in vocabulary:
        raw = interpretations.get(sym.name, ())
        if sym.kind == RELATION:
            tuples = frozenset(tuple(t) for t in raw)
            for t in tuples:
                if len(t) != sym.arity:
                    raise ArityMismatch(f"{sym.name}{t}: expected arity {sym.arity}")
                if not uset.issuperset(t):
                    raise ElementOutOfUniverse(f"{sym.name}{t}")
            relations[sym.name] = tuples
        else:
            if sym.arity != 1:
                raise ArityMismatch(f"set predicate {sym.name} must be unary")
            sets = frozenset(frozenset(s) for s in raw)
            for s in sets:
                if not s <= uset:
                    raise ElementOutOfUniverse(f"{sym.name}({sorted(s)})")
            set_predicates[sym.name] = sets
    return Structure(vocabulary, universe, relations, set_predicates)


def union(a: Structure, b: Structure) -> Structure:
    """The union of two structures; shared symbols get the union of interpretations."""
    vocab = a.vocabulary.union(b.vocabulary)
    interps: dict[str, set] = {}
    for st in (a, b):
        for name, val in chain(st.relations.items(), st.set_predicates.items()):
            interps.setdefault(name, set()).update(val)
    return make_structure(vocab, set(a.universe) | set(b.universe), interps)


def copy_id(i: int, base: str) -> str:
    return base if i == 0 else f"{i}{COPY_SEP}{base}"


def base_of(elem: str) -> tuple[int, str]:
    """Inverse of :func:`copy_id`."""
    head, sep, tail = elem.partition(COPY_SEP)
    if sep and head.isdigit():
        return int(head), tail
    return 0, elem
