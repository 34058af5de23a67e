"""Parser for the s-expression formula grammar.

    atoms        (rel NAME x ...) (pred NAME X) (in x X) (= x y)
                 (seteq X Y) (subset X Y)
    connectives  (not f) (and f ...) (or f ...) (implies f g) (iff f g)
    quantifiers  (exists x f) (forall x f) (existsSet X f) (forallSet X f);
                 exists/forall over an uppercase variable quantify a set

A ``;`` starts a comment running to the end of the line.
"""
from __future__ import annotations

import re

from ..structures import RELATION, SETPRED, ArityMismatch, UnknownSymbol, Vocabulary
from .syntax import (And, Eq, Exists, ExistsSet, Forall, ForallSet, Formula, Iff,
                     Implies, In, Not, Or, Pred, Rel, SetEq, Subset, is_element_var,
                     is_set_var)

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s();]+))")
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise FormulaSyntaxError("unexpected character", pos)
        comment, lp, rp, atom = m.groups()
        start = m.start(m.lastindex) if m.lastindex else pos
        if lp:
            tokens.append(("(", start))
        elif rp:
            tokens.append((")", start))
        elif atom:
            tokens.append((atom, start))
        pos = m.end()
    return tokens


def _read(tokens: list[tuple[str, int]], i: int, text_len: int):
    """Read one s-expression starting at token i; return (tree, next index)."""
    if i >= len(tokens):
        raise FormulaSyntaxError("unexpected end of input", text_len)
    tok, pos = tokens[i]
    if tok == ")":
        raise FormulaSyntaxError("unexpected ')'", pos)
    if tok != "(":
        return (tok, pos), i + 1
    items = []
    i += 1
    while True:
        if i >= len(tokens):
            raise FormulaSyntaxError("unbalanced parenthesis opened", pos)
        if tokens[i][0] == ")":
            return (items, pos), i + 1
        item, i = _read(tokens, i, text_len)
        items.append(item)


def parse_formula(text: str, vocabulary: Vocabulary | None = None) -> Formula:
    """Parse ``text``; with a vocabulary, symbol names and arities are checked."""
    tokens = _tokenize(text)
    tree, nxt = _read(tokens, 0, len(text))
    if nxt != len(tokens):
        raise FormulaSyntaxError("trailing input", tokens[nxt][1])
    return _build(tree, vocabulary)


def _atom(item, what: str) -> str:
    val, pos = item
    if isinstance(val, list):
        raise FormulaSyntaxError(f"expected {what}, got a list", pos)
    if not _NAME.match(val):
        raise FormulaSyntaxError(f"bad {what} {val!r}", pos)
    return val


def _evar(item) -> str:
    name = _atom(item, "element variable")
    if not is_element_var(name):
        raise FormulaSyntaxError(f"{name!r} is not an element variable", item[1])
    return name


def _svar(item) -> str:
    name = _atom(item, "set variable")
    if not is_set_var(name):
        raise FormulaSyntaxError(f"{name!r} is not a set variable", item[1])
    return name


def _check_symbol(vocab, name, kind, arity):
    if vocab is None:
        return
    sym = vocab.get(name)  # raises UnknownSymbol
    if sym.kind != kind:
        raise UnknownSymbol(f"{name} is a {sym.kind}, used as {kind}")
    if sym.arity != arity:
        raise ArityMismatch(f"{name} has arity {sym.arity}, used with {arity}")


def _build(tree, vocab) -> Formula:
    val, pos = tree
    if not isinstance(val, list) or not val:
        raise FormulaSyntaxError("expected a parenthesised formula", pos)
    head_item, *args = val
    head = head_item[0]
    if isinstance(head, list):
        raise FormulaSyntaxError("expected an operator", head_item[1])

    def need(n):
        if len(args) != n:
            raise FormulaSyntaxError(f"{head} takes {n} arguments, got {len(args)}", pos)

    if head == "rel":
        if len(args) < 2:
            raise FormulaSyntaxError("rel needs a name and arguments", pos)
        name = _atom(args[0], "relation name")
        vs = tuple(_evar(a) for a in args[1:])
        _check_symbol(vocab, name, RELATION, len(vs))
        return Rel(name, vs)
    if head == "pred":
        need(2)
        name = _atom(args[0], "predicate name")
        _check_symbol(vocab, name, SETPRED, 1)
        return Pred(name, _svar(args[1]))
    if head == "in":
        need(2)
        return In(_evar(args[0]), _svar(args[1]))
    if head == "=":
        need(2)
        return Eq(_evar(args[0]), _evar(args[1]))
    if head in ("seteq", "subset"):
        need(2)
        cls = SetEq if head == "seteq" else Subset
        return cls(_svar(args[0]), _svar(args[1]))
    if head == "not":
        need(1)
        return Not(_build(args[0], vocab))
    if head in ("and", "or"):
        parts = tuple(_build(a, vocab) for a in args)
        return And(parts) if head == "and" else Or(parts)
    if head in ("implies", "iff"):
        need(2)
        cls = Implies if head == "implies" else Iff
        return cls(_build(args[0], vocab), _build(args[1], vocab))
    if head in ("exists", "forall"):
        need(2)
        # the quantified variable's case picks the kind; the printer emits existsSet/forallSet
        name = _atom(args[0], "variable")
        if is_set_var(name):
            cls = ExistsSet if head == "exists" else ForallSet
        else:
            cls = Exists if head == "exists" else Forall
        return cls(name, _build(args[1], vocab))
    if head in ("existsSet", "forallSet"):
        need(2)
        cls = ExistsSet if head == "existsSet" else ForallSet
        return cls(_svar(args[0]), _build(args[1], vocab))
    raise FormulaSyntaxError(f"unknown operator {head!r}", head_item[1])
