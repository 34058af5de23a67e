"""Canonical s-expression printer."""
from __future__ import annotations

from .syntax import (And, Eq, Exists, ExistsSet, Forall, ForallSet, Formula, Iff,
                     Implies, In, Not, Or, Pred, Rel, SetEq, Subset)

_QUANT = {Exists: "exists", Forall: "forall", ExistsSet: "existsSet", ForallSet: "forallSet"}


def to_text(f: Formula) -> str:
    out: list[str] = []
    _emit(f, out)
    return "".join(out)


def _emit(f: Formula, out: list[str]) -> None:
    if isinstance(f, Rel):
        out.append(f"(rel {f.name}{''.join(' ' + a for a in f.args)})")
    elif isinstance(f, Pred):
        out.append(f"(pred {f.name} {f.var})")
    elif isinstance(f, In):
        out.append(f"(in {f.elem} {f.setvar})")
    elif isinstance(f, Eq):
        out.append(f"(= {f.left} {f.right})")
    elif isinstance(f, SetEq):
        out.append(f"(seteq {f.left} {f.right})")
    elif isinstance(f, Subset):
        out.append(f"(subset {f.left} {f.right})")
    elif isinstance(f, Not):
        out.append("(not ")
        _emit(f.body, out)
        out.append(")")
    elif isinstance(f, (And, Or)):
        out.append("(and" if isinstance(f, And) else "(or")
        for p in f.parts:
            out.append(" ")
            _emit(p, out)
        out.append(")")
    elif isinstance(f, (Implies, Iff)):
        out.append("(implies " if isinstance(f, Implies) else "(iff ")
        _emit(f.left, out)
        out.append(" ")
        _emit(f.right, out)
        out.append(")")
    elif type(f) in _QUANT:
        out.append(f"({_QUANT[type(f)]} {f.var} ")
        _emit(f.body, out)
        out.append(")")
    else:
        raise TypeError(f"not a formula: {f!r}")


def pretty(f: Formula, indent: int = 2) -> str:
    """Multi-line rendering for humans; parses back to the same formula."""
    lines: list[str] = []

    def go(g: Formula, depth: int) -> None:
        pad = " " * (indent * depth)
        flat = to_text(g)
        if len(flat) + len(pad) <= 88:
            lines.append(pad + flat)
            return
        if isinstance(g, (And, Or)):
            lines.append(pad + ("(and" if isinstance(g, And) else "(or"))
            kids = g.parts
        elif isinstance(g, (Implies, Iff)):
            lines.append(pad + ("(implies" if isinstance(g, Implies) else "(iff"))
            kids = (g.left, g.right)
        elif isinstance(g, Not):
            lines.append(pad + "(not")
            kids = (g.body,)
        else:
            lines.append(pad + f"({_QUANT[type(g)]} {g.var}")
            kids = (g.body,)
        for k in kids:
            go(k, depth + 1)
        lines[-1] += ")"

    go(f, 0)
    return "\n".join(lines)
