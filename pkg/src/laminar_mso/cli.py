"""Command-line front end: ``laminar-mso <command> [options]``.

Exit codes: 0 success or true, 1 property false or filter rejected,
2 usage or validation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import formulas as fl
from .laminar import (LaminarError, SetSystem, build_laminar_tree, build_representative_sets,
                      check_laminar, compact_colouring, identifying_colouring, thin_partition)
from .logic.evaluator import Assignment, EvaluationError, Evaluator, ResourceLimitExceeded
from .logic.parser import FormulaSyntaxError, parse_formula
from .logic.printer import pretty, to_text
from .structures import Structure, StructureError
from .transduction import (ENUMERATE, WITNESS, FilterRejectedWitness, NotATree, StepError,
                           desc_part, laminar_to_tree, tree_shape, tree_to_setsystem)
from .verify import (CHECKS, ArityBias, RangeError, VerifyConfig, enumerate_laminar, gen_laminar,
                     run_verification_suite)

OK, FALSE, USAGE = 0, 1, 2


class CliError(Exception):
    pass


# -- io -------------------------------------------------------------------

def _read_text(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str | None):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON: {exc}") from None


def _read_system(args) -> SetSystem:
    return SetSystem.from_json(_read_json(args.input))


def _read_structure(args) -> Structure:
    data = _read_json(args.input)
    if "vocabulary" in data:
        return Structure.from_json(data)
    return SetSystem.from_json(data).to_structure()


def _emit(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(args.output).write_text(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def structure_dot(s: Structure, name: str = "tree") -> str:
    """DOT of a desc-structure; inner nodes are labelled by the leaves below them."""
    shape = tree_shape(s)
    below: dict[str, list[str]] = {}

    def leaves(u: str) -> list[str]:
        if u not in below:
            kids = shape.children[u]
            below[u] = sorted(x for k in kids for x in leaves(k)) if kids else [u]
        return below[u]

    lines = [f"digraph {name} {{", "  node [shape=box];"]
    for u in sorted(shape.children):
        extra = "" if shape.children[u] else ", shape=ellipse"
        lines.append(f'  "{u}" [label="{{{",".join(leaves(u))}}}"{extra}];')
    for u in sorted(shape.children):
        for c in shape.children[u]:
            lines.append(f'  "{u}" -> "{c}";')
    lines.append("}")
    return "\n".join(lines)


def structure_text(s: Structure) -> str:
    shape = tree_shape(s)
    lines: list[str] = []

    def walk(u: str, depth: int) -> None:
        lines.append("  " * depth + u)
        for c in shape.children[u]:
            walk(c, depth + 1)

    walk(shape.root, 0)
    return "\n".join(lines)


# -- commands -------------------------------------------------------------

def cmd_check_laminar(args) -> int:
    ok = check_laminar(_read_system(args))
    if args.format == "json":
        _emit(args, _dump({"laminar": ok}))
    else:
        _emit(args, "laminar" if ok else "not laminar")
    return OK if ok else FALSE


def cmd_build_tree(args) -> int:
    tree = build_laminar_tree(_read_system(args))
    if args.format == "dot":
        _emit(args, tree.to_dot())
    elif args.format == "text":
        lines = [f"{'  ' * tree.depth[t]}{t}: {{{','.join(sorted(tree.leafset[t]))}}}"
                 for t in tree.nodes]
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _dump(tree.to_json()))
    return OK


def cmd_thin_partition(args) -> int:
    tree = build_laminar_tree(_read_system(args))
    tp = thin_partition(tree)
    if args.format == "text":
        _emit(args, "\n".join(f"part {k} (label {tp.part_label[k]}): {sorted(p)}"
                              for k, p in enumerate(tp.parts) if p))
    else:
        _emit(args, _dump(tp.to_json()))
    return OK


def cmd_rep_sets(args) -> int:
    tree = build_laminar_tree(_read_system(args))
    tp = thin_partition(tree)
    out = []
    for k, part in enumerate(tp.parts):
        if part and (args.part is None or args.part == k):
            out.append({"part": k, **build_representative_sets(tree, part).to_json()})
    _emit(args, _dump(out))
    return OK


def cmd_colouring(args) -> int:
    tree = build_laminar_tree(_read_system(args))
    col = identifying_colouring(tree, thin_partition(tree))
    if args.parts != len(col.A):
        col = compact_colouring(col, args.parts)
    _emit(args, _dump(col.to_json()))
    return OK


def cmd_formula(args) -> int:
    f = fl.named_formula(args.name, args.parts)
    _emit(args, pretty(f) if args.format == "text" else to_text(f))
    return OK


def cmd_eval(args) -> int:
    if (args.formula is None) == (args.formula_file is None):
        raise CliError("give exactly one of --formula and --formula-file")
    text = args.formula if args.formula is not None else _read_text(args.formula_file)
    st = _read_structure(args)
    f = parse_formula(text, st.vocabulary)
    assignment = Assignment()
    if args.assignment:
        raw = args.assignment
        data = json.loads(raw) if raw.lstrip().startswith("{") else _read_json(raw)
        assignment = Assignment.from_json(data)
    ev = Evaluator(st, guarded=not args.unguarded, max_subset_universe=args.max_subset_universe)
    value = ev.evaluate(f, assignment)
    _emit(args, _dump({"value": value}) if args.format == "json" else str(value).lower())
    return OK if value else FALSE


def _render_structure(args, out: Structure) -> None:
    if args.format == "dot":
        _emit(args, structure_dot(desc_part(out)))
    elif args.format == "text":
        _emit(args, structure_text(desc_part(out)))
    else:
        _emit(args, out.dumps())


def cmd_transduce(args) -> int:
    trace: list = []
    try:
        out = laminar_to_tree(_read_structure(args), args.policy, args.parts,
                              strip_set=args.strip_set, max_subset_universe=args.max_subset_universe,
                              trace=trace)
    except FilterRejectedWitness as exc:
        print(f"filter rejected: {exc}", file=sys.stderr)
        return FALSE
    finally:
        if args.trace:
            Path(args.trace).write_text(_dump(trace) + "\n")
    _render_structure(args, out)
    return OK


def cmd_roundtrip(args) -> int:
    st = _read_structure(args)
    system = SetSystem.from_structure(tree_to_setsystem(desc_part(st),
                                                        max_subset_universe=args.max_subset_universe))
    _emit(args, system.dumps() if args.format != "text" else "\n".join(
        "{" + ",".join(s) + "}" for s in system.sorted_sets()))
    return OK


def cmd_gen(args) -> int:
    system = gen_laminar(args.seed, args.leaves, ArityBias(args.binary, args.max_arity))
    _emit(args, system.dumps())
    return OK


def cmd_enumerate(args) -> int:
    corpus = enumerate_laminar(args.leaves)
    if args.format == "text":
        _emit(args, str(len(corpus)))
    else:
        _emit(args, json.dumps([s.to_json() for s in corpus]))
    return OK


def cmd_verify(args) -> int:
    cfg = VerifyConfig(seed=args.seed, parts=args.parts, max_subset_universe=args.max_subset_universe)
    if args.max_leaves is not None:
        m = args.max_leaves
        cfg = replace(cfg, end_to_end_leaves=min(cfg.end_to_end_leaves, m),
                      unique_rep_leaves=min(cfg.unique_rep_leaves, m),
                      exhaustive_leaves=min(cfg.exhaustive_leaves, m),
                      random_leaves=min(cfg.random_leaves, m), chi_leaves=min(cfg.chi_leaves, m),
                      formula_leaves=min(cfg.formula_leaves, m), guard_leaves=min(cfg.guard_leaves, m))
    if args.checks:
        names = tuple(c.strip() for c in args.checks.split(",") if c.strip())
        unknown = sorted(set(names) - set(CHECKS))
        if unknown:
            raise CliError(f"unknown checks {unknown}; known: {sorted(CHECKS)}")
        cfg = replace(cfg, checks=names)
    report = run_verification_suite(cfg)
    _emit(args, report.dumps() if args.format == "json" else report.to_text())
    return OK if report.ok else FALSE


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", "-i", default="-", help="input JSON file (default: stdin)")
    shared.add_argument("--output", "-o", default="-", help="output file (default: stdout)")
    shared.add_argument("--format", "-f", choices=("json", "dot", "text"), default=None,
                        help="output format (default depends on the command)")
    shared.add_argument("--parts", type=int, default=16, help="number of colour parts")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--max-subset-universe", type=int, default=None,
                        help="largest set quantified over exhaustively")

    parser = argparse.ArgumentParser(prog="laminar-mso", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[shared], help=help_)
        p.set_defaults(func=fn)
        return p

    add("check-laminar", cmd_check_laminar, "is the set system laminar")
    add("build-tree", cmd_build_tree, "laminar tree of a set system")
    add("thin-partition", cmd_thin_partition, "16 thin parts of the inner nodes")
    p = add("rep-sets", cmd_rep_sets, "representative trees and sets per thin part")
    p.add_argument("--part", type=int, default=None)
    add("colouring", cmd_colouring, "identifying colouring")
    p = add("formula", cmd_formula, "print a catalogue formula")
    p.add_argument("name", help="e.g. CHILD, REP*_A, chi, leader_3, evenleaf_2")
    p = add("eval", cmd_eval, "evaluate a formula on a structure")
    p.add_argument("--formula", default=None, help="formula text")
    p.add_argument("--formula-file", default=None)
    p.add_argument("--assignment", default=None, help="inline JSON object or path")
    p.add_argument("--unguarded", action="store_true", help="quantify over full domains")
    p = add("transduce", cmd_transduce, "set system to laminar tree structure")
    p.add_argument("--policy", choices=(WITNESS, ENUMERATE), default=WITNESS)
    p.add_argument("--strip-set", action="store_true", help="output desc only")
    p.add_argument("--trace", default=None, help="write the pipeline trace JSON here")
    add("roundtrip", cmd_roundtrip, "tree structure back to its set system")
    p = add("gen", cmd_gen, "random laminar system")
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--binary", type=float, default=0.5, help="probability of a binary split")
    p.add_argument("--max-arity", type=int, default=4)
    p = add("enumerate", cmd_enumerate, "all laminar systems on n leaves")
    p.add_argument("--leaves", type=int, required=True)
    p = add("verify", cmd_verify, "run the verification suite")
    p.add_argument("--max-leaves", type=int, default=None)
    p.add_argument("--checks", default=None, help="comma-separated subset of " + ",".join(sorted(CHECKS)))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except (CliError, StructureError, LaminarError, FormulaSyntaxError, EvaluationError,
            StepError, NotATree, RangeError, ResourceLimitExceeded, fl.UnknownPredicateName,
            fl.IndexOutOfRange, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
