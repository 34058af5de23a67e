"""Compare the implemented representative-set formula with its printed readings.

For every laminar system up to --leaves leaves and every thin part, count the
(R, X) pairs where REP*_A disagrees with the native representative sets, for:
the implemented formula, the printed reading (colour-relative branching, no
R ⊆ R' in maximality), and reflexive descendant atoms. Also prints the
even-leaf sharpness witness and the printed laminarity sentence's verdict on a
crossing family.
"""
import argparse
from collections import Counter
from itertools import combinations

from laminar_mso import formulas as fl
from laminar_mso.laminar import (SetSystem, build_laminar_tree, build_representative_sets,
                                 check_laminar, identifying_colouring, thin_partition)
from laminar_mso.logic import Evaluator, evaluate
from laminar_mso.transduction import coloured_structure
from laminar_mso.verify import RootedTree, evenleaf_native, exhaustive_corpus

VARIANTS = {"implemented": {}, "printed": {"printed": True}, "reflexive": {"strict": False}}


def mismatches(system: SetSystem, options: dict) -> int:
    tree = build_laminar_tree(system)
    tp = thin_partition(tree)
    ev = Evaluator(coloured_structure(system, identifying_colouring(tree, tp)))
    u = tree.universe
    subsets = [frozenset(c) for k in range(len(u) + 1) for c in combinations(u, k)]
    bad = 0
    for i, part in enumerate(tp.parts, start=1):
        if not part:
            continue
        rep = build_representative_sets(tree, part)
        f = fl.rep_formula(f"A_{i}", True, **options)
        owner = {tree.leafset[t]: t for t in part}
        for X in subsets:
            for R in subsets:
                expected = X in owner and rep.sets[owner[X]] == R
                bad += ev.evaluate(f, {"R": R, "X": X}) != expected
    return bad


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--leaves", type=int, default=4)
    args = ap.parse_args()

    corpus = exhaustive_corpus(args.leaves)
    for name, options in VARIANTS.items():
        per_system = Counter()
        for system in corpus:
            per_system[mismatches(system, options) > 0] += 1
        print(f"{name:12} systems with mismatches: {per_system[True]}/{len(corpus)}")

    star = RootedTree((None, 0, 0, 0))
    X = frozenset(star.leaves())
    names = {star.name(v) for v in X}
    print("evenleaf_1 on the 3-leaf star, X = all leaves:",
          evaluate(star.structure(), fl.evenleaf(1), {"X": names}),
          "| witness search:", evenleaf_native(star, X, 1))

    crossing = SetSystem("abc", ["abc", "a", "b", "c", "ab", "bc"])
    print("crossing family: laminar =", check_laminar(crossing),
          "| printed sentence =", evaluate(crossing.to_structure(), fl.laminarity_sentence(False)),
          "| corrected sentence =", evaluate(crossing.to_structure(), fl.laminarity_sentence(True)))


if __name__ == "__main__":
    main()
