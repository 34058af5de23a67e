"""Wall-clock cost of the set-system-to-tree transduction by leaf count.

Times laminar_to_tree on seeded random systems, guarded evaluation only
(unguarded evaluation after copying is out of reach beyond one leaf).
"""
import argparse
import statistics
import time

from laminar_mso.laminar import build_laminar_tree
from laminar_mso.transduction import laminar_to_tree, rooted_tree_iso
from laminar_mso.verify import gen_laminar


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-leaves", type=int, default=12)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'leaves':>6} {'median s':>9} {'max s':>7} {'universe':>9}")
    for n in range(1, args.max_leaves + 1):
        times, sizes = [], []
        for k in range(args.samples):
            system = gen_laminar(args.seed * 1000 + 31 * n + k, n)
            t0 = time.perf_counter()
            out = laminar_to_tree(system.to_structure())
            times.append(time.perf_counter() - t0)
            sizes.append(out.size)
            assert rooted_tree_iso(out, build_laminar_tree(system))
        print(f"{n:6} {statistics.median(times):9.3f} {max(times):7.3f} {max(sizes):9}")


if __name__ == "__main__":
    main()
