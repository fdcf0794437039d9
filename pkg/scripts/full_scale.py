"""Build a basemap at the size of the 2007 category set (221 categories, 18 factors).

Uses a synthetic block matrix unless ``--matrix`` and ``--registry`` point at
real data. Prints timings, convergence and the factor sizes.
"""

from __future__ import annotations

import argparse
import time

from overlaymap import LayoutConfig, build_basemap, load_citation_matrix, load_registry
from overlaymap.synthetic import block_citation_matrix, block_registry


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--matrix")
    ap.add_argument("--registry")
    ap.add_argument("--factors", type=int, default=18)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-steps", type=int, default=100_000)
    ap.add_argument("--out", help="write the basemap here")
    args = ap.parse_args()

    if args.matrix and args.registry:
        registry = load_registry(args.registry)
        matrix = load_citation_matrix(args.matrix, registry)
    else:
        sizes = [13] * 17
        registry, matrix = block_registry(sizes), block_citation_matrix(sizes, seed=args.seed)

    t0 = time.perf_counter()
    bm, layout, _, fa = build_basemap(
        matrix, registry, 0.15, args.factors, LayoutConfig(seed=args.seed, max_steps=args.max_steps)
    )
    elapsed = time.perf_counter() - t0
    print(f"{bm.size} nodes, {bm.network.n_edges} edges, {bm.n_factors} factors in {elapsed:.1f} s")
    print(f"stress {layout.initial_stress:.6g} -> {layout.final_stress:.6g} ({layout.reason}, {layout.steps} steps)")
    print(f"factor sizes: {bm.factor_sizes()}")
    if fa.ties:
        print(f"ties: {list(fa.ties)}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(bm.serialize())


if __name__ == "__main__":
    main()
