"""Measure what the bounding-box pre-check buys on a large volume.

Rasterizes the same contour stack with and without the pre-check,
checks the outputs are byte-identical, and reports wall-clock times.

    python3 scripts/bench_bbox.py --size 256 --slices 50
"""

from __future__ import annotations

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from segstudio import Contour, ContourSet, MetaDescriptor, RasterizeOptions, rasterize, write_nrrd


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=256, help="cubic grid edge length")
    ap.add_argument("--slices", type=int, default=50, help="number of contour-bearing slices")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    n = args.size
    meta = MetaDescriptor(
        sizes=(n, n, n),
        space_origin=(0.0, 0.0, 0.0),
        space_directions=((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
        space="right-anterior-superior",
    )
    lo, hi = 0.3 * n, 0.7 * n
    k0 = (n - args.slices) // 2
    cs = ContourSet(
        tuple(
            Contour(k, [(lo, lo), (hi, lo), (hi, hi), (lo, hi)])
            for k in range(k0, k0 + args.slices)
        ),
        meta,
    )
    coverage = ((hi - lo + 1) ** 2 * args.slices) / n**3
    print(f"grid {n}^3, {args.slices} slices, box coverage {coverage * 100:.2f}%")

    rasterize(ContourSet(cs.contours[:1], meta), meta)  # warm up
    timings = {}
    for label, use_box in (("with pre-check", True), ("without pre-check", False)):
        options = RasterizeOptions(use_bounding_box=use_box)
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            mask = rasterize(cs, meta, options=options)
            best = min(best, time.perf_counter() - t0)
        timings[use_box] = best
        print(f"{label:>18}: {best * 1000:8.1f} ms")
        if use_box:
            reference = write_nrrd(mask)
        else:
            assert write_nrrd(mask) == reference, "outputs differ"
    print(f"outputs byte-identical; speedup {timings[False] / timings[True]:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
