"""Build the Spark-shaped hydro recipes and report graph size, critical path and reduction.

    python3 scripts/run_spark.py [--out build/spark] [--skeleton]

``--skeleton`` prints the loop and communication structure of each output.
"""

import argparse
import glob
import os
import re
import sys

from pstgen.cli import manifest_stats, write_atomic
from pstgen.driver import build
from pstgen.metrics import format_table
from pstgen.pst import RenderOptions, render
from pstgen.recipe import load_manifest, manifest_variants, read_manifest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SPARK = os.path.join(ROOT, "fixtures", "spark")
SKELETON = re.compile(r"^\s*(do\b|end do|call (fill_guardcells|communicate_fluxes|hy_fluxCorrect))")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(ROOT, "build", "spark"))
    ap.add_argument("--skeleton", action="store_true")
    args = ap.parse_args(argv)

    manifests = sorted(glob.glob(os.path.join(SPARK, "*.yaml")))
    print(f"{'manifest':<38}{'nodes':>6}{'critical path':>15}")
    for manifest in manifests:
        doc = read_manifest(manifest)
        ((variant, output),) = manifest_variants(doc, manifest)
        recipe = load_manifest(doc, SPARK, variant)
        text = render(build(recipe), RenderOptions(indent_width=recipe.render_options.indent_width))
        write_atomic(os.path.join(args.out, output), text)
        name = os.path.basename(manifest)
        print(f"{name:<38}{len(recipe.graph):>6}{len(recipe.graph.longest_path()):>15}")
        if args.skeleton:
            for line in text.splitlines():
                if SKELETON.match(line):
                    print("    " + line)

    reports = [manifest_stats([m]) for m in manifests]
    reports.append(manifest_stats(manifests, "all variants"))
    print()
    print(format_table(reports), end="")
    print(f"\noutputs written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
