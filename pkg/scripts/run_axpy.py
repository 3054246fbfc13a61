"""Build the five AXPY variants along both tool chains and tabulate code reduction.

    python3 scripts/run_axpy.py [--out build/axpy] [--compile]

``--compile`` smoke-tests the OpenMP outputs with gcc when it is available.
"""

import argparse
import os
import shutil
import subprocess
import sys

from pstgen.cli import manifest_stats, write_atomic
from pstgen.driver import build
from pstgen.metrics import ReductionReport, count_generated_lines, count_template_lines, format_table
from pstgen.pst import RenderOptions, attach, new_tree, render
from pstgen.recipe import load_manifest, manifest_variants, read_manifest
from pstgen.template import load_template

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
AXPY = os.path.join(ROOT, "fixtures", "axpy")
MANIFESTS = [os.path.join(AXPY, m) for m in ("axpy_openmp.yaml", "axpy_cuda.yaml")]


def pst_only(variant, ext):
    files = ["driver.c", os.path.join("pst_only", variant + ext), "kernel.c"]
    tpls = [load_template(os.path.join(AXPY, f)) for f in files]
    tree = new_tree(tpls[0], "driver")
    for tpl in tpls[1:]:
        attach(tree, tpl)
    return render(tree), tpls


def smoke_compile(path, workdir):
    exe = os.path.join(workdir, os.path.splitext(os.path.basename(path))[0])
    cmd = ["gcc", "-O2", "-fopenmp", path, "-o", exe, "-lm"]
    subprocess.run(cmd, check=True)
    result = subprocess.run([exe], capture_output=True, text=True, check=True)
    return result.stdout.strip()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(ROOT, "build", "axpy"))
    ap.add_argument("--compile", action="store_true", help="compile and run the OpenMP outputs with gcc")
    args = ap.parse_args(argv)

    pst_inputs = {}
    outputs = []
    mismatches = 0
    print(f"{'variant':<22}{'lines':>6}  dual path")
    for manifest in MANIFESTS:
        doc = read_manifest(manifest)
        for variant, output in manifest_variants(doc, manifest):
            recipe = load_manifest(doc, AXPY, variant)
            text = render(build(recipe), RenderOptions(indent_width=recipe.render_options.indent_width))
            composed, tpls = pst_only(variant, os.path.splitext(output)[1])
            pst_inputs.update((t.source_name, t) for t in tpls)
            same = text == composed
            mismatches += not same
            write_atomic(os.path.join(args.out, output), text)
            outputs.append(text)
            print(f"{variant:<22}{count_generated_lines([text]):>6}  {'identical' if same else 'DIFFERENT'}")

    generated = count_generated_lines(outputs)
    print()
    print(
        format_table(
            [
                ReductionReport("PST only", count_template_lines(pst_inputs.values()), generated),
                manifest_stats(MANIFESTS, "Recipe, Control Flow Graph, PST"),
            ]
        ),
        end="",
    )
    print(f"\noutputs written to {args.out}")

    if args.compile:
        if shutil.which("gcc") is None:
            print("gcc not found; skipping smoke compile")
        else:
            for name in sorted(os.listdir(args.out)):
                if name.endswith(".c"):
                    print(f"{name}: {smoke_compile(os.path.join(args.out, name), args.out)}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
