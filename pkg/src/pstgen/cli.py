"""Command-line front end.

Exit codes: 0 success, 1 content problems (template, tree, graph or build
findings), 2 I/O failures, 3 malformed structured documents.  Diagnostics
go to standard error; artifacts go to files (``-o``) or standard output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import yaml

from . import __version__
from .cfg import FlowGraph, Handle
from .driver import BuildContext, build, build_report
from .errors import InvalidGraph, PstGenError, SchemaError, TemplateError
from .metrics import ReductionReport, count_generated_lines, count_template_lines, format_table
from .pst import Pst, RenderOptions, attach, dumps, loads, new_tree, render, verify
from .recipe import load_manifest, manifest_variants, read_manifest
from .template import Template, comment_style, load_template, styles_for_path

MANIFEST_EXTS = (".yaml", ".yml", ".json")


class UsageError(PstGenError):
    exit_code = 2


class _FindingsFailed(PstGenError):
    """Findings were already reported; only the exit status remains."""


# -- helpers -------------------------------------------------------------------


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def write_atomic(path: str, text: str) -> None:
    """Write via a sibling temporary file and ``os.replace``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".pstgen-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _styles(args):
    return (comment_style(args.comment_style),) if args.comment_style else None


def _load(path: str, args) -> Template:
    return load_template(path, _styles(args))


def _banner(text: str, source: str, args, style=None) -> str:
    if not args.banner:
        return text
    tok = (style or styles_for_path(source)[0]).line_token
    return f"{tok} generated by pstgen from {os.path.basename(source)}\n" + text


@dataclass
class Findings:
    errors: int = 0
    warnings: int = 0


def _report_findings(tree: Pst, where: str, strict: bool) -> Findings:
    tally = Findings()
    for f in verify(tree):
        is_error = f.severity == "error" or strict
        level = "error" if is_error else "warning"
        _err(f"{where}: {level}: {f}")
        if is_error:
            tally.errors += 1
        else:
            tally.warnings += 1
    return tally


def _compose_tree(args) -> tuple[Pst, Template]:
    root = _load(args.root, args)
    tree = new_tree(root, args.connector, args.indent_width or 2)
    for path in args.templates:
        attach(tree, _load(path, args))
    return tree, root


def _render_options(args, base: RenderOptions | None = None) -> RenderOptions:
    base = base or RenderOptions()
    style = comment_style(args.comment_style) if args.comment_style else base.comment_style
    return RenderOptions(
        verbose=args.verbose_trace or base.verbose,
        comment_style=style,
        indent_width=args.indent_width or base.indent_width,
    )


# -- manifest locations --------------------------------------------------------


def _yaml_locations(path: str) -> dict[tuple, int]:
    """Map JSON-path-like key tuples to 1-based line numbers in a manifest."""
    try:
        with open(path, encoding="utf-8") as fh:
            root = yaml.compose(fh)
    except (OSError, yaml.YAMLError):
        return {}
    where: dict[tuple, int] = {}

    def walk(node, key: tuple) -> None:
        where[key] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                walk(v, key + (k.value,))
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                walk(v, key + (i,))

    if root is not None:
        walk(root, ())
    return where


def _node_lines(path: str) -> dict[str, int]:
    locs = _yaml_locations(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError):
        return {}
    lines = {}
    for i, decl in enumerate((doc or {}).get("nodes") or []):
        if isinstance(decl, dict) and "name" in decl:
            lines[str(decl["name"])] = locs.get(("nodes", i), 1)
    return lines


def _schema_line(path: str, exc: SchemaError) -> int:
    locs = _yaml_locations(path)
    key: list[Any] = []
    for part in exc.path.lstrip("$").replace("]", "").replace("[", ".").split("."):
        if not part:
            continue
        part = part.strip("'\"")
        key.append(int(part) if part.isdigit() else part)
    while key and tuple(key) not in locs:
        key.pop()
    return locs.get(tuple(key), 1)


def describe(graph: FlowGraph, violation) -> str:
    """Human-readable violation text using node names rather than handles."""

    def name(h: Handle) -> str:
        return graph.node(h).name

    kind = type(violation).__name__
    if hasattr(violation, "handle"):
        return f"{kind}: {name(violation.handle)}"
    handles = getattr(violation, "handles", None) or getattr(violation, "nodes", ())
    text = f"{kind}: {', '.join(name(h) for h in handles)}"
    reason = getattr(violation, "reason", None)
    return f"{text} ({reason})" if reason else text


def _violation_line(graph: FlowGraph, violation, lines: dict[str, int]) -> int:
    handles = []
    if hasattr(violation, "handle"):
        handles = [violation.handle]
    else:
        handles = list(getattr(violation, "handles", None) or getattr(violation, "nodes", ()))
    for h in handles:
        node_name = graph.node(h).name
        # subgraph members are named "<subgraph>.<role>"
        for candidate in (node_name, node_name.split(".")[0]):
            if candidate in lines:
                return lines[candidate]
    return 1


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    bad = 0
    for path in args.templates:
        try:
            tpl = _load(path, args)
        except TemplateError as exc:
            _err(f"{exc}")
            bad += 1
            continue
        ids = ", ".join(tpl.connector_ids)
        print(f"{path}: ok ({len(tpl.sections)} connector(s): {ids})")
    return 1 if bad else 0


def cmd_compose(args) -> int:
    tree, root = _compose_tree(args)
    tally = _report_findings(tree, args.root, args.strict)
    if tally.errors:
        return 1
    opts = _render_options(args)
    text = render(tree, opts)
    _emit(_banner(text, args.root, args, opts.comment_style), args.output)
    return 0


def cmd_dump(args) -> int:
    tree, _ = _compose_tree(args)
    if args.strict:
        tally = _report_findings(tree, args.root, True)
        if tally.errors:
            return 1
    _emit(dumps(tree), args.output)
    return 0


def cmd_render(args) -> int:
    with open(args.tree, encoding="utf-8") as fh:
        text = fh.read()
    tree = loads(text, args.indent_width or 2)
    tally = _report_findings(tree, args.tree, args.strict)
    if tally.errors:
        return 1
    opts = _render_options(args)
    _emit(_banner(render(tree, opts), tree.root.source_name, args, opts.comment_style), args.output)
    return 0


def _read_manifest_located(path: str) -> dict:
    try:
        return read_manifest(path)
    except SchemaError as exc:
        raise SchemaError(f"{path}:{_schema_line(path, exc)}: {exc}", exc.path) from None


def _selected_variants(document: dict, path: str, wanted: Sequence[str] | None) -> list[tuple[str, str]]:
    variants = manifest_variants(document, path)
    if not wanted:
        return variants
    known = dict(variants)
    missing = [v for v in wanted if v not in known]
    if missing:
        raise UsageError(f"{path}: unknown variant(s) {', '.join(missing)} (have {', '.join(known)})")
    return [(v, known[v]) for v in wanted]


def cmd_graph(args) -> int:
    document = _read_manifest_located(args.manifest)
    base = os.path.dirname(args.manifest) or "."
    variant = args.variant[0] if args.variant else None
    recipe = load_manifest(document, base, variant)
    graph = recipe.graph
    status = 0
    if args.check:
        violations = graph.validate()
        lines = _node_lines(args.manifest)
        for v in violations:
            _err(f"{args.manifest}:{_violation_line(graph, v, lines)}: {describe(graph, v)}")
        if violations:
            status = 1
        else:
            try:
                recipe.seal()
            except PstGenError as exc:
                _err(f"{args.manifest}: {exc}")
                status = 1
        if status == 0:
            print(f"{args.manifest}: ok ({len(graph)} nodes, {len(graph.edges())} edges)")
    if args.dot:
        name = "".join(c if c.isalnum() else "_" for c in (document.get("name") or "flow"))
        _emit(graph.to_dot(name), args.dot)
    if args.order and status == 0:
        graph.validate()
        for h in graph.traverse():
            node = graph.node(h)
            print(f"{node.kind.value:<8} {node.name}")
    return status


def _build_variant(document: dict, manifest: str, variant: str, args) -> tuple[str, str]:
    base = os.path.dirname(manifest) or "."
    recipe = load_manifest(document, base, variant)
    ctx = BuildContext(recipe)
    try:
        tree = build(recipe, context=ctx)
    except InvalidGraph as exc:
        lines = _node_lines(manifest)
        for v in exc.violations:
            _err(f"{manifest}:{_violation_line(recipe.graph, v, lines)}: {describe(recipe.graph, v)}")
        raise _FindingsFailed() from exc
    except PstGenError:
        _err(f"{manifest} [{variant}]: build log")
        _err(str(build_report(ctx)))
        raise
    if args.log:
        _err(f"{manifest} [{variant}]:")
        _err(str(build_report(ctx)))
    tally = _report_findings(tree, f"{manifest} [{variant}]", args.strict)
    if tally.errors:
        raise _FindingsFailed()
    opts = _render_options(args, recipe.render_options)
    root_file = document["templates"][document["root"]["template"]]
    return recipe.output or "", _banner(render(tree, opts), root_file, args, opts.comment_style)


def cmd_build(args) -> int:
    document = _read_manifest_located(args.manifest)
    for variant, output in _selected_variants(document, args.manifest, args.variant):
        try:
            _, text = _build_variant(document, args.manifest, variant, args)
        except _FindingsFailed:
            return 1
        if args.output == "-":
            sys.stdout.write(text)
            continue
        target = os.path.join(args.output, output)
        write_atomic(target, text)
        print(f"{variant}: {target}")
    return 0


def _is_manifest(path: str) -> bool:
    return path.endswith(MANIFEST_EXTS)


def manifest_stats(manifests: Sequence[str], label: str | None = None) -> ReductionReport:
    """Input lines over every distinct template any variant uses; generated lines over all variants."""
    used: dict[str, Template] = {}
    outputs = []
    names = []
    for manifest in manifests:
        document = read_manifest(manifest)
        base = os.path.dirname(manifest) or "."
        names.append(document.get("name") or os.path.basename(manifest))
        for variant, _ in manifest_variants(document, manifest):
            recipe = load_manifest(document, base, variant)
            tree = build(recipe)
            for tpl in recipe.registry.values():
                used.setdefault(os.path.normpath(os.path.join(base, tpl.source_name)), tpl)
            outputs.append(render(tree, RenderOptions(indent_width=recipe.render_options.indent_width)))
    return ReductionReport(label or " + ".join(names), count_template_lines(used.values()), count_generated_lines(outputs))


def cmd_stats(args) -> int:
    manifests = [p for p in args.inputs if _is_manifest(p)]
    templates = [p for p in args.inputs if not _is_manifest(p)]
    if args.combine and manifests:
        reports = [manifest_stats(manifests, args.label)]
    else:
        reports = [manifest_stats([m]) for m in manifests]
    if templates:
        if not args.generated:
            raise UsageError("stats: template inputs need --generated output files")
        texts = []
        for path in args.generated:
            with open(path, encoding="utf-8") as fh:
                texts.append(fh.read())
        tpls = [_load(p, args) for p in templates]
        reports.append(
            ReductionReport(args.label or "templates", count_template_lines(tpls), count_generated_lines(texts))
        )
    if args.json:
        rows = [
            {"label": r.label, "input": r.input_lines, "generated": r.generated_lines, "reduction": r.reduction}
            for r in reports
        ]
        _emit(json.dumps(rows, indent=2) + "\n", args.output)
    else:
        _emit(format_table(reports), args.output)
    return 0


# -- parser --------------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose-trace", action="store_true", help="wrap rendered levels in trace tags")
    common.add_argument("--comment-style", metavar="c|fortran|TOKEN", help="comment token for directives and tags")
    common.add_argument("--indent-width", type=_positive, metavar="N", help="spaces per indent level (default 2)")
    common.add_argument("--strict", action="store_true", help="treat empty-link warnings as errors")
    common.add_argument("--banner", action="store_true", help="prefix outputs with a generated-file comment")

    parser = argparse.ArgumentParser(prog="pstgen", description="Compose annotated templates into source code.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common], help="parse templates and report problems")
    p.add_argument("templates", nargs="+")
    p.set_defaults(func=cmd_validate)

    for name, func, helptext in (
        ("compose", cmd_compose, "build a tree from templates and render it"),
        ("dump", cmd_dump, "build a tree from templates and write its JSON form"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("root", help="root template")
        p.add_argument("connector", help="connector of the root template that starts the tree")
        p.add_argument("templates", nargs="*", help="templates attached in order")
        p.add_argument("-o", "--output", help="output file (default: standard output)")
        if name == "dump":
            p.add_argument("--json", action="store_true", default=True, help="JSON output (the only format)")
        p.set_defaults(func=func)

    p = sub.add_parser("render", parents=[common], help="render a tree stored as JSON")
    p.add_argument("tree")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("graph", parents=[common], help="load and inspect a recipe manifest")
    p.add_argument("manifest")
    p.add_argument("--check", action="store_true", help="validate the control-flow graph")
    p.add_argument("--dot", metavar="FILE", help="write a Graphviz description ('-' for standard output)")
    p.add_argument("--order", action="store_true", help="print the traversal order")
    p.add_argument("--variant", action="append")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("build", parents=[common], help="build every variant of a recipe manifest")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", default=".", help="output directory ('-' for standard output)")
    p.add_argument("--variant", action="append", help="restrict to this variant (repeatable)")
    p.add_argument("--log", action="store_true", help="print the build log to standard error")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("stats", parents=[common], help="code-reduction table")
    p.add_argument("inputs", nargs="+", help="manifests, or templates together with --generated")
    p.add_argument("--generated", nargs="+", metavar="FILE", help="generated outputs for template inputs")
    p.add_argument("--label", help="row label for template inputs or a combined row")
    p.add_argument("--combine", action="store_true", help="one row for all manifests, counting shared templates once")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PstGenError as exc:
        if not isinstance(exc, _FindingsFailed):
            _err(f"pstgen {args.command}: {exc}")
        return exc.exit_code
    except OSError as exc:
        where = exc.filename or ""
        _err(f"pstgen {args.command}: {where}: {exc.strerror or exc}")
        return 2


def main(argv: Iterable[str] | None = None) -> None:
    sys.exit(run(None if argv is None else list(argv)))
