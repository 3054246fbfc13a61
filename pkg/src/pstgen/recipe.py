"""Recipes: building control-flow graphs from node declarations.

Two front ends produce the same :class:`Recipe`.  Library users call
``recipe.add(node)(deps)`` directly, mirroring the define-and-run style of a
Python script.  CLI users write a manifest (YAML or JSON) that declares
templates, nodes and their dependencies; see ``docs/manifest.md``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Mapping

import jsonschema
import yaml

from .cfg import (
    Action,
    BeginNode,
    CodeGenNode,
    EndNode,
    Family,
    FlowGraph,
    Handle,
    NodeSpec,
    NullNode,
)
from .errors import (
    EmptyDeps,
    InvalidGraph,
    RecipeError,
    SchemaError,
    UnknownDependency,
    UnknownTemplate,
)
from .pst import RenderOptions
from .template import Template, comment_style, load_template

SubgraphFn = Callable[[Any, Any, Any], Handle]


def loop_pair(
    family: Family | str = Family.LOOP,
    begin: Action | None = None,
    end: Action | None = None,
    name: str = "loop",
) -> tuple[BeginNode, EndNode]:
    """A mutually linked begin/end node pair.

    ``begin`` is the region template (a section with one interior link);
    ``end`` is an optional footer attached after the region closes.
    """
    family = Family(family)
    b = BeginNode(f"{name}.begin", family, begin)
    e = EndNode(f"{name}.end", family, end)
    b.partner, e.partner = e, b
    return b, e


def _member(nodes: Any, key: str) -> NodeSpec:
    if isinstance(nodes, Mapping):
        return nodes[key]
    return getattr(nodes, key)


def _null(nodes: Any) -> NodeSpec:
    try:
        return _member(nodes, "null")
    except (KeyError, AttributeError):
        return NullNode()


def subgraph_block_init(recipe, root, nodes) -> Handle:
    """Shock detection and solution initialization side by side, joined by a null node."""
    shock_det = recipe.add(_member(nodes, "shockDet"))(root)
    init_soln = recipe.add(_member(nodes, "initSoln"))(root)
    return recipe.add(_null(nodes))([shock_det, init_soln])


def subgraph_intra_stage(recipe, root, nodes) -> Handle:
    """One Runge-Kutta stage: limiters and fluxes, then the buffer/update branches."""
    grv_accel = recipe.add(_member(nodes, "grvAccel"))(root)
    calc_lims = recipe.add(_member(nodes, "calcLims"))(grv_accel)
    calc_flux = recipe.add(_member(nodes, "calcFlux"))(calc_lims)
    flux_buff = recipe.add(_member(nodes, "fluxBuff"))(calc_flux)
    upd_soln = recipe.add(_member(nodes, "updSoln"))(calc_flux)
    calc_eos = recipe.add(_member(nodes, "calcEos"))(upd_soln)
    return recipe.add(_null(nodes))([flux_buff, calc_eos])


BUILTIN_SUBGRAPHS: dict[str, tuple[SubgraphFn, tuple[str, ...]]] = {
    "spark_block_init": (subgraph_block_init, ("shockDet", "initSoln")),
    "spark_intra_stage": (
        subgraph_intra_stage,
        ("grvAccel", "calcLims", "calcFlux", "fluxBuff", "updSoln", "calcEos"),
    ),
}


@dataclass
class Recipe:
    name: str = "recipe"
    graph: FlowGraph = field(default_factory=FlowGraph)
    registry: dict[str, Template] = field(default_factory=dict)
    subgraphs: dict[str, tuple[SubgraphFn, tuple[str, ...]]] = field(
        default_factory=lambda: dict(BUILTIN_SUBGRAPHS)
    )
    root_binding: tuple[str, str] | None = None
    render_options: RenderOptions = field(default_factory=RenderOptions)
    output: str | None = None

    @property
    def root(self) -> Handle:
        return self.graph.root

    def add(self, node: NodeSpec, deps=None):
        return self.graph.add(node, deps)

    def register(self, alias: str, template: Template) -> None:
        self.registry[alias] = template

    def template(self, alias: str) -> Template:
        try:
            return self.registry[alias]
        except KeyError:
            raise UnknownTemplate(f"{self.name}: template {alias!r} is not registered") from None

    def seal(self) -> "Recipe":
        """Validate the graph and check every action against the registry."""
        violations = self.graph.validate()
        if violations:
            raise InvalidGraph(violations)
        for h in self.graph.handles():
            node = self.graph.node(h)
            action = node.action
            if action is None:
                continue
            tpl = self.template(action.template)
            missing = [c for c in action.connectors if c not in tpl.connector_ids]
            if missing:
                raise UnknownTemplate(
                    f"{self.name}: node {node.name!r} selects connector(s) "
                    f"{', '.join(missing)} absent from {tpl.source_name}"
                )
        if self.root_binding is not None:
            alias, connector = self.root_binding
            if connector not in self.template(alias).connector_ids:
                raise UnknownTemplate(
                    f"{self.name}: root connector {connector!r} absent from {alias!r}"
                )
        return self


# -- manifests -----------------------------------------------------------------


def manifest_schema() -> dict:
    text = resources.files("pstgen").joinpath("manifest.schema.json").read_text("utf-8")
    return json.loads(text)


def read_manifest(path: str | os.PathLike) -> dict:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"{os.fspath(path)}: not a YAML/JSON document ({exc})") from None
    check_manifest(document)
    return document


def check_manifest(document: Any) -> None:
    validator = jsonschema.Draft202012Validator(manifest_schema())
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, err.json_path)


def manifest_variants(document: Mapping, manifest_path: str = "manifest") -> list[tuple[str, str]]:
    """``(variant name, output file name)`` pairs; one implicit variant if none are declared."""
    variants = document.get("variants")
    if variants:
        return [(name, spec["output"]) for name, spec in variants.items()]
    stem = os.path.splitext(os.path.basename(manifest_path))[0]
    root_file = document["templates"].get(document["root"]["template"], "")
    return [("default", stem + os.path.splitext(root_file)[1])]


def _action(decl: Mapping, name: str, known: Mapping[str, str]) -> Action:
    alias = decl["template"]
    if alias not in known:
        raise UnknownTemplate(f"node {name!r} uses undeclared template {alias!r}")
    return Action(alias, tuple(decl.get("connectors", ())), decl.get("link"))


def load_manifest(
    document: Mapping,
    base_dir: str | os.PathLike = ".",
    variant: str | None = None,
) -> Recipe:
    check_manifest(document)
    base_dir = os.fspath(base_dir)

    files = dict(document["templates"])
    variants = document.get("variants") or {}
    output = None
    if variant is not None and variant != "default":
        if variant not in variants:
            raise RecipeError(f"unknown variant {variant!r}")
    if variants:
        variant = variant if variant not in (None, "default") else next(iter(variants))
        spec = variants[variant]
        files.update(spec.get("templates", {}))
        output = spec["output"]

    render = document.get("render", {})
    style = comment_style(render["comment_style"]) if "comment_style" in render else None
    recipe = Recipe(
        name=document.get("name", "manifest") + (f":{variant}" if variants else ""),
        render_options=RenderOptions(
            verbose=render.get("verbose", False),
            comment_style=style,
            indent_width=render.get("indent_width"),
        ),
        output=output,
    )

    for alias, rel in files.items():
        path = os.path.join(base_dir, rel)
        if not os.path.isfile(path):
            raise UnknownTemplate(f"template {alias!r}: file {rel!r} not found")
        styles = (style,) if style is not None else None
        recipe.register(alias, load_template(path, styles, source_name=rel))

    root = document["root"]
    if root["template"] not in files:
        raise UnknownTemplate(f"root uses undeclared template {root['template']!r}")
    recipe.root_binding = (root["template"], root["connector"])

    edges = document["edges"]
    handles: dict[str, Handle] = {"root": recipe.root}
    pairs: dict[str, BeginNode] = {}
    for decl in document["nodes"]:
        name = decl["name"]
        if name in handles:
            raise RecipeError(f"node name {name!r} declared twice")
        if name not in edges:
            raise EmptyDeps(f"node {name!r} has no entry in 'edges'")
        dep_names = edges[name]
        dep_names = [dep_names] if isinstance(dep_names, str) else list(dep_names)
        for dep in dep_names:
            if dep not in handles:
                raise UnknownDependency(f"node {name!r} depends on undeclared node {dep!r}")
        deps = [handles[d] for d in dep_names]

        kind = decl["kind"]
        if kind == "codegen":
            action = _action(decl, name, files) if "template" in decl else None
            handles[name] = recipe.add(CodeGenNode(name, action))(deps)
        elif kind == "null":
            handles[name] = recipe.add(NullNode(name))(deps)
        elif kind == "begin":
            begin, _ = loop_pair(decl.get("family", "loop"), _action(decl, name, files), None, name)
            begin.name = name
            pairs[name] = begin
            handles[name] = recipe.add(begin)(deps)
        elif kind == "end":
            begin = pairs.get(decl["begin"])
            if begin is None:
                raise UnknownDependency(f"end node {name!r} pairs with unknown begin {decl['begin']!r}")
            end = begin.partner
            if recipe.graph.handle_of(end) is not None:
                raise RecipeError(f"begin node {decl['begin']!r} already has an end node")
            end.name = name
            if "family" in decl and Family(decl["family"]) is not begin.family:
                raise RecipeError(f"end node {name!r} family differs from its begin node")
            end.payload = _action(decl, name, files) if "template" in decl else None
            handles[name] = recipe.add(end)(deps)
        else:
            fn_name = decl["function"]
            if fn_name not in recipe.subgraphs:
                raise RecipeError(f"unknown subgraph function {fn_name!r}")
            fn, roles = recipe.subgraphs[fn_name]
            members = decl["nodes"]
            missing = [r for r in roles if r not in members]
            if missing:
                raise RecipeError(f"subgraph {name!r} lacks node(s) {', '.join(missing)}")
            bundle = {
                role: CodeGenNode(f"{name}.{role}", _action(m, f"{name}.{role}", files))
                for role, m in members.items()
            }
            bundle.setdefault("null", NullNode(f"{name}.null"))
            entry = deps[0] if len(deps) == 1 else deps
            handles[name] = fn(recipe, entry, bundle)

    unknown = [n for n in edges if n not in handles or n == "root"]
    if unknown:
        raise UnknownDependency(f"'edges' lists undeclared node(s) {', '.join(unknown)}")
    return recipe


def load_manifest_file(path: str | os.PathLike, variant: str | None = None) -> Recipe:
    document = read_manifest(path)
    return load_manifest(document, os.path.dirname(os.fspath(path)) or ".", variant)
