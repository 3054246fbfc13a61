"""Grow a PST by traversing a recipe's control-flow graph.

Each visited node performs one code-generation operation:

* root: start the tree from the recipe's root template;
* code-gen: attach the node's template sections to matching links;
* begin: attach a region template and make its interior link the context
  for the nodes inside the region;
* end: close the region, then attach the optional footer outside it;
* null: nothing.

Links are resolved innermost region first.  A region's search covers its own
connector subtree but never descends into another region, so a closed loop
does not capture later nodes that happen to use the same link id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .cfg import BeginNode, CodeGenNode, EndNode, Handle, NodeKind, NullNode
from .errors import (
    BuildError,
    ContextUnderflow,
    PstError,
    UnbalancedBuild,
    UnmatchedConnector,
)
from .pst import Pst, PstConnector, PstLink, attach_section, dumps, new_tree
from .recipe import Recipe
from .template import ConnectorSection, Template


@dataclass
class Frame:
    connector: PstConnector
    path: str
    link: PstLink | None = None
    begin: Handle | None = None


@dataclass
class LogEntry:
    node: str
    operation: str
    links: list[str] = field(default_factory=list)
    error: str | None = None


@dataclass
class BuildContext:
    recipe: Recipe
    tree: Pst | None = None
    link_stack: list[Frame] = field(default_factory=list)
    emitted: list[LogEntry] = field(default_factory=list)
    frames: dict[Handle, Frame] = field(default_factory=dict)
    error: Exception | None = None


@dataclass
class BuildReport:
    ok: bool
    entries: list[LogEntry]
    error: str | None = None
    partial_json: str | None = None

    def __str__(self) -> str:
        lines = []
        for i, e in enumerate(self.entries, 1):
            where = ", ".join(e.links) if e.links else "-"
            line = f"{i:3d}  {e.node:<28} {e.operation:<7} {where}"
            if e.error:
                line += f"  !! {e.error}"
            lines.append(line)
        if self.error:
            lines.append(f"build failed: {self.error}")
        return "\n".join(lines)


def _scoped_links(conn: PstConnector, path: str) -> Iterator[tuple[str, PstLink]]:
    for item in conn.body:
        if not isinstance(item, PstLink):
            continue
        yield path, item
        for i, child in enumerate(item.attached):
            if not child.region:
                yield from _scoped_links(child, f"{path}/{item.id}[{i}]")


def _resolve(stack: list[Frame], link_id: str) -> list[tuple[str, PstLink]]:
    for frame in reversed(stack):
        hits = [(p, link) for p, link in _scoped_links(frame.connector, frame.path) if link.id == link_id]
        if hits:
            return hits
    return []


def _sections(template: Template, connectors: tuple[str, ...]) -> list[ConnectorSection]:
    if connectors:
        return [template.section(c) for c in connectors]
    return list(template.sections)


def _attach_all(
    ctx: BuildContext, stack: list[Frame], template: Template, connectors: tuple[str, ...]
) -> tuple[list[str], list[PstConnector]]:
    plan = []
    unmatched = []
    for section in _sections(template, connectors):
        sites = _resolve(stack, section.id)
        if not sites:
            unmatched.append(section.id)
        plan.append((section, sites))
    if unmatched:
        raise UnmatchedConnector(unmatched, template.source_name)
    touched, created = [], []
    for section, sites in plan:
        for path, link in sites:
            created.append(attach_section(link, section, template.source_name, ctx.tree.indent_width))
            touched.append(f"{path}:{link.id}[{len(link.attached) - 1}]")
    return touched, created


def _open_region(ctx: BuildContext, h: Handle, node: BeginNode, stack: list[Frame]) -> tuple[Frame, str]:
    action = node.action
    template = ctx.recipe.template(action.template)
    sections = _sections(template, action.connectors)
    if len(sections) != 1:
        raise BuildError(
            f"begin node {node.name!r}: region template {template.source_name} must provide "
            f"exactly one connector, got {len(sections)}"
        )
    section = sections[0]
    sites = _resolve(stack, section.id)
    if len(sites) != 1:
        if not sites:
            raise UnmatchedConnector([section.id], template.source_name)
        raise BuildError(
            f"begin node {node.name!r}: region connector {section.id!r} matches "
            f"{len(sites)} links; a region needs exactly one site"
        )
    path, link = sites[0]
    conn = attach_section(link, section, template.source_name, ctx.tree.indent_width)
    conn.region = True
    index = len(link.attached) - 1
    interior = [l for l in conn.links if action.link is None or l.id == action.link]
    if len(interior) != 1:
        wanted = action.link or "<any>"
        raise BuildError(
            f"begin node {node.name!r}: region {section.id!r} in {template.source_name} needs "
            f"exactly one interior link ({wanted}), found {len(interior)}"
        )
    frame = Frame(conn, f"{path}/{link.id}[{index}]", interior[0], h)
    return frame, f"{path}:{link.id}[{index}]"


def build(
    recipe: Recipe,
    root_template: Template | str | None = None,
    root_connector: str | None = None,
    context: BuildContext | None = None,
) -> Pst:
    """Traverse ``recipe.graph`` and return the composed tree."""
    ctx = context if context is not None else BuildContext(recipe)
    ctx.recipe = recipe
    recipe.seal()
    if root_template is None or isinstance(root_template, str):
        if recipe.root_binding is None and root_template is None:
            raise BuildError(f"{recipe.name}: no root template given")
        alias = root_template if isinstance(root_template, str) else recipe.root_binding[0]
        root_template = recipe.template(alias)
        if root_connector is None:
            root_connector = recipe.root_binding[1]
    if root_connector is None:
        root_connector = root_template.sections[0].id
    width = recipe.render_options.indent_width or 2

    graph = recipe.graph
    stack: list[Frame] = []
    for h in graph.traverse():
        node = graph.node(h)
        if node.kind is NodeKind.ROOT:
            ctx.tree = new_tree(root_template, root_connector, width)
            stack = [Frame(ctx.tree.root, ctx.tree.root.id)]
            ctx.link_stack = list(stack)
            continue
        stack = [stack[0]] + [ctx.frames[b] for b in graph.open_regions(h)]
        ctx.link_stack = list(stack)
        if isinstance(node, NullNode):
            continue
        entry = LogEntry(node.name, node.kind.value)
        ctx.emitted.append(entry)
        try:
            if isinstance(node, CodeGenNode):
                if node.action is not None:
                    tpl = recipe.template(node.action.template)
                    entry.links, _ = _attach_all(ctx, stack, tpl, node.action.connectors)
            elif isinstance(node, BeginNode):
                frame, where = _open_region(ctx, h, node, stack)
                ctx.frames[h] = frame
                entry.links = [where]
                ctx.link_stack = stack + [frame]
            elif isinstance(node, EndNode):
                begin_h = graph.handle_of(node.partner) if node.partner is not None else None
                if len(stack) < 2 or stack[-1].begin != begin_h:
                    raise ContextUnderflow(f"end node {node.name!r} has no matching open region")
                stack = stack[:-1]
                ctx.link_stack = list(stack)
                if node.action is not None:
                    tpl = recipe.template(node.action.template)
                    entry.links, _ = _attach_all(ctx, stack, tpl, node.action.connectors)
        except (PstError, BuildError, KeyError) as exc:
            entry.error = f"{type(exc).__name__}: {exc}"
            ctx.error = exc
            exc.context = ctx
            raise

    final = [stack[0]] + [ctx.frames[b] for b in graph.open_regions(graph.leaf)]
    leaf = graph.node(graph.leaf)
    if isinstance(leaf, BeginNode):
        final.append(ctx.frames[graph.leaf])
    elif isinstance(leaf, EndNode):
        final = final[:-1]
    ctx.link_stack = final
    if len(final) != 1:
        err = UnbalancedBuild(f"{len(final) - 1} region(s) still open after the last node")
        ctx.error = err
        raise err
    return ctx.tree


def build_report(ctx: BuildContext) -> BuildReport:
    partial = None
    if ctx.error is not None and ctx.tree is not None:
        partial = dumps(ctx.tree)
    return BuildReport(
        ok=ctx.error is None,
        entries=list(ctx.emitted),
        error=None if ctx.error is None else f"{type(ctx.error).__name__}: {ctx.error}",
        partial_json=partial,
    )
