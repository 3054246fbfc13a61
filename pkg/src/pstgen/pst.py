"""Parametrized source trees.

A tree alternates connector, code and link levels.  Connectors own an ordered
body of code lines and links; links own the connectors attached to them.
Parameters declared on a connector or a link are visible to everything below
it, and ``${name}`` tokens in code lines are replaced with the nearest
definition when the tree is rendered.
"""

from __future__ import annotations

import copy
import json
import re
from collections import ChainMap
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Union

from .errors import (
    SchemaError,
    UnknownConnector,
    UnmatchedConnector,
    UnresolvedParam,
)
from .template import (
    IDENT_RE,
    RESERVED_PARAMS,
    CodeLine,
    CommentStyle,
    ConnectorSection,
    Template,
    styles_for_path,
)

PARAM_REF_RE = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")
_OPEN_REF = "${"

FILE_KEY = "_param:__file__"
INDENT_KEY = "_param:__indent__"
CODE_KEY = "_code"


@dataclass
class PstLink:
    id: str
    indent_levels: int = 0
    params: list[tuple[str, str]] = field(default_factory=list)
    attached: list["PstConnector"] = field(default_factory=list)


@dataclass
class PstConnector:
    id: str
    source_name: str
    params: list[tuple[str, str]] = field(default_factory=list)
    body: list[Union[str, PstLink]] = field(default_factory=list)
    # set by the graph driver on connectors that open a begin-end region
    region: bool = field(default=False, compare=False, repr=False)

    @property
    def links(self) -> list[PstLink]:
        return [item for item in self.body if isinstance(item, PstLink)]


@dataclass
class Pst:
    root: PstConnector
    indent_width: int = 2

    def copy(self) -> "Pst":
        return copy.deepcopy(self)


@dataclass(frozen=True)
class RenderOptions:
    verbose: bool = False
    comment_style: CommentStyle | None = None
    indent_width: int | None = None


@dataclass(frozen=True)
class UnresolvedParamFinding:
    path: str
    name: str
    severity = "error"

    def __str__(self) -> str:
        return f"{self.path}: unresolved parameter ${{{self.name}}}"


@dataclass(frozen=True)
class EmptyLinkFinding:
    path: str
    id: str
    severity = "warning"

    def __str__(self) -> str:
        return f"{self.path}: link {self.id!r} has no attached connectors"


Finding = Union[UnresolvedParamFinding, EmptyLinkFinding]


# -- construction ------------------------------------------------------------


def materialize(section: ConnectorSection, source_name: str, indent_width: int = 2) -> PstConnector:
    """Turn one template section into a fresh, unattached tree level."""
    body: list[Union[str, PstLink]] = []
    for item in section.body:
        if isinstance(item, CodeLine):
            body.append(item.text)
        else:
            levels = len(item.leading_ws) // indent_width
            body.append(PstLink(item.id, levels, list(item.params), []))
    return PstConnector(section.id, source_name, list(section.params), body)


def new_tree(template: Template, connector_id: str, indent_width: int = 2) -> Pst:
    if indent_width < 1:
        raise ValueError("indent_width must be positive")
    try:
        section = template.section(connector_id)
    except KeyError:
        raise UnknownConnector(
            f"{template.source_name}: no connector {connector_id!r} "
            f"(available: {', '.join(template.connector_ids)})"
        ) from None
    return Pst(materialize(section, template.source_name, indent_width), indent_width)


def _walk(conn: PstConnector, path: str) -> Iterator[tuple[str, PstConnector, PstLink]]:
    for item in conn.body:
        if isinstance(item, PstLink):
            yield path, conn, item
            for i, child in enumerate(item.attached):
                yield from _walk(child, f"{path}/{item.id}[{i}]")


def iter_links(tree: Pst | PstConnector) -> Iterator[tuple[str, PstLink]]:
    """Depth-first, document-order ``(owner path, link)`` pairs."""
    root = tree.root if isinstance(tree, Pst) else tree
    for path, _, link in _walk(root, root.id):
        yield path, link


def open_links(tree: Pst) -> list[tuple[str, str]]:
    return [(path, link.id) for path, link in iter_links(tree)]


def attach_section(
    link: PstLink, section: ConnectorSection, source_name: str, indent_width: int
) -> PstConnector:
    conn = materialize(section, source_name, indent_width)
    link.attached.append(conn)
    return conn


def attach(tree: Pst, template: Template) -> list[tuple[str, int]]:
    """Attach every section of ``template`` to every link with a matching id.

    Matching sites are collected before anything is attached, so sections of
    the same template never attach to each other.  Nothing is modified when a
    section has no matching link.
    """
    sites: dict[str, list[PstLink]] = {}
    for _, link in iter_links(tree):
        sites.setdefault(link.id, []).append(link)
    unmatched = [s.id for s in template.sections if s.id not in sites]
    if unmatched:
        raise UnmatchedConnector(unmatched, template.source_name)
    report = []
    for section in template.sections:
        for link in sites[section.id]:
            attach_section(link, section, template.source_name, tree.indent_width)
        report.append((section.id, len(sites[section.id])))
    return report


# -- parameter scopes ----------------------------------------------------------


def connector_scope(conn: PstConnector) -> dict[str, str]:
    scope = {"__file__": conn.source_name}
    scope.update(conn.params)
    return scope


def link_scope(link: PstLink) -> dict[str, str]:
    scope = {"__indent__": str(link.indent_levels)}
    scope.update(link.params)
    return scope


def param_refs(line: str) -> list[str]:
    """Names referenced by ``${...}`` in ``line``; malformed references included verbatim."""
    names = []
    pos = 0
    while True:
        start = line.find(_OPEN_REF, pos)
        if start < 0:
            return names
        m = PARAM_REF_RE.match(line, start)
        if m:
            names.append(m.group(1))
            pos = m.end()
        else:
            end = line.find("}", start)
            names.append(line[start + 2 : end if end >= 0 else len(line)])
            pos = start + 2


def substitute(line: str, scope: Mapping[str, str], path: str = "") -> str:
    """Single-pass replacement; replacement text is never re-scanned."""
    for name in param_refs(line):
        if name not in scope or not IDENT_RE.fullmatch(name):
            raise UnresolvedParam(name, path)
    return PARAM_REF_RE.sub(lambda m: scope[m.group(1)], line)


# -- verification --------------------------------------------------------------


def verify(tree: Pst) -> list[Finding]:
    findings: list[Finding] = []

    def visit(conn: PstConnector, scope: ChainMap, path: str) -> None:
        scope = scope.new_child(connector_scope(conn))
        for item in conn.body:
            if isinstance(item, str):
                for name in param_refs(item):
                    if name not in scope or not IDENT_RE.fullmatch(name):
                        findings.append(UnresolvedParamFinding(path, name))
                continue
            if not item.attached:
                findings.append(EmptyLinkFinding(path, item.id))
            lscope = scope.new_child(link_scope(item))
            for i, child in enumerate(item.attached):
                visit(child, lscope, f"{path}/{item.id}[{i}]")

    visit(tree.root, ChainMap(), tree.root.id)
    return findings


# -- JSON ----------------------------------------------------------------------


def _connector_fields(conn: PstConnector) -> dict[str, Any]:
    doc: dict[str, Any] = {f"_param:{k}": v for k, v in conn.params}
    doc[CODE_KEY] = [_code_item(item) for item in conn.body]
    return doc


def _code_item(item: Union[str, PstLink]) -> Any:
    if isinstance(item, str):
        return item
    doc: dict[str, Any] = {INDENT_KEY: item.indent_levels}
    for k, v in item.params:
        doc[f"_param:{k}"] = v
    doc[f"_link:{item.id}"] = [
        {FILE_KEY: child.source_name, **_connector_fields(child)} for child in item.attached
    ]
    return doc


def to_json(tree: Pst) -> dict[str, Any]:
    root = tree.root
    return {FILE_KEY: root.source_name, f"_connector:{root.id}": _connector_fields(root)}


def dumps(tree: Pst) -> str:
    return json.dumps(to_json(tree), indent=2, ensure_ascii=False) + "\n"


def _key_path(path: str, key: str | int) -> str:
    return f"{path}[{key}]" if isinstance(key, int) else f"{path}[{json.dumps(key)}]"


def _expect_dict(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, got {type(value).__name__}", path)
    return value


def _user_param(key: str, value: Any, path: str) -> tuple[str, str]:
    name = key[len("_param:"):]
    if not IDENT_RE.fullmatch(name) or name in RESERVED_PARAMS:
        raise SchemaError(f"invalid parameter key {key!r}", path)
    if not isinstance(value, str):
        raise SchemaError("parameter values must be strings", _key_path(path, key))
    return name, value


def _parse_connector(doc: dict, conn_id: str, source_name: str, path: str) -> PstConnector:
    params = []
    code = None
    for key, value in doc.items():
        if key == CODE_KEY:
            code = value
        elif key.startswith("_param:"):
            params.append(_user_param(key, value, path))
        else:
            raise SchemaError(f"unexpected key {key!r}", path)
    if code is None:
        raise SchemaError("missing '_code'", path)
    code_path = _key_path(path, CODE_KEY)
    if not isinstance(code, list):
        raise SchemaError("'_code' must be an array", code_path)
    body: list[Union[str, PstLink]] = []
    for i, item in enumerate(code):
        item_path = _key_path(code_path, i)
        if isinstance(item, str):
            body.append(item)
        else:
            body.append(_parse_link(_expect_dict(item, item_path), item_path))
    return PstConnector(conn_id, source_name, params, body)


def _parse_link(doc: dict, path: str) -> PstLink:
    indent = None
    params = []
    link_id = None
    children = None
    for key, value in doc.items():
        if key == INDENT_KEY:
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise SchemaError("'__indent__' must be a non-negative integer", _key_path(path, key))
            indent = value
        elif key.startswith("_link:"):
            if link_id is not None:
                raise SchemaError("a link object holds exactly one '_link:' key", path)
            link_id = key[len("_link:"):]
            if not IDENT_RE.fullmatch(link_id):
                raise SchemaError(f"invalid link id {link_id!r}", path)
            children = value
        elif key.startswith("_param:"):
            params.append(_user_param(key, value, path))
        else:
            raise SchemaError(f"unexpected key {key!r}", path)
    if link_id is None:
        raise SchemaError("missing '_link:<id>' key", path)
    if indent is None:
        raise SchemaError("missing '_param:__indent__'", path)
    children_path = _key_path(path, f"_link:{link_id}")
    if not isinstance(children, list):
        raise SchemaError("attached connectors must be an array", children_path)
    attached = []
    for i, child in enumerate(children):
        child_path = _key_path(children_path, i)
        child = _expect_dict(child, child_path)
        source = child.get(FILE_KEY)
        if not isinstance(source, str):
            raise SchemaError("missing '_param:__file__'", child_path)
        rest = {k: v for k, v in child.items() if k != FILE_KEY}
        attached.append(_parse_connector(rest, link_id, source, child_path))
    return PstLink(link_id, indent, params, attached)


def from_json(document: Any, indent_width: int = 2) -> Pst:
    doc = _expect_dict(document, "$")
    source = doc.get(FILE_KEY)
    if not isinstance(source, str):
        raise SchemaError("missing '_param:__file__'", "$")
    conn_keys = [k for k in doc if k.startswith("_connector:")]
    extra = [k for k in doc if k != FILE_KEY and not k.startswith("_connector:")]
    if extra:
        raise SchemaError(f"unexpected key {extra[0]!r}", "$")
    if len(conn_keys) != 1:
        raise SchemaError("expected exactly one '_connector:<id>' key", "$")
    key = conn_keys[0]
    conn_id = key[len("_connector:"):]
    if not IDENT_RE.fullmatch(conn_id):
        raise SchemaError(f"invalid connector id {conn_id!r}", "$")
    path = _key_path("$", key)
    root = _parse_connector(_expect_dict(doc[key], path), conn_id, source, path)
    return Pst(root, indent_width)


def loads(text: str, indent_width: int = 2) -> Pst:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    return from_json(document, indent_width)


# -- rendering -----------------------------------------------------------------


def render(tree: Pst, options: RenderOptions | None = None) -> str:
    opts = options or RenderOptions()
    width = opts.indent_width or tree.indent_width
    style = opts.comment_style or styles_for_path(tree.root.source_name)[0]
    tok = style.line_token
    out: list[str] = []

    def emit_connector(conn: PstConnector, prefix: str, scope: ChainMap, path: str) -> None:
        scope = scope.new_child(connector_scope(conn))
        if opts.verbose:
            out.append(f'{prefix}{tok}<_connector:{conn.id} file="{conn.source_name}">')
        for item in conn.body:
            if isinstance(item, str):
                line = substitute(item, scope, path)
                out.append(prefix + line if line.strip() else "")
                continue
            link_prefix = prefix + " " * (item.indent_levels * width)
            lscope = scope.new_child(link_scope(item))
            if opts.verbose:
                out.append(f"{link_prefix}{tok}<_link:{item.id}>")
            for i, child in enumerate(item.attached):
                emit_connector(child, link_prefix, lscope, f"{path}/{item.id}[{i}]")
            if opts.verbose:
                out.append(f"{link_prefix}{tok}</_link:{item.id}>")
        if opts.verbose:
            out.append(f"{prefix}{tok}</_connector:{conn.id}>")

    emit_connector(tree.root, "", ChainMap(), tree.root.id)
    return "".join(line + "\n" for line in out)
