"""Lexing of annotated template files.

A template is ordinary source text in which some line comments carry
directives::

    //_connector:function
    void fp_op(int n, float a, float *x, float *y) {
      for (int i=0; i<n; i++) {
        //_param:x_i = x[i]
        //_link:kernel
      }
    }

Only whole-line comments whose token is immediately followed by
``_connector:``, ``_link:`` or ``_param:`` are directives.  Everything else is
passed through untouched; no host-language parsing happens here.
"""

from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .errors import (
    DuplicateConnector,
    DuplicateParam,
    MalformedDirective,
    NoConnector,
    ParamMissingEquals,
    ReservedParam,
    StrayCode,
    StrayDirective,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
RESERVED_PARAMS = frozenset({"__file__", "__indent__"})

_KIND_RE = re.compile(r"_(connector|link|param):")


@dataclass(frozen=True)
class CommentStyle:
    name: str
    line_token: str
    block_open: str | None = None
    block_close: str | None = None

    def __post_init__(self):
        if not self.line_token or any(ch.isspace() for ch in self.line_token):
            raise ValueError(f"invalid comment token {self.line_token!r}")


C_STYLE = CommentStyle("c", "//", "/*", "*/")
FORTRAN_STYLE = CommentStyle("fortran", "!")

_C_EXTENSIONS = {".c", ".h", ".cc", ".cpp", ".cxx", ".hpp", ".hh", ".cu", ".cuh", ".C"}
_FORTRAN_EXTENSIONS = {".f", ".F", ".f90", ".F90", ".f95", ".F95", ".f03", ".F03", ".f08", ".F08"}


def comment_style(spec: str) -> CommentStyle:
    """Resolve ``c``, ``fortran`` or a literal comment token."""
    lowered = spec.lower()
    if lowered in ("c", "c++", "cpp", "cuda"):
        return C_STYLE
    if lowered in ("fortran", "f90"):
        return FORTRAN_STYLE
    return CommentStyle(spec, spec)


def styles_for_path(path: str) -> tuple[CommentStyle, ...]:
    ext = os.path.splitext(path)[1]
    if ext in _C_EXTENSIONS:
        return (C_STYLE,)
    if ext in _FORTRAN_EXTENSIONS:
        return (FORTRAN_STYLE,)
    return (C_STYLE, FORTRAN_STYLE)


class DirectiveKind(enum.Enum):
    CONNECTOR = "connector"
    LINK = "link"
    PARAM = "param"


@dataclass(frozen=True)
class Directive:
    kind: DirectiveKind
    id_or_name: str
    value: str | None = None
    leading_ws: str = ""
    source_line: int = 0
    raw: str = ""


@dataclass(frozen=True)
class CodeLine:
    text: str
    source_line: int = 0


@dataclass
class LinkSlot:
    id: str
    leading_ws: str = ""
    params: list[tuple[str, str]] = field(default_factory=list)
    directive: Directive | None = None


BodyItem = Union[CodeLine, LinkSlot]


@dataclass
class ConnectorSection:
    id: str
    params: list[tuple[str, str]] = field(default_factory=list)
    body: list[BodyItem] = field(default_factory=list)
    directive: Directive | None = None
    param_directives: list[Directive] = field(default_factory=list)

    @property
    def links(self) -> list[LinkSlot]:
        return [item for item in self.body if isinstance(item, LinkSlot)]

    @property
    def code_lines(self) -> list[CodeLine]:
        return [item for item in self.body if isinstance(item, CodeLine)]


@dataclass
class Template:
    source_name: str
    sections: list[ConnectorSection]
    styles: tuple[CommentStyle, ...] = (C_STYLE,)

    @property
    def connector_ids(self) -> list[str]:
        return [s.id for s in self.sections]

    def section(self, connector_id: str) -> ConnectorSection:
        for s in self.sections:
            if s.id == connector_id:
                return s
        raise KeyError(connector_id)

    def select(self, connector_ids: Iterable[str]) -> "Template":
        """A template restricted to the named sections, in the requested order."""
        return Template(self.source_name, [self.section(c) for c in connector_ids], self.styles)

    def reconstruct(self) -> str:
        """Source text of all non-header lines, in original order."""
        lines: list[tuple[int, str]] = []
        for s in self.sections:
            if s.directive is not None:
                lines.append((s.directive.source_line, s.directive.raw))
            for d in s.param_directives:
                lines.append((d.source_line, d.raw))
            for item in s.body:
                if isinstance(item, CodeLine):
                    lines.append((item.source_line, item.text))
                elif item.directive is not None:
                    lines.append((item.directive.source_line, item.directive.raw))
        lines.sort()
        return "".join(text + "\n" for _, text in lines)


def _directive_tokens(styles: Sequence[CommentStyle]) -> list[str]:
    return [s.line_token + "_" + kind + ":" for s in styles for kind in ("connector", "link", "param")]


def scan_line(
    line: str,
    styles: Sequence[CommentStyle] = (C_STYLE,),
    source_name: str = "<string>",
    lineno: int = 0,
) -> CodeLine | Directive:
    """Classify one physical line as a directive or a verbatim code line."""
    stripped = line.lstrip(" \t")
    leading_ws = line[: len(line) - len(stripped)]
    for style in styles:
        if not stripped.startswith(style.line_token):
            continue
        rest = stripped[len(style.line_token):]
        m = _KIND_RE.match(rest)
        if m is None:
            continue
        kind = DirectiveKind(m.group(1))
        payload = rest[m.end():]
        if kind is DirectiveKind.PARAM:
            if "=" not in payload:
                raise ParamMissingEquals(
                    f"parameter directive needs '=': {stripped!r}", source_name, lineno
                )
            name, value = payload.split("=", 1)
            name = name.strip()
            if not IDENT_RE.fullmatch(name):
                raise MalformedDirective(f"invalid parameter name {name!r}", source_name, lineno)
            return Directive(kind, name, value.strip(), leading_ws, lineno, line)
        ident = payload.strip()
        if not IDENT_RE.fullmatch(ident):
            raise MalformedDirective(
                f"invalid {kind.value} identifier {ident!r}", source_name, lineno
            )
        return Directive(kind, ident, None, leading_ws, lineno, line)

    for token in _directive_tokens(styles):
        if token in line:
            raise MalformedDirective(
                f"directive must be alone on its line: {line.strip()!r}", source_name, lineno
            )
    return CodeLine(line, lineno)


def _update_block_state(line: str, in_block: bool, styles: Sequence[CommentStyle]) -> bool:
    # Naive: ignores comment delimiters inside string literals.
    for style in styles:
        if not style.block_open or not style.block_close:
            continue
        pos = 0
        while True:
            if in_block:
                end = line.find(style.block_close, pos)
                if end < 0:
                    return True
                in_block, pos = False, end + len(style.block_close)
            else:
                start = line.find(style.block_open, pos)
                if start < 0:
                    break
                # a line comment before the opener hides it
                lc = line.find(style.line_token, pos)
                if 0 <= lc < start:
                    break
                in_block, pos = True, start + len(style.block_open)
        return in_block
    return in_block


def _is_comment_only(line: str, styles: Sequence[CommentStyle]) -> bool:
    stripped = line.strip()
    if not stripped:
        return True
    for style in styles:
        if stripped.startswith(style.line_token):
            return True
        if style.block_open and stripped.startswith(style.block_open):
            return True
    return False


def _split_lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def parse_template(
    text: str,
    source_name: str = "<string>",
    styles: Sequence[CommentStyle] | None = None,
) -> Template:
    if styles is None:
        styles = styles_for_path(source_name)
    styles = tuple(styles)

    sections: list[ConnectorSection] = []
    seen: dict[str, int] = {}
    current: ConnectorSection | None = None
    param_names: set[str] = set()
    in_block = False
    stray_line: int | None = None

    for lineno, line in enumerate(_split_lines(text), start=1):
        was_in_block = in_block
        in_block = _update_block_state(line, in_block, styles)
        if was_in_block:
            item: CodeLine | Directive = CodeLine(line, lineno)
        else:
            item = scan_line(line, styles, source_name, lineno)

        if isinstance(item, Directive) and item.kind is DirectiveKind.CONNECTOR:
            if item.id_or_name in seen:
                raise DuplicateConnector(
                    f"connector {item.id_or_name!r} already declared on line "
                    f"{seen[item.id_or_name]}",
                    source_name,
                    lineno,
                )
            seen[item.id_or_name] = lineno
            current = ConnectorSection(item.id_or_name, directive=item)
            sections.append(current)
            param_names = set()
            continue

        if current is None:
            if isinstance(item, Directive):
                raise StrayDirective(
                    f"_{item.kind.value}:{item.id_or_name} before the first connector",
                    source_name,
                    lineno,
                )
            if not (was_in_block or _is_comment_only(line, styles)) and stray_line is None:
                stray_line = lineno
            continue

        if isinstance(item, CodeLine):
            current.body.append(item)
        elif item.kind is DirectiveKind.LINK:
            current.body.append(LinkSlot(item.id_or_name, item.leading_ws, [], item))
        else:
            name = item.id_or_name
            if name in RESERVED_PARAMS:
                raise ReservedParam(f"parameter name {name!r} is reserved", source_name, lineno)
            if name in param_names:
                raise DuplicateParam(
                    f"parameter {name!r} declared twice in connector {current.id!r}",
                    source_name,
                    lineno,
                )
            param_names.add(name)
            current.params.append((name, item.value or ""))
            current.param_directives.append(item)

    if not sections:
        raise NoConnector("template declares no connector", source_name)
    if stray_line is not None:
        raise StrayCode("code before the first connector", source_name, stray_line)
    return Template(source_name, sections, styles)


def load_template(
    path: str | os.PathLike,
    styles: Sequence[CommentStyle] | None = None,
    source_name: str | None = None,
) -> Template:
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if styles is None:
        styles = styles_for_path(path)
    return parse_template(text, source_name or os.path.basename(path), styles)
