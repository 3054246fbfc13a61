import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import LISTING
from pstgen.errors import (
    DuplicateConnector,
    DuplicateParam,
    MalformedDirective,
    NoConnector,
    ParamMissingEquals,
    ReservedParam,
    StrayCode,
    StrayDirective,
)
from pstgen.template import (
    C_STYLE,
    FORTRAN_STYLE,
    CodeLine,
    Directive,
    DirectiveKind,
    LinkSlot,
    comment_style,
    load_template,
    parse_template,
    scan_line,
    styles_for_path,
)


# -- scan_line -----------------------------------------------------------------


def test_scan_connector():
    d = scan_line("//_connector:function")
    assert isinstance(d, Directive)
    assert (d.kind, d.id_or_name, d.value) == (DirectiveKind.CONNECTOR, "function", None)


def test_scan_link_keeps_leading_whitespace():
    d = scan_line("    //_link:kernel")
    assert (d.kind, d.id_or_name, d.leading_ws) == (DirectiveKind.LINK, "kernel", "    ")


def test_scan_code_line_verbatim():
    line = "y[i] += a * x[i];"
    assert scan_line(line) == CodeLine(line)


def test_scan_param_splits_on_first_equals():
    d = scan_line("//_param:x_i = x[i]")
    assert (d.kind, d.id_or_name, d.value) == (DirectiveKind.PARAM, "x_i", "x[i]")
    d = scan_line("//_param:cond =  a == b ")
    assert d.value == "a == b"


def test_scan_param_empty_value_is_legal():
    assert scan_line("//_param:suffix =").value == ""


def test_scan_fortran_token():
    d = scan_line("  !_link:body", (FORTRAN_STYLE,))
    assert (d.kind, d.id_or_name, d.leading_ws) == (DirectiveKind.LINK, "body", "  ")
    # a C token means nothing to a Fortran-only scanner
    assert isinstance(scan_line("//_link:body", (FORTRAN_STYLE,)), CodeLine)


def test_scan_space_after_token_is_plain_comment():
    assert isinstance(scan_line("// _link:kernel"), CodeLine)


@pytest.mark.parametrize(
    "line, exc",
    [
        ("//_connector:", MalformedDirective),
        ("//_link:9lives", MalformedDirective),
        ("//_link:a b", MalformedDirective),
        ("//_param:x_i x[i]", ParamMissingEquals),
        ("//_param: = 3", MalformedDirective),
        ("x = 1; //_link:kernel", MalformedDirective),
    ],
)
def test_scan_errors(line, exc):
    with pytest.raises(exc) as info:
        scan_line(line, (C_STYLE,), "t.c", 7)
    assert str(info.value).startswith("t.c:7:")


@given(st.text(alphabet=st.characters(blacklist_characters="\n\r"), max_size=40))
def test_scan_never_alters_code_lines(line):
    try:
        item = scan_line(line)
    except (MalformedDirective, ParamMissingEquals):
        return
    if isinstance(item, CodeLine):
        assert item.text == line


# -- parse_template ------------------------------------------------------------


def test_listing_function_template(listing_templates):
    function, _ = listing_templates
    assert function.source_name == "function.c"
    (section,) = function.sections
    assert section.id == "function"
    assert section.params == [("a", "a"), ("x_i", "x[i]"), ("y_i", "y[i]")]
    kinds = [type(item).__name__ for item in section.body]
    assert kinds == ["CodeLine", "CodeLine", "LinkSlot", "CodeLine", "CodeLine"]
    (link,) = section.links
    assert (link.id, link.leading_ws) == ("kernel", "    ")


def test_listing_kernel_template(listing_templates):
    _, kernel = listing_templates
    (section,) = kernel.sections
    assert section.id == "kernel"
    assert [c.text for c in section.body] == ["${y_i} += ${a} * ${x_i};"]


def test_no_connector():
    with pytest.raises(NoConnector):
        parse_template("x = 1\n", "x.c")


def test_duplicate_connector():
    with pytest.raises(DuplicateConnector) as info:
        parse_template("//_connector:a\nx;\n//_connector:a\n", "d.c")
    assert info.value.line == 3


def test_stray_directive_before_connector():
    with pytest.raises(StrayDirective):
        parse_template("//_link:a\n//_connector:b\n", "s.c")


def test_stray_code_before_connector():
    with pytest.raises(StrayCode) as info:
        parse_template("// ok\nint x;\n//_connector:b\n", "s.c")
    assert info.value.line == 2


def test_header_comments_and_blanks_are_ignored():
    text = "/* file header\n   //_link:not_a_directive\n*/\n\n// plain comment\n//_connector:c\nbody;\n"
    tpl = parse_template(text, "h.c")
    assert tpl.connector_ids == ["c"]
    assert [c.text for c in tpl.sections[0].code_lines] == ["body;"]


def test_block_comment_hides_directives_inside_sections():
    text = "//_connector:c\n/*\n//_link:hidden\n*/\nx;\n"
    section = parse_template(text, "b.c").sections[0]
    assert section.links == []
    assert [c.text for c in section.code_lines] == ["/*", "//_link:hidden", "*/", "x;"]


def test_reserved_and_duplicate_params():
    with pytest.raises(ReservedParam):
        parse_template("//_connector:c\n//_param:__file__ = x\n", "r.c")
    with pytest.raises(DuplicateParam):
        parse_template("//_connector:c\n//_param:a = 1\n//_param:a = 2\n", "r.c")


def test_multiple_sections_keep_order():
    text = "//_connector:include\n#include <omp.h>\n//_connector:execute\nrun();\n  //_link:more\n"
    tpl = parse_template(text, "m.c")
    assert tpl.connector_ids == ["include", "execute"]
    assert tpl.select(["execute"]).connector_ids == ["execute"]
    assert isinstance(tpl.sections[1].body[1], LinkSlot)


def test_fortran_template(tmp_path):
    path = tmp_path / "loop.F90"
    path.write_text("!! header\n!_connector:body\ndo i = 1, n\n  !_link:body\nend do\n")
    tpl = load_template(path)
    assert tpl.styles == (FORTRAN_STYLE,)
    assert tpl.sections[0].links[0].leading_ws == "  "


def test_style_resolution():
    assert comment_style("c") is C_STYLE
    assert comment_style("Fortran") is FORTRAN_STYLE
    assert comment_style("#").line_token == "#"
    assert styles_for_path("a.cu") == (C_STYLE,)
    assert styles_for_path("a.F90") == (FORTRAN_STYLE,)
    assert styles_for_path("a.tpl") == (C_STYLE, FORTRAN_STYLE)
    with pytest.raises(ValueError):
        comment_style("a b")


def test_crlf_input_is_accepted():
    tpl = parse_template("//_connector:c\r\nx;\r\n", "w.c")
    assert [c.text for c in tpl.sections[0].code_lines] == ["x;"]


# -- properties ----------------------------------------------------------------

_code = st.text(alphabet="abxy01 ;(){}=+*", max_size=20)
_ident = st.from_regex(r"[a-z][a-z0-9_]{0,4}", fullmatch=True)


@st.composite
def template_texts(draw):
    """Source text plus the header-free part that reconstruction must return."""
    header = draw(st.lists(st.sampled_from(["", "// note", "/* banner */"]), max_size=2))
    ids = draw(st.lists(_ident, min_size=1, max_size=3, unique=True))
    body = []
    for cid in ids:
        body.append(f"//_connector:{cid}")
        for i, name in enumerate(draw(st.lists(_ident, unique=True, max_size=2))):
            body.append(f"//_param:{name} = v{i}")
        for _ in range(draw(st.integers(0, 4))):
            indent = " " * draw(st.integers(0, 6))
            if draw(st.booleans()):
                body.append(f"{indent}//_link:{draw(_ident)}")
            else:
                body.append(indent + draw(_code))
    return "".join(h + "\n" for h in header + body), "".join(b + "\n" for b in body)


@given(template_texts())
def test_reconstruction_fidelity(case):
    text, expected = case
    assert parse_template(text, "p.c").reconstruct() == expected


@given(template_texts())
def test_parsing_is_deterministic(case):
    text, _ = case
    assert parse_template(text, "p.c") == parse_template(text, "p.c")


def test_fixture_templates_all_parse():
    count = 0
    fixtures = os.path.dirname(LISTING)
    for dirpath, _, names in os.walk(fixtures):
        for name in names:
            if name.endswith((".c", ".cu", ".F90")) and not name.startswith("fp_op"):
                load_template(os.path.join(dirpath, name))
                count += 1
    assert count > 40
