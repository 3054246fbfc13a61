import os

import pytest

from conftest import AXPY, SPARK
from pstgen.cfg import CodeGenNode, NodeKind, NullNode
from pstgen.errors import (
    EmptyDeps,
    InvalidGraph,
    RecipeError,
    SchemaError,
    UnknownDependency,
    UnknownTemplate,
)
from pstgen.recipe import (
    Recipe,
    check_manifest,
    load_manifest,
    load_manifest_file,
    loop_pair,
    manifest_variants,
    read_manifest,
    subgraph_block_init,
    subgraph_intra_stage,
)
from pstgen.template import parse_template

INTRA = ("grvAccel", "calcLims", "calcFlux", "fluxBuff", "updSoln", "calcEos")


def bundle(prefix, roles):
    nodes = {r: CodeGenNode(f"{prefix}{r}") for r in roles}
    nodes["null"] = NullNode(f"{prefix}null")
    return nodes


def added(recipe, fn, roles):
    before_nodes, before_edges = len(recipe.graph), len(recipe.graph.edges())
    exit_handle = fn(recipe, recipe.root, bundle("", roles))
    return exit_handle, len(recipe.graph) - before_nodes, len(recipe.graph.edges()) - before_edges


# -- builders ------------------------------------------------------------------


def test_block_init_subgraph():
    recipe = Recipe()
    exit_handle, n, e = added(recipe, subgraph_block_init, ("shockDet", "initSoln"))
    assert (n, e) == (3, 4)
    assert recipe.graph.node(exit_handle).kind is NodeKind.NULL
    recipe.graph.validate()
    order = [recipe.graph.node(h).name for h in recipe.graph.traverse()]
    assert order == ["root", "shockDet", "initSoln", "null"]


def test_intra_stage_subgraph():
    recipe = Recipe()
    exit_handle, n, e = added(recipe, subgraph_intra_stage, INTRA)
    assert (n, e) == (7, 8)
    assert recipe.graph.validate() == []
    assert recipe.graph.traverse()[-1] == exit_handle


def copy_shape(recipe, lo, hi):
    """Edges touching nodes ``lo..hi-1``, relabeled so ``lo`` becomes 0 and
    an edge from outside the range becomes ``-1``."""
    out = []
    for s, d in recipe.graph.edges():
        if lo <= d.index < hi:
            src = s.index - lo if lo <= s.index < hi else -1
            out.append((src, d.index - lo))
    return sorted(out)


def test_subgraph_reuse_is_isomorphic():
    recipe = Recipe()
    first = subgraph_intra_stage(recipe, recipe.root, bundle("a.", INTRA))
    mid = len(recipe.graph)
    subgraph_intra_stage(recipe, first, bundle("b.", INTRA))
    end = len(recipe.graph)
    assert copy_shape(recipe, 1, mid) == copy_shape(recipe, mid, end)
    assert len(copy_shape(recipe, 1, mid)) == 8


def test_subgraph_inside_stage_loop_validates():
    recipe = Recipe()
    begin, end = loop_pair(name="stage")
    h = recipe.add(begin)(recipe.root)
    h = subgraph_intra_stage(recipe, h, bundle("", INTRA))
    recipe.add(end)(h)
    recipe.graph.validate()
    assert recipe.graph.is_valid


def test_loop_pair_listing_wiring():
    recipe = Recipe()
    g = recipe.graph
    b, e = loop_pair()
    s = recipe.add(CodeGenNode("S"))(recipe.root)
    lb = recipe.add(b)(s)
    x = recipe.add(CodeGenNode("X"))(lb)
    y = recipe.add(CodeGenNode("Y"))(x)
    recipe.add(e)(y)
    assert g.validate() == []


def test_seal_checks_registry_and_graph():
    recipe = Recipe()
    recipe.add(CodeGenNode("a", payload=None))(recipe.root)
    recipe.seal()
    from pstgen.cfg import Action

    recipe.add(CodeGenNode("b", Action("missing")))(recipe.root)
    with pytest.raises(InvalidGraph):
        recipe.seal()

    recipe = Recipe()
    recipe.add(CodeGenNode("b", Action("tpl", ("nope",))))(recipe.root)
    recipe.register("tpl", parse_template("//_connector:yes\nx;\n", "t.c"))
    with pytest.raises(UnknownTemplate):
        recipe.seal()
    with pytest.raises(UnknownTemplate):
        recipe.template("other")


# -- manifests -----------------------------------------------------------------


def test_axpy_openmp_manifest():
    recipe = load_manifest_file(os.path.join(AXPY, "axpy_openmp.yaml"))
    graph = recipe.graph
    assert len(graph) == 12
    assert graph.validate() == []
    names = [graph.node(h).name for h in graph.traverse()]
    assert names == [
        "root", "include", "function_begin", "kernel", "function_end", "variables",
        "set_threads", "warmup_call", "timing_begin", "timed_call", "timing_end", "print_time",
    ]
    assert recipe.output == "axpy_openmp_incr_1.c"


def test_manifest_variants_override_templates():
    doc = read_manifest(os.path.join(AXPY, "axpy_cuda.yaml"))
    assert [v for v, _ in manifest_variants(doc)] == ["cuda_incr_1", "cuda_incr_threads", "cuda_single_iter"]
    one = load_manifest(doc, AXPY, "cuda_incr_1")
    single = load_manifest(doc, AXPY, "cuda_single_iter")
    assert one.template("function").source_name != single.template("function").source_name
    with pytest.raises(RecipeError):
        load_manifest(doc, AXPY, "nope")


def test_manifest_determinism():
    path = os.path.join(SPARK, "spark_level_by_level_telescoping.yaml")
    a, b = load_manifest_file(path), load_manifest_file(path)
    for r in (a, b):
        r.graph.validate()
    names = lambda r: [r.graph.node(h).name for h in r.graph.traverse()]
    assert names(a) == names(b)
    assert [(s.index, d.index) for s, d in a.graph.edges()] == [(s.index, d.index) for s, d in b.graph.edges()]


def small_manifest(tmp_path, **changes):
    (tmp_path / "root.c").write_text("//_connector:main\nint main() {\n  //_link:body\n}\n")
    (tmp_path / "body.c").write_text("//_connector:body\nwork();\n")
    doc = {
        "templates": {"root": "root.c", "body": "body.c"},
        "root": {"template": "root", "connector": "main"},
        "nodes": [{"name": "work", "kind": "codegen", "template": "body"}],
        "edges": {"work": "root"},
    }
    doc.update(changes)
    return doc


def test_manifest_default_variant(tmp_path):
    doc = small_manifest(tmp_path)
    assert manifest_variants(doc, str(tmp_path / "demo.yaml")) == [("default", "demo.c")]
    recipe = load_manifest(doc, tmp_path)
    assert recipe.output is None
    assert recipe.name == "manifest"


def test_manifest_missing_template_file(tmp_path):
    doc = small_manifest(tmp_path, templates={"root": "root.c", "body": "gone.c"})
    with pytest.raises(UnknownTemplate):
        load_manifest(doc, tmp_path)


def test_manifest_undeclared_template_alias(tmp_path):
    doc = small_manifest(tmp_path, nodes=[{"name": "work", "kind": "codegen", "template": "ghost"}])
    with pytest.raises(UnknownTemplate):
        load_manifest(doc, tmp_path)


def test_manifest_unknown_dependency(tmp_path):
    doc = small_manifest(tmp_path, edges={"work": "nobody"})
    with pytest.raises(UnknownDependency):
        load_manifest(doc, tmp_path)


def test_manifest_missing_edges_entry(tmp_path):
    doc = small_manifest(tmp_path, edges={})
    with pytest.raises(EmptyDeps):
        load_manifest(doc, tmp_path)


def test_manifest_edges_for_unknown_node(tmp_path):
    doc = small_manifest(tmp_path, edges={"work": "root", "extra": "work"})
    with pytest.raises(UnknownDependency):
        load_manifest(doc, tmp_path)


def test_manifest_duplicate_node_name(tmp_path):
    node = {"name": "work", "kind": "codegen", "template": "body"}
    doc = small_manifest(tmp_path, nodes=[node, dict(node)])
    with pytest.raises(RecipeError):
        load_manifest(doc, tmp_path)


@pytest.mark.parametrize(
    "change, where",
    [
        ({"nodes": [{"name": "work", "kind": "loopy"}]}, "$.nodes[0].kind"),
        ({"nodes": [{"name": "b", "kind": "begin"}]}, "$.nodes[0]"),
        ({"edges": {"work": []}}, "$.edges.work"),
        ({"render": {"indent_width": 0}}, "$.render.indent_width"),
        ({"surprise": 1}, "$"),
    ],
)
def test_manifest_schema_errors(tmp_path, change, where):
    doc = small_manifest(tmp_path, **change)
    with pytest.raises(SchemaError) as info:
        check_manifest(doc)
    assert info.value.path == where


def test_manifest_end_pairing(tmp_path):
    (tmp_path / "loop.c").write_text("//_connector:body\nfor (;;) {\n  //_link:body\n}\n")
    templates = {"root": "root.c", "body": "body.c", "loop": "loop.c"}
    nodes = [
        {"name": "lb", "kind": "begin", "template": "loop"},
        {"name": "work", "kind": "codegen", "template": "body"},
        {"name": "le", "kind": "end", "begin": "lb"},
    ]
    edges = {"lb": "root", "work": "lb", "le": "work"}
    doc = small_manifest(tmp_path, templates=templates, nodes=nodes, edges=edges)
    recipe = load_manifest(doc, tmp_path)
    assert recipe.graph.validate() == []

    bad = small_manifest(tmp_path, templates=templates, nodes=nodes[:2] + [{"name": "le", "kind": "end", "begin": "zz"}], edges=edges)
    with pytest.raises(UnknownDependency):
        load_manifest(bad, tmp_path)

    twice = nodes + [{"name": "le2", "kind": "end", "begin": "lb"}]
    doc = small_manifest(tmp_path, templates=templates, nodes=twice, edges={**edges, "le2": "le"})
    with pytest.raises(RecipeError):
        load_manifest(doc, tmp_path)


def test_manifest_subgraph_requires_roles(tmp_path):
    nodes = [{"name": "init", "kind": "subgraph", "function": "spark_block_init", "nodes": {"shockDet": {"template": "body"}}}]
    doc = small_manifest(tmp_path, nodes=nodes, edges={"init": "root"})
    with pytest.raises(RecipeError):
        load_manifest(doc, tmp_path)
    nodes[0]["function"] = "unheard_of"
    with pytest.raises(RecipeError):
        load_manifest(doc, tmp_path)


def test_spark_manifests_contain_shared_subgraphs():
    for name in sorted(os.listdir(SPARK)):
        if not name.endswith(".yaml"):
            continue
        recipe = load_manifest_file(os.path.join(SPARK, name))
        graph = recipe.graph
        assert graph.validate() == [], name
        node_names = {graph.node(h).name for h in graph.handles()}
        assert {f"block_init.{r}" for r in ("shockDet", "initSoln", "null")} <= node_names
        assert {f"intra_stage.{r}" for r in INTRA + ("null",)} <= node_names


def test_manifest_json_is_accepted(tmp_path):
    doc = small_manifest(tmp_path)
    path = tmp_path / "m.json"
    import json

    path.write_text(json.dumps(doc))
    assert load_manifest_file(path).graph.validate() == []


def test_manifest_not_yaml(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("templates: [unclosed\n")
    with pytest.raises(SchemaError):
        read_manifest(path)
