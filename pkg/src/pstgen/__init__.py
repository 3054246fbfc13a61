"""pstgen: compose annotated source templates into parametrized source trees.

Two tool chains share one tree model.  The PST-only chain attaches templates
directly (:func:`attach`); the recipe chain traverses a validated control-flow
graph whose nodes each perform one attachment (:func:`build`).
"""

__version__ = "0.1.0"

from .cfg import (
    Action,
    BeginNode,
    CodeGenNode,
    EndNode,
    Family,
    FlowGraph,
    Handle,
    NodeKind,
    NullNode,
    RootNode,
)
from .driver import BuildContext, BuildReport, build, build_report
from .errors import PstGenError
from .metrics import ReductionReport, count_generated_lines, count_template_lines, format_table, reduction
from .pst import Pst, RenderOptions, attach, dumps, from_json, loads, new_tree, render, to_json, verify
from .recipe import Recipe, load_manifest, load_manifest_file, loop_pair, subgraph_block_init, subgraph_intra_stage
from .template import Template, comment_style, load_template, parse_template

__all__ = [
    "Action", "BeginNode", "BuildContext", "BuildReport", "CodeGenNode", "EndNode", "Family",
    "FlowGraph", "Handle", "NodeKind", "NullNode", "Pst", "PstGenError", "Recipe",
    "ReductionReport", "RenderOptions", "RootNode", "Template", "attach", "build", "build_report",
    "comment_style", "count_generated_lines", "count_template_lines", "dumps", "format_table",
    "from_json", "load_manifest", "load_manifest_file", "load_template", "loads", "loop_pair",
    "new_tree", "parse_template", "reduction", "render", "subgraph_block_init",
    "subgraph_intra_stage", "to_json", "verify",
]
