"""Control-flow graphs of code-generation operations.

Nodes are added with a dependency list and receive a :class:`Handle`; edges
always point from a dependency to its dependent.  A graph is usable for code
generation once :meth:`FlowGraph.validate` reports no violations:

1. it is acyclic;
2. the implicit root is the only source and exactly one node is a sink;
3. every node is reachable from the root and reaches the sink;
4. begin/end partners are balanced and properly nested along every path.

Traversal is blocking: a node is visited only after all of its predecessors,
and ties between ready nodes go to the lowest insertion index.
"""

from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Iterable, Sequence, Union

from .errors import DuplicateNode, EmptyDeps, ForeignHandle, GraphError, NotValidated


class NodeKind(enum.Enum):
    ROOT = "root"
    CODEGEN = "codegen"
    BEGIN = "begin"
    END = "end"
    NULL = "null"


class Family(enum.Enum):
    LOOP = "loop"
    CONCURRENT_DATA = "concurrent_data"


@dataclass(eq=False)
class Action:
    """Code-generation payload: a registered template and the sections to use.

    ``connectors`` empty means every section of the template.  ``link`` names
    the interior link of a region template; it may be omitted when the
    selected section has exactly one link.
    """

    template: str
    connectors: tuple[str, ...] = ()
    link: str | None = None


@dataclass(eq=False)
class NodeSpec:
    name: str
    kind: ClassVar[NodeKind]

    @property
    def action(self) -> Action | None:
        return None


@dataclass(eq=False)
class RootNode(NodeSpec):
    name: str = "root"
    kind: ClassVar[NodeKind] = NodeKind.ROOT


@dataclass(eq=False)
class CodeGenNode(NodeSpec):
    payload: Action | None = None
    kind: ClassVar[NodeKind] = NodeKind.CODEGEN

    @property
    def action(self) -> Action | None:
        return self.payload


@dataclass(eq=False)
class NullNode(NodeSpec):
    name: str = "null"
    kind: ClassVar[NodeKind] = NodeKind.NULL


@dataclass(eq=False)
class BeginNode(NodeSpec):
    family: Family = Family.LOOP
    payload: Action | None = None
    partner: "EndNode | None" = field(default=None, repr=False)
    kind: ClassVar[NodeKind] = NodeKind.BEGIN

    @property
    def action(self) -> Action | None:
        return self.payload


@dataclass(eq=False)
class EndNode(NodeSpec):
    family: Family = Family.LOOP
    payload: Action | None = None
    partner: BeginNode | None = field(default=None, repr=False)
    kind: ClassVar[NodeKind] = NodeKind.END

    @property
    def action(self) -> Action | None:
        return self.payload


@dataclass(frozen=True)
class Handle:
    graph_id: int
    index: int

    def __repr__(self) -> str:
        return f"Handle(#{self.index})"


# -- violations ----------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    nodes: tuple[Handle, ...]
    requirement: ClassVar[int] = 1


@dataclass(frozen=True)
class MultipleRoots:
    handles: tuple[Handle, ...]
    requirement: ClassVar[int] = 2


@dataclass(frozen=True)
class MultipleLeaves:
    handles: tuple[Handle, ...]
    requirement: ClassVar[int] = 2


@dataclass(frozen=True)
class Unreachable:
    handle: Handle
    requirement: ClassVar[int] = 3


@dataclass(frozen=True)
class DeadEnd:
    handle: Handle
    requirement: ClassVar[int] = 3


@dataclass(frozen=True)
class UnmatchedBeginEnd:
    handles: tuple[Handle, ...]
    reason: str
    requirement: ClassVar[int] = 4


Violation = Union[Cycle, MultipleRoots, MultipleLeaves, Unreachable, DeadEnd, UnmatchedBeginEnd]

Deps = Union[Handle, Sequence[Handle]]

_graph_ids = itertools.count(1)


class FlowGraph:
    def __init__(self, root: RootNode | None = None):
        self._id = next(_graph_ids)
        self._nodes: list[NodeSpec] = []
        self._succ: list[list[int]] = []
        self._pred: list[list[int]] = []
        self._pair_index: dict[int, int] = {}
        self._valid = False
        self._stack_in: dict[int, tuple[int, ...]] = {}
        self._leaf: int | None = None
        self.root = self.add_node(root or RootNode())

    # -- construction ----------------------------------------------------------

    def _check(self, h: Handle) -> int:
        if not isinstance(h, Handle) or h.graph_id != self._id or not 0 <= h.index < len(self._nodes):
            raise ForeignHandle(f"{h!r} does not belong to this graph")
        return h.index

    def _handle(self, index: int) -> Handle:
        return Handle(self._id, index)

    def add_node(self, node: NodeSpec) -> Handle:
        """Insert ``node`` without wiring it."""
        if isinstance(node, (BeginNode, EndNode)):
            if id(node) in self._pair_index:
                raise DuplicateNode(f"begin/end node {node.name!r} is already in the graph")
            self._pair_index[id(node)] = len(self._nodes)
        self._nodes.append(node)
        self._succ.append([])
        self._pred.append([])
        self._valid = False
        return self._handle(len(self._nodes) - 1)

    def add_edge(self, src: Handle, dst: Handle) -> None:
        s, d = self._check(src), self._check(dst)
        if s == d:
            raise GraphError(f"self-loop on {src!r}")
        if d not in self._succ[s]:
            self._succ[s].append(d)
            self._pred[d].append(s)
            self._valid = False

    def remove_edge(self, src: Handle, dst: Handle) -> None:
        s, d = self._check(src), self._check(dst)
        if d not in self._succ[s]:
            raise GraphError(f"no edge {src!r} -> {dst!r}")
        self._succ[s].remove(d)
        self._pred[d].remove(s)
        self._valid = False

    def add(self, node: NodeSpec, deps: Deps | None = None):
        """Insert ``node`` depending on ``deps`` and return its handle.

        Called without ``deps`` it returns a function taking the dependencies,
        so recipes can read ``g.add(node)(deps)``.
        """
        if deps is None:
            return lambda deps: self.add(node, deps)
        dep_list = [deps] if isinstance(deps, Handle) else list(deps)
        for h in dep_list:
            self._check(h)
        if not dep_list:
            raise EmptyDeps(f"node {node.name!r} needs at least one dependency")
        h = self.add_node(node)
        for dep in dep_list:
            self.add_edge(dep, h)
        return h

    # -- queries ---------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._nodes)

    def handles(self) -> list[Handle]:
        return [self._handle(i) for i in range(len(self._nodes))]

    def node(self, h: Handle) -> NodeSpec:
        return self._nodes[self._check(h)]

    def successors(self, h: Handle) -> list[Handle]:
        return [self._handle(i) for i in self._succ[self._check(h)]]

    def predecessors(self, h: Handle) -> list[Handle]:
        return [self._handle(i) for i in self._pred[self._check(h)]]

    def edges(self) -> list[tuple[Handle, Handle]]:
        return [
            (self._handle(s), self._handle(d)) for s, succ in enumerate(self._succ) for d in succ
        ]

    def handle_of(self, node: NodeSpec) -> Handle | None:
        """Handle of a begin/end node spec, or ``None`` if it is not in the graph."""
        idx = self._pair_index.get(id(node))
        return None if idx is None else self._handle(idx)

    @property
    def is_valid(self) -> bool:
        return self._valid

    @property
    def leaf(self) -> Handle:
        self._require_valid()
        return self._handle(self._leaf)

    def open_regions(self, h: Handle) -> tuple[Handle, ...]:
        """Begin nodes whose regions are open when ``h`` is reached (outermost first)."""
        self._require_valid()
        return tuple(self._handle(i) for i in self._stack_in[self._check(h)])

    # -- validation ------------------------------------------------------------

    def _topo(self) -> tuple[list[int], list[int]]:
        """Kahn order plus the nodes left over (non-empty iff cyclic)."""
        indeg = [len(p) for p in self._pred]
        ready = [i for i, d in enumerate(indeg) if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            v = heapq.heappop(ready)
            order.append(v)
            for w in self._succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(ready, w)
        placed = set(order)
        return order, [i for i in range(len(self._nodes)) if i not in placed]

    def _reach(self, start: int, adj: list[list[int]]) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def validate(self) -> list[Violation]:
        violations: list[Violation] = []
        n = len(self._nodes)
        root = self.root.index

        order, leftover = self._topo()
        if leftover:
            on_cycle = [v for v in leftover if any(v in self._reach(w, self._succ) for w in self._succ[v])]
            violations.append(Cycle(tuple(self._handle(v) for v in on_cycle)))

        sources = [i for i in range(n) if not self._pred[i]]
        sinks = [i for i in range(n) if not self._succ[i]]
        if sources != [root]:
            violations.append(MultipleRoots(tuple(self._handle(i) for i in sources)))
        if len(sinks) != 1:
            violations.append(MultipleLeaves(tuple(self._handle(i) for i in sinks)))

        reachable = self._reach(root, self._succ)
        for i in range(n):
            if i not in reachable:
                violations.append(Unreachable(self._handle(i)))
        if len(sinks) == 1:
            reaches_leaf = self._reach(sinks[0], self._pred)
            for i in range(n):
                if i not in reaches_leaf:
                    violations.append(DeadEnd(self._handle(i)))

        stack_in: dict[int, tuple[int, ...]] = {}
        if not leftover:
            violations.extend(self._check_regions(order, sinks, stack_in))

        self._valid = not violations
        self._stack_in = stack_in if self._valid else {}
        self._leaf = sinks[0] if self._valid else None
        return violations

    def _check_regions(
        self, order: list[int], sinks: list[int], stack_in: dict[int, tuple[int, ...]]
    ) -> list[Violation]:
        if not self._pair_index:
            stack_in.update((v, ()) for v in order)
            return []
        found: dict[tuple, UnmatchedBeginEnd] = {}

        def report(handles: Iterable[int], reason: str) -> None:
            key = (tuple(handles), reason)
            if key not in found:
                found[key] = UnmatchedBeginEnd(tuple(self._handle(i) for i in key[0]), reason)

        for i, node in enumerate(self._nodes):
            if isinstance(node, (BeginNode, EndNode)):
                partner = node.partner
                if partner is None or id(partner) not in self._pair_index:
                    report((i,), "partner node is not in the graph")
                elif partner.partner is not node:
                    report((i,), "partner association is not mutual")

        stack_out: dict[int, tuple[int, ...]] = {}
        for v in order:
            preds = self._pred[v]
            if preds:
                incoming = {stack_out[p] for p in preds}
                if len(incoming) > 1:
                    report((v,), "paths into this node disagree on open regions")
                s = stack_out[preds[0]]
            else:
                s = ()
            stack_in[v] = s
            node = self._nodes[v]
            if isinstance(node, BeginNode):
                stack_out[v] = s + (v,)
            elif isinstance(node, EndNode):
                if not s:
                    report((v,), "end node reached with no open region")
                    stack_out[v] = s
                elif self._nodes[s[-1]] is not node.partner:
                    report((s[-1], v), "regions are interleaved, not nested")
                    stack_out[v] = s[:-1]
                else:
                    stack_out[v] = s[:-1]
            else:
                stack_out[v] = s

        for leaf in sinks:
            if stack_out.get(leaf):
                report(stack_out[leaf], "region is never closed")
        return list(found.values())

    def _require_valid(self) -> None:
        if not self._valid:
            raise NotValidated("graph has not been validated successfully")

    # -- traversal -------------------------------------------------------------

    def traverse(self, visit: Callable[[NodeSpec], object] | None = None) -> list[Handle]:
        """Blocking traversal; returns the visit order."""
        self._require_valid()
        indeg = [len(p) for p in self._pred]
        ready = [self.root.index]
        order = []
        while ready:
            v = heapq.heappop(ready)
            if visit is not None:
                visit(self._nodes[v])
            order.append(self._handle(v))
            for w in self._succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(ready, w)
        return order

    def longest_path(self) -> list[Handle]:
        self._require_valid()
        order, _ = self._topo()
        dist = {self.root.index: 0}
        parent: dict[int, int | None] = {self.root.index: None}
        for v in order:
            if v == self.root.index:
                continue
            best = min(self._pred[v], key=lambda p: (-dist[p], p))
            dist[v] = dist[best] + 1
            parent[v] = best
        path = []
        v: int | None = self._leaf
        while v is not None:
            path.append(self._handle(v))
            v = parent[v]
        return path[::-1]

    # -- export ----------------------------------------------------------------

    def to_dot(self, name: str = "flow") -> str:
        """Graphviz text: one line per node (kind and name), one per edge."""
        shapes = {
            NodeKind.ROOT: "doublecircle",
            NodeKind.CODEGEN: "ellipse",
            NodeKind.BEGIN: "box",
            NodeKind.END: "box",
            NodeKind.NULL: "point",
        }
        lines = [f"digraph {name} {{"]
        for i, node in enumerate(self._nodes):
            label = f"{node.kind.value}: {node.name}".replace('"', '\\"')
            lines.append(f'  n{i} [label="{label}", shape={shapes[node.kind]}];')
        for s, d in ((s, d) for s, succ in enumerate(self._succ) for d in succ):
            lines.append(f"  n{s} -> n{d};")
        for i, node in enumerate(self._nodes):
            if isinstance(node, BeginNode) and node.partner is not None:
                j = self._pair_index.get(id(node.partner))
                if j is not None:
                    lines.append(f"  n{i} -> n{j} [style=dashed, arrowhead=none, constraint=false];")
        lines.append("}")
        return "\n".join(lines) + "\n"
