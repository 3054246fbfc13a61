"""Helpers that turn index/edge lists into FlowGraphs."""

from pstgen.cfg import CodeGenNode, FlowGraph

_SPECS = [CodeGenNode(f"n{i}") for i in range(64)]


def graph_from_edges(n, edges):
    g = FlowGraph()
    handles = [g.root] + [g.add_node(_SPECS[i]) for i in range(1, n)]
    for s, d in edges:
        g.add_edge(handles[s], handles[d])
    return g, handles


def violation_summary(g):
    from pstgen.cfg import Cycle, DeadEnd, MultipleLeaves, MultipleRoots, Unreachable

    found = g.validate()
    return {
        "cycle": any(isinstance(v, Cycle) for v in found),
        "req2": not any(isinstance(v, (MultipleRoots, MultipleLeaves)) for v in found),
        "unreachable": {v.handle.index for v in found if isinstance(v, Unreachable)},
        "dead": {v.handle.index for v in found if isinstance(v, DeadEnd)},
        "valid": not found,
    }


def random_valid_graph(rng, n):
    """Random DAG over root 0 made valid: every node gets a predecessor and
    every sink is tied to one final leaf."""
    edges = set()
    for v in range(1, n - 1):
        for _ in range(rng.randint(1, 2)):
            edges.add((rng.randrange(0, v), v))
    sinks = set(range(n - 1)) - {s for s, _ in edges}
    edges |= {(s, n - 1) for s in sinks}
    for _ in range(rng.randint(0, n)):
        a, b = sorted(rng.sample(range(n), 2))
        if b != 0:
            edges.add((a, b))
    edges = sorted(edges)
    # relabel so insertion order is not always a topological order of labels
    perm = list(range(1, n))
    rng.shuffle(perm)
    relabel = {0: 0, **{old: new for old, new in zip(range(1, n), perm)}}
    return [(relabel[a], relabel[b]) for a, b in edges]
