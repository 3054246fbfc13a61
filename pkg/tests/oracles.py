"""Reference implementations used only by the tests.

They are deliberately naive: path enumeration instead of reachability sets,
brute-force scheduling instead of a heap.
"""

import networkx as nx


def maximal_paths(n, edges, start):
    """Every path from ``start`` that cannot be extended, as node tuples."""
    succ = [[] for _ in range(n)]
    for s, d in edges:
        succ[s].append(d)
    return _paths_from(succ, start)


def _paths_from(succ, start):
    out = []
    stack = [(start,)]
    while stack:
        path = stack.pop()
        nxt = succ[path[-1]]
        if not nxt:
            out.append(path)
        else:
            stack.extend(path + (w,) for w in nxt)
    return out


def path_verdict(n, edges):
    """Requirement verdicts for an acyclic graph whose root is node 0."""
    succ = [[] for _ in range(n)]
    has_pred = [False] * n
    for s, d in edges:
        succ[s].append(d)
        has_pred[d] = True
    sources = [i for i in range(n) if not has_pred[i]]
    paths = [p for src in sources for p in _paths_from(succ, src)]
    ends = {p[-1] for p in paths}
    unique_root = sources == [0]
    unique_leaf = len(ends) == 1
    on_root_path = set()
    for p in paths:
        if p[0] == 0:
            on_root_path.update(p)
    unreachable = set(range(n)) - on_root_path
    # with a unique terminal every maximal path ends there, so a node is a
    # dead end only if no enumerated path through it reaches that terminal
    dead = set()
    if unique_leaf:
        on_leaf_path = set()
        for p in paths:
            on_leaf_path.update(p)
        dead = set(range(n)) - on_leaf_path
    valid = unique_root and unique_leaf and not unreachable and not dead
    return {
        "req2": unique_root and unique_leaf,
        "unreachable": unreachable,
        "dead": dead,
        "valid": valid,
    }


def has_cycle_bruteforce(n, edges):
    """A cycle exists iff some node returns to itself along a walk of length <= n."""
    succ = [set() for _ in range(n)]
    for s, d in edges:
        succ[s].add(d)
    for v in range(n):
        frontier = set(succ[v])
        for _ in range(n):
            if v in frontier:
                return True
            frontier = {w for u in frontier for w in succ[u]}
    return False


def insertion_order_schedule(n, edges):
    """Blocking schedule with lowest-index tie-break, via networkx."""
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return list(nx.lexicographical_topological_sort(g))


def is_topological(order, edges):
    pos = {v: i for i, v in enumerate(order)}
    return all(pos[s] < pos[d] for s, d in edges)


def respects_blocking(order, edges):
    seen = set()
    preds = {}
    for s, d in edges:
        preds.setdefault(d, set()).add(s)
    for v in order:
        if not preds.get(v, set()) <= seen:
            return False
        seen.add(v)
    return True


def forward_pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def sweep_dags(max_content, max_edges, check):
    """Call ``check(n, edges, graph)`` on every forward-edge DAG over root 0 and
    up to ``max_content`` further nodes with at most ``max_edges`` edges.

    Subsets are walked depth first on one mutable graph per node count, so
    each visit costs one edge insertion rather than a full rebuild.
    """
    from graphs import graph_from_edges

    total = 0
    for content in range(max_content + 1):
        n = content + 1
        pairs = forward_pairs(n)
        g, handles = graph_from_edges(n, [])
        chosen = []

        def visit(start):
            nonlocal total
            check(n, tuple(chosen), g)
            total += 1
            if len(chosen) == max_edges:
                return
            for i in range(start, len(pairs)):
                s, d = pairs[i]
                g.add_edge(handles[s], handles[d])
                chosen.append(pairs[i])
                visit(i + 1)
                chosen.pop()
                g.remove_edge(handles[s], handles[d])

        visit(0)
    return total
