"""Generic directed-graph helpers used for cycle reporting and statistics.

Graphs are given as ``{node: [successor, ...]}`` mappings whose iteration order
is the tie-breaking order. Everything here is iterative so that long chains do
not hit the interpreter recursion limit.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Sequence

Graph = Dict[Hashable, Sequence[Hashable]]


def strongly_connected_components(graph: Graph) -> List[List[Hashable]]:
    """Tarjan's algorithm. Components are returned with members in graph order."""
    order = {node: i for i, node in enumerate(graph)}
    index: dict = {}
    lowlink: dict = {}
    on_stack: set = set()
    stack: list = []
    components = []
    counter = 0

    for start in graph:
        if start in index:
            continue
        work = [(start, 0)]
        while work:
            node, pos = work.pop()
            if pos == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            succs = graph.get(node, ())
            recurse = False
            while pos < len(succs):
                succ = succs[pos]
                pos += 1
                if succ not in index:
                    work.append((node, pos))
                    work.append((succ, 0))
                    recurse = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index[succ])
            if recurse:
                continue
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                comp.sort(key=order.__getitem__)
                components.append(comp)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    components.sort(key=lambda c: order[c[0]])
    return components


def cyclic_components(graph: Graph) -> List[List[Hashable]]:
    """Components that contain at least one cycle (size > 1, or a self-loop)."""
    out = []
    for comp in strongly_connected_components(graph):
        if len(comp) > 1 or comp[0] in graph.get(comp[0], ()):
            out.append(comp)
    return out


def longest_simple_path(graph: Graph) -> int:
    """Number of edges on the longest simple path.

    Exhaustive depth-first search; worst case is exponential, which is the
    nature of the problem. The search stops early once a path visiting every
    node has been found.
    """
    nodes = list(graph)
    bound = len(nodes) - 1
    best = 0
    for start in nodes:
        on_path = {start}
        work = [(start, iter(graph.get(start, ())))]
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in on_path:
                    on_path.add(succ)
                    work.append((succ, iter(graph.get(succ, ()))))
                    advanced = True
                    break
            if advanced:
                best = max(best, len(work) - 1)
                if best >= bound:
                    return best
                continue
            work.pop()
            on_path.discard(node)
    return best
