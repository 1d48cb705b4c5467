"""Inheritance over ISA and AKO edges.

Only those two relation kinds conduct inheritance; named relations never do.
All traversals are breadth-first with a visited set, so cycles and
self-loops are harmless. Ties at equal distance go to the earliest declared
edge.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .model import ISA, AttributeTree, KnowledgeBase


@dataclass(frozen=True)
class ResolvedValue:
    value: AttributeTree
    provider: str
    distance: int
    # query object first, provider last
    path: Tuple[str, ...] = ()
    # other objects defining the attribute at the same distance, shadowed by the tie rule
    conflicts: Tuple[str, ...] = ()

    @property
    def scalar(self) -> Optional[str]:
        return self.value.value


def _parents(kb: KnowledgeBase, name: str):
    for edge in kb.objects[name].edges:
        if edge.kind.inherits:
            yield edge.target


def resolve_attr(kb: KnowledgeBase, obj: str, path: Sequence[str]) -> Optional[ResolvedValue]:
    """Look an attribute up locally, then through ISA/AKO ancestors.

    A local definition always wins. Otherwise the nearest definer wins; the
    whole subtree at ``path`` comes from that single provider.
    """
    path = list(path)
    node = kb.get(obj)
    local = node.find_attr(path)
    if local is not None:
        return ResolvedValue(local, obj, 0, (obj,))

    came_from: Dict[str, Optional[str]] = {obj: None}
    level = [obj]
    distance = 0
    while level:
        distance += 1
        found: List[Tuple[str, AttributeTree]] = []
        nxt = []
        for name in level:
            for parent in _parents(kb, name):
                if parent in came_from:
                    continue
                came_from[parent] = name
                nxt.append(parent)
                value = kb.objects[parent].find_attr(path)
                if value is not None:
                    found.append((parent, value))
        if found:
            provider, value = found[0]
            trail = [provider]
            while came_from[trail[-1]] is not None:
                trail.append(came_from[trail[-1]])
            return ResolvedValue(
                value, provider, distance, tuple(reversed(trail)),
                tuple(p for p, _ in found[1:]))
        level = nxt
    return None


def ancestors(kb: KnowledgeBase, obj: str) -> List[Tuple[str, int]]:
    """Everything reachable over ISA/AKO edges, nearest first.

    ``obj`` itself appears only when a cycle leads back to it.
    """
    kb.get(obj)
    seen: Dict[str, int] = {}
    queue = deque([(obj, 0)])
    expanded = {obj}
    out = []
    while queue:
        name, dist = queue.popleft()
        for parent in _parents(kb, name):
            if parent in seen:
                continue
            seen[parent] = dist + 1
            out.append((parent, dist + 1))
            if parent not in expanded:
                expanded.add(parent)
                queue.append((parent, dist + 1))
    return out


def _reaches_avoiding(kb: KnowledgeBase, start: str, goal: str, avoid: str) -> bool:
    """Is there an ISA/AKO path start ->* goal that never passes through ``avoid``?

    ``avoid`` may still be the goal itself (a cycle closing at its start).
    """
    if start == goal:
        return True
    if start == avoid:
        return False
    seen = {start}
    queue = deque([start])
    while queue:
        name = queue.popleft()
        for parent in _parents(kb, name):
            if parent == goal:
                return True
            if parent in seen or parent == avoid:
                continue
            seen.add(parent)
            queue.append(parent)
    return False


def instances_of(kb: KnowledgeBase, cls: str, transitive: bool = False) -> List[str]:
    """Objects that are instances of ``cls``, in declaration order.

    Direct instances have an ISA edge to ``cls``. Transitive instances reach
    ``cls`` along a simple ISA/AKO path whose first hop is ISA.
    """
    kb.get(cls)
    reach = _reaching(kb, cls) if transitive else {cls}
    out = []
    for node in kb:
        isa_targets = [e.target for e in node.edges if e.kind == ISA and e.target in reach]
        if not transitive:
            if isa_targets:
                out.append(node.name)
            continue
        if any(_reaches_avoiding(kb, t, cls, node.name) for t in isa_targets):
            out.append(node.name)
    return out


def _reaching(kb: KnowledgeBase, goal: str) -> set:
    """``goal`` plus every object with an ISA/AKO path to it."""
    children: Dict[str, List[str]] = {}
    for node in kb:
        for parent in _parents(kb, node.name):
            children.setdefault(parent, []).append(node.name)
    seen = {goal}
    queue = deque([goal])
    while queue:
        for child in children.get(queue.popleft(), ()):
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return seen


def is_a(kb: KnowledgeBase, obj: str, cls: str) -> bool:
    kb.get(obj)
    kb.get(cls)
    if obj == cls:
        return True
    return any(name == cls for name, _ in ancestors(kb, obj))
