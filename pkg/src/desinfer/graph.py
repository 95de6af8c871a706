"""Small graph routines over dense integer adjacency lists.

Nodes are ``0..n-1`` and ``adjacency[v]`` lists successors of ``v``.  Every
routine is iterative so that large compositions do not hit the recursion limit.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence


def strongly_connected_components(adjacency: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm.  Components come out in reverse topological order."""
    n = len(adjacency)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work[-1]
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            succ = adjacency[v]
            recursed = False
            while i < len(succ):
                w = succ[i]
                i += 1
                if index[w] == -1:
                    work[-1] = (v, i)
                    work.append((w, 0))
                    recursed = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if recursed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def component_ids(n: int, components: Iterable[Sequence[int]]) -> list[int]:
    ids = [-1] * n
    for c, comp in enumerate(components):
        for v in comp:
            ids[v] = c
    return ids


def cyclic_nodes(adjacency: Sequence[Sequence[int]]) -> list[bool]:
    """Flags nodes that lie on a cycle of length at least one."""
    flags = [False] * len(adjacency)
    for comp in strongly_connected_components(adjacency):
        if len(comp) > 1:
            for v in comp:
                flags[v] = True
        else:
            v = comp[0]
            if v in adjacency[v]:
                flags[v] = True
    return flags


def reachable(adjacency: Sequence[Sequence[int]], sources: Iterable[int]) -> list[bool]:
    seen = [False] * len(adjacency)
    stack = []
    for s in sources:
        if not seen[s]:
            seen[s] = True
            stack.append(s)
    while stack:
        v = stack.pop()
        for w in adjacency[v]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    return seen


def reverse(adjacency: Sequence[Sequence[int]]) -> list[list[int]]:
    rev: list[list[int]] = [[] for _ in adjacency]
    for v, succ in enumerate(adjacency):
        for w in succ:
            rev[w].append(v)
    return rev


def can_reach(adjacency: Sequence[Sequence[int]], targets: Sequence[bool]) -> list[bool]:
    """Flags nodes from which some flagged target is reachable (targets included)."""
    rev = reverse(adjacency)
    return reachable(rev, [v for v, t in enumerate(targets) if t])


def bfs_path(adjacency: Sequence[Sequence[int]], sources: Iterable[int], goal) -> list[int] | None:
    """Shortest node path from any source to a node satisfying ``goal``.

    Successors are explored in list order, so ties resolve to the earliest
    listed edge.  Sources are tried in the given order.
    """
    parent: dict[int, int] = {}
    queue = deque()
    for s in sources:
        if s not in parent:
            parent[s] = -1
            queue.append(s)
    while queue:
        v = queue.popleft()
        if goal(v):
            path = [v]
            while parent[path[-1]] != -1:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in adjacency[v]:
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return None


def shortest_cycle_through(adjacency: Sequence[Sequence[int]], v: int) -> list[int] | None:
    """Nodes ``v, ..., v`` of a shortest cycle through ``v``, or ``None``."""
    if v in adjacency[v]:
        return [v, v]
    parent = {}
    queue = deque()
    for w in adjacency[v]:
        if w not in parent:
            parent[w] = v
            queue.append(w)
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if w == v:
                path = [v, u]
                while parent[path[-1]] != v:
                    path.append(parent[path[-1]])
                path.append(v)
                # path holds v, u, ..., first successor, v in reverse order
                return [v] + path[1:-1][::-1] + [v]
            if w not in parent:
                parent[w] = u
                queue.append(w)
    return None
