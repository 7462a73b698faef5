"""Maximum-cardinality bipartite matching (Hopcroft-Karp)."""

from __future__ import annotations

from collections import deque

import numpy as np

_INF = float("inf")


def hopcroft_karp(adjacency) -> list:
    """Maximum matching of a 0/1 matrix (rows = left, columns = right).

    Returns a list of ``(row, col)`` pairs sorted by row. Neighbours are
    scanned in increasing column order, so the result is deterministic.
    """
    a = np.asarray(adjacency)
    n_left, n_right = a.shape
    adj = [np.flatnonzero(a[i]).tolist() for i in range(n_left)]
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = _INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(u) -> bool:
        # iterative augmenting-path search along the BFS layering
        stack = [(u, iter(adj[u]))]
        path = []
        while stack:
            node, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w == -1:
                    path.append((node, v))
                    for x, y in path:
                        match_l[x] = y
                        match_r[y] = x
                    return True
                if dist[w] == dist[node] + 1:
                    path.append((node, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[node] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == -1:
                dfs(u)
    return [(u, match_l[u]) for u in range(n_left) if match_l[u] != -1]


def max_matching_size(adjacency) -> int:
    return len(hopcroft_karp(adjacency))
