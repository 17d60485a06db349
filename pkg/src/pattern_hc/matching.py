"""Maximum bipartite matching by Hopcroft-Karp, with a Hall-violator certificate."""
from __future__ import annotations

from collections import deque
from typing import Sequence

UNMATCHED = -1


def hopcroft_karp(adj: Sequence[Sequence[int]], n_right: int) -> tuple:
    """Maximum matching of a bipartite graph given by left adjacency lists.

    Returns (match_left, match_right) with UNMATCHED for free vertices.
    """
    n_left = len(adj)
    match_l = [UNMATCHED] * n_left
    match_r = [UNMATCHED] * n_right
    INF = n_left + n_right + 1
    dist = [0] * n_left

    # cheap greedy start
    for u in range(n_left):
        for v in adj[u]:
            if match_r[v] == UNMATCHED:
                match_l[u] = v
                match_r[v] = u
                break

    def bfs():
        q = deque()
        for u in range(n_left):
            if match_l[u] == UNMATCHED:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == UNMATCHED:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(root):
        # iterative layered DFS from a free left vertex
        stack = [(root, iter(adj[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w == UNMATCHED:
                    path.append((u, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == UNMATCHED:
                dfs(u)
    return match_l, match_r


def hall_violator(adj: Sequence[Sequence[int]], match_l, match_r) -> tuple | None:
    """A left set S with |N(S)| < |S| when the matching is not left-perfect.

    Alternating BFS from one free left vertex; every right vertex reached is
    matched (the matching is maximum), so N(S) is exactly the matched
    partners of S minus the root.
    """
    free = [u for u, v in enumerate(match_l) if v == UNMATCHED]
    if not free:
        return None
    root = free[0]
    seen_l = {root}
    seen_r = set()
    q = deque([root])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v in seen_r:
                continue
            seen_r.add(v)
            w = match_r[v]
            if w == UNMATCHED:
                raise ValueError("matching is not maximum")
            if w not in seen_l:
                seen_l.add(w)
                q.append(w)
    return sorted(seen_l), sorted(seen_r)


def is_matching(adj, match_l) -> bool:
    used = set()
    for u, v in enumerate(match_l):
        if v == UNMATCHED:
            continue
        if v not in adj[u] or v in used:
            return False
        used.add(v)
    return True
