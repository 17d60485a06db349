"""Locality checks H1-H3 on the underlying undirected graph.

H1: every vertex has fewer than `bound` non-good vertices within distance R
    (the vertex itself included).
H2: a dangerous vertex has no other non-good vertex within distance R.
H3: no non-good vertex lies within distance R of a cycle of length <= R.
    A pair of opposite arcs is a cycle of length 2.

Breadth-first searches stop after `cap` visited vertices when a cap is
given; the number of truncated searches is reported.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..digraph import LabeledDigraph
from .classify import VertexClass, VertexClassification


@dataclass
class HandsomeReport:
    h1: bool | None
    h2: bool | None
    h3: bool | None
    h1_violators: set = field(default_factory=set)     # vertices v
    h2_violators: set = field(default_factory=set)     # pairs (dangerous v, non-good u)
    h3_violators: set = field(default_factory=set)     # non-good u near a short cycle
    witness: dict = field(default_factory=dict)
    truncated: int = 0

    @property
    def ok(self) -> bool:
        return bool(self.h1 and self.h2 and self.h3)

    def first_violation(self):
        for name in ("H1", "H2", "H3"):
            if getattr(self, name.lower()) is False:
                return name, self.witness.get(name)
        return None

    def summary(self) -> dict:
        return {"H1": self.h1, "H2": self.h2, "H3": self.h3,
                "witness": {k: list(v) if isinstance(v, tuple) else v for k, v in self.witness.items()},
                "truncated": self.truncated}


class _Graph:
    def __init__(self, d: LabeledDigraph, cap):
        self.nb = [set() for _ in range(d.n)]
        self.two = set()
        for t, h, _ in d.arcs():
            self.nb[t].add(h)
            self.nb[h].add(t)
            if d.has_arc(h, t):
                self.two.add(t)
        self.nb = [tuple(sorted(s)) for s in self.nb]
        self.cap = cap
        self.truncated = 0
        self._short = {}

    def ball(self, src: int, radius: int):
        """(vertex, distance) for every vertex within `radius` of src."""
        dist = {src: 0}
        q = deque([src])
        yield src, 0
        while q:
            v = q.popleft()
            dv = dist[v]
            if dv >= radius:
                continue
            for w in self.nb[v]:
                if w not in dist:
                    if self.cap is not None and len(dist) >= self.cap:
                        self.truncated += 1
                        return
                    dist[w] = dv + 1
                    yield w, dv + 1
                    q.append(w)

    def on_short_cycle(self, y: int, radius: int) -> bool:
        key = (y, radius)
        if key in self._short:
            return self._short[key]
        res = self._short[key] = self._search_cycle(y, radius)
        return res

    def _search_cycle(self, y, radius):
        if radius >= 2 and y in self.two:
            return True
        if radius < 3:
            return False
        dist = {y: 0}
        branch = {y: -1}
        q = deque()
        for w in self.nb[y]:
            dist[w] = 1
            branch[w] = w
            q.append(w)
        while q:
            v = q.popleft()
            dv, bv = dist[v], branch[v]
            for w in self.nb[v]:
                if w == y:
                    continue
                if w in dist:
                    if branch[w] != bv and dv + dist[w] + 1 <= radius:
                        return True
                    continue
                if dv + 1 > radius - 1:
                    continue
                if self.cap is not None and len(dist) >= self.cap:
                    self.truncated += 1
                    return False
                dist[w] = dv + 1
                branch[w] = bv
                q.append(w)
        return False


def check_handsome(d: LabeledDigraph, cls: VertexClassification | np.ndarray, radius: int | None = None,
                   bound: int | None = None, cap: int | None = None, first_only: bool = False,
                   k: int | None = None) -> HandsomeReport:
    """Evaluate H1-H3. Defaults: radius 10k and bound 4k, with k taken from the
    classification's count matrix (or given)."""
    classes = cls.cls if isinstance(cls, VertexClassification) else np.asarray(cls)
    if k is None:
        if not isinstance(cls, VertexClassification):
            if radius is None or bound is None:
                raise ValueError("give k, or radius and bound, with a bare class array")
        else:
            k = cls.dplus.shape[1]
    radius = 10 * k if radius is None else int(radius)
    bound = 4 * k if bound is None else int(bound)
    g = _Graph(d, cap)
    nongood = np.flatnonzero(classes != VertexClass.GOOD).tolist()
    ng = set(nongood)
    rep = HandsomeReport(None, None, None)

    # H1: count non-good vertices around each vertex by searching from the non-good ones
    cnt = np.zeros(d.n, dtype=np.int64)
    stop = False
    for u in nongood:
        for v, _ in g.ball(u, radius):
            cnt[v] += 1
            if first_only and cnt[v] >= bound:
                stop = True
                break
        if stop:
            break
    viol = np.flatnonzero(cnt >= bound).tolist()
    rep.h1 = not viol
    rep.h1_violators = set(viol)
    if viol:
        rep.witness["H1"] = (viol[0], int(cnt[viol[0]]))
        if first_only:
            rep.truncated = g.truncated
            return rep

    # H2
    for v in np.flatnonzero(classes == VertexClass.DANGEROUS).tolist():
        for u, _ in g.ball(v, radius):
            if u != v and u in ng:
                rep.h2_violators.add((v, u))
                rep.witness.setdefault("H2", (v, u))
                if first_only:
                    break
        if first_only and rep.h2_violators:
            break
    rep.h2 = not rep.h2_violators
    if first_only and not rep.h2:
        rep.truncated = g.truncated
        return rep

    # H3
    for u in nongood:
        for y, _ in g.ball(u, radius):
            if g.on_short_cycle(y, radius):
                rep.h3_violators.add(u)
                rep.witness.setdefault("H3", (u, y))
                break
        if first_only and rep.h3_violators:
            break
    rep.h3 = not rep.h3_violators
    rep.truncated = g.truncated
    return rep
