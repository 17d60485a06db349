"""Exact pattern Hamilton cycle solvers, a verifier and a brute-force oracle."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .digraph import LabeledDigraph
from .errors import PatternMismatch, TooLarge
from .pattern import Arrow, F, Pattern, follows, follows_some_rotation

EXACT_PI_HC_CAP = 16
ENUMERATE_CAP = 9
EXACT_DIRECTED_CAP = 18


@dataclass(frozen=True)
class CycleWitness:
    """Cyclic vertex order with the orientation of each edge v_i v_{i+1}."""

    order: tuple
    orientations: tuple
    offset: int | None = None   # pattern index of the first edge, when known

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))
        object.__setattr__(self, "orientations", tuple(Arrow(o) for o in self.orientations))
        if len(self.order) != len(self.orientations):
            raise ValueError("order and orientations differ in length")

    @property
    def n(self) -> int:
        return len(self.order)

    def arcs(self) -> list:
        """The arcs used, as (tail, head), in cycle order."""
        out = []
        n = len(self.order)
        for i, o in enumerate(self.orientations):
            a, b = self.order[i], self.order[(i + 1) % n]
            out.append((a, b) if o is Arrow.FORWARD else (b, a))
        return out

    def orientation_string(self) -> str:
        return "".join(o.glyph for o in self.orientations)

    def rotated(self, s: int) -> "CycleWitness":
        n = len(self.order)
        s %= n
        off = self.offset
        return CycleWitness(self.order[s:] + self.order[:s],
                            self.orientations[s:] + self.orientations[:s],
                            None if off is None else off + s)

    def normalized(self, k: int | None = None) -> "CycleWitness":
        """Rotate so the minimum vertex comes first."""
        s = self.order.index(min(self.order))
        w = self.rotated(s)
        if w.offset is not None and k:
            w = CycleWitness(w.order, w.orientations, w.offset % k)
        return w

    @classmethod
    def from_order(cls, order: Sequence[int], pattern: Pattern, offset: int = 0) -> "CycleWitness":
        k = pattern.k
        return cls(tuple(order), tuple(pattern[(offset + i) % k] for i in range(len(order))), offset % k)


def verify_pi_hc(d: LabeledDigraph, w: CycleWitness, pattern: Pattern) -> bool:
    n = d.n
    if n < 2 or sorted(w.order) != list(range(n)):
        return False
    arcs = w.arcs()
    if len(set(arcs)) != len(arcs):
        return False   # n = 2 could otherwise reuse one arc
    if not all(d.has_arc(a, b) for a, b in arcs):
        return False
    return follows_some_rotation(w.orientations, pattern)


def _edge_ok(d, a, b, o):
    return d.has_arc(a, b) if o is Arrow.FORWARD else d.has_arc(b, a)


def enumerate_oracle(d: LabeledDigraph, pattern: Pattern) -> bool:
    """Reference decision procedure: every cyclic order, every offset, no pruning."""
    n, k = d.n, pattern.k
    if n > ENUMERATE_CAP:
        raise TooLarge(f"enumerate_oracle is limited to n <= {ENUMERATE_CAP}")
    if n < 2 or n % k:
        return False
    for rest in itertools.permutations(range(1, n)):
        order = (0,) + rest
        for t in range(k):
            w = CycleWitness.from_order(order, pattern, t)
            if verify_pi_hc(d, w, pattern):
                return True
    return False


def exact_pi_hc(d: LabeledDigraph, pattern: Pattern, cap: int = EXACT_PI_HC_CAP) -> CycleWitness | None:
    """Exhaustive search for a pattern Hamilton cycle; None means none exists.

    Vertex 0 is fixed as v_1 and each of the k pattern offsets is tried.
    A branch dies once some unused vertex has fewer than two usable
    neighbours left.
    """
    n, k = d.n, pattern.k
    if n > cap:
        raise TooLarge(f"exact_pi_hc is limited to n <= {cap}")
    if n % k:
        raise PatternMismatch(f"pattern length {k} does not divide n={n}")
    if n < 2:
        return None
    if n == 2:
        for t in range(k):
            w = CycleWitness.from_order((0, 1), pattern, t)
            if verify_pi_hc(d, w, pattern):
                return w.normalized(k)
        return None

    outm = [0] * n
    inm = [0] * n
    for a, b, _ in d.arcs():
        outm[a] |= 1 << b
        inm[b] |= 1 << a
    und = [outm[v] | inm[v] for v in range(n)]
    dirs = pattern.dirs
    full = (1 << n) - 1

    def step_mask(v, layer):
        return outm[v] if dirs[layer] is F else inm[v]

    for t in range(k):
        order = [0]
        # the closing edge v_n v_1 has layer (t + n - 1) % k; it needs the right arc into 0
        close_layer = (t + n - 1) % k
        closers = inm[0] if dirs[close_layer] is F else outm[0]

        def dfs(v, used, depth):
            if depth == n:
                return bool(closers >> v & 1)
            free = full & ~used
            # every free vertex needs two usable neighbours among free, v and 0
            avail = free | (1 << v) | 1
            rest = free
            while rest:
                low = rest & -rest
                u = low.bit_length() - 1
                if bin(und[u] & avail & ~low).count("1") < 2:
                    return False
                rest ^= low
            cand = step_mask(v, (t + depth - 1) % k) & free
            if depth == n - 1:
                cand &= closers
            while cand:
                low = cand & -cand
                u = low.bit_length() - 1
                order.append(u)
                if dfs(u, used | low, depth + 1):
                    return True
                order.pop()
                cand ^= low
            return False

        if dfs(0, 1, 1):
            return CycleWitness.from_order(order, pattern, t).normalized(k)
    return None


def exact_directed_hc(d: LabeledDigraph, cap: int = EXACT_DIRECTED_CAP) -> CycleWitness | None:
    """Directed Hamilton cycle by backtracking with degree pruning and a dead-state memo."""
    n = d.n
    if n > cap:
        raise TooLarge(f"exact_directed_hc is limited to n <= {cap}")
    if n < 2:
        return None
    outm = [0] * n
    inm = [0] * n
    for a, b, _ in d.arcs():
        outm[a] |= 1 << b
        inm[b] |= 1 << a
    if any(o == 0 for o in outm) or any(i == 0 for i in inm):
        return None
    full = (1 << n) - 1
    dead = set()
    order = [0]

    def dfs(v, used):
        if used == full:
            return bool(outm[v] & 1)
        if (used, v) in dead:
            return False
        free = full & ~used
        rest = free
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            # u needs a predecessor among free | v and a successor among free | 0
            if not (inm[u] & (free | (1 << v)) & ~low) or not (outm[u] & (free | 1) & ~low):
                dead.add((used, v))
                return False
            rest ^= low
        cand = outm[v] & free
        while cand:
            low = cand & -cand
            u = low.bit_length() - 1
            order.append(u)
            if dfs(u, used | low):
                return True
            order.pop()
            cand ^= low
        dead.add((used, v))
        return False

    if dfs(0, 1):
        return CycleWitness.from_order(order, Pattern((F,)), 0)
    return None


def witness_follows(w: CycleWitness, pattern: Pattern) -> bool:
    return follows(w.orientations, pattern, 0)
