"""Randomized complete search for pattern Hamilton cycles on larger digraphs.

The cycle is built as a successor function. Assigned successor links form
vertex-disjoint fragments (paths). Each fragment keeps the set of pattern
layers its first vertex may sit at, stored as a k-bit mask; a link a -> b
is feasible only if the layer masks of the two fragments stay compatible
and the pair (a, b) has an arc of the required direction at that layer.
Vertices with a single feasible successor or predecessor are forced.
Branching is on the vertex with the fewest feasible successors.

Given an unlimited budget the search is exhaustive, hence exact. With a
node budget it is a heuristic; restarts follow the Luby sequence.
"""
from __future__ import annotations

import heapq
import random

from .digraph import LabeledDigraph
from .hc_solver import CycleWitness
from .pattern import Arrow, Pattern


def _rot(mask, t, k, full):
    t %= k
    if t == 0:
        return mask
    return ((mask << t) | (mask >> (k - t))) & full


def luby(i: int) -> int:
    """i-th term (1-based) of the Luby restart sequence 1,1,2,1,1,2,4,..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class _Budget(Exception):
    pass


class FragmentSearch:
    """One search instance; `solve` may be called repeatedly (restarts)."""

    def __init__(self, d: LabeledDigraph, pattern: Pattern, rng: random.Random | None = None,
                 branching: str = "scan"):
        self.branching = branching
        self.n = n = d.n
        self.k = k = pattern.k
        self.full = (1 << k) - 1
        self.pattern = pattern
        self.rng = rng or random.Random(0)
        # O[(a, b)]: bit 1 if a->b exists, bit 2 if b->a exists
        O = {}
        for a, b, _ in d.arcs():
            O[(a, b)] = O.get((a, b), 0) | 1
            O[(b, a)] = O.get((b, a), 0) | 2
        self.O = O
        code = [1 if x is Arrow.FORWARD else 2 for x in pattern.dirs]
        self.lmask = {o: sum(1 << r for r in range(k) if code[r] & o) for o in (1, 2, 3)}
        # L[(a, b)]: layers r at which the link a -> b is oriented as pattern[r]
        self.L = {ab: self.lmask[o] for ab, o in O.items()}
        # rotation tables RT[t][mask] = mask rotated by -t, for small k
        if k <= 10:
            self.RT = [[_rot(m, -t, k, self.full) for m in range(1 << k)] for t in range(k)]
        else:
            self.RT = None
        self.base_out = [set() for _ in range(n)]
        self.base_in = [set() for _ in range(n)]
        for (a, b), o in O.items():
            if self.lmask[o]:
                self.base_out[a].add(b)
                self.base_in[b].add(a)
        self.nodes = 0
        self.exhausted = False

    # state
    def _reset(self):
        n = self.n
        self.out_c = [set(s) for s in self.base_out]
        self.in_c = [set(s) for s in self.base_in]
        self.succ = [-1] * n
        self.pred = [-1] * n
        self.fstart = list(range(n))
        self.fend = list(range(n))
        self.flen = [1] * n
        self.foff = [self.full] * n
        self.trail = []
        self.nassigned = 0
        # lazy min-heap of (candidate count, tiebreak, vertex) for unassigned successors
        self.heap = [(len(self.out_c[v]), self.rng.random(), v) for v in range(n)]
        heapq.heapify(self.heap)

    def _feas(self, a, b):
        """Layer mask for the start of a's fragment if a -> b is linked (0: infeasible)."""
        s1 = self.fstart[a]
        l1 = self.flen[s1]
        RT = self.RT
        if RT is not None:
            k = self.k
            S = self.foff[s1] & RT[(l1 - 1) % k][self.L[(a, b)]]
            if b == s1:
                return S if l1 == self.n else 0
            return S & RT[l1 % k][self.foff[b]] if S else 0
        k, full = self.k, self.full
        S = self.foff[s1] & _rot(self.L[(a, b)], -(l1 - 1), k, full)
        if b == s1:
            return S if l1 == self.n else 0
        return S & _rot(self.foff[b], -l1, k, full)

    def _rm(self, a, b):
        self.out_c[a].discard(b)
        self.in_c[b].discard(a)
        self.trail.append((0, a, b))
        heapq.heappush(self.heap, (len(self.out_c[a]), self.rng.random(), a))

    def _set_mask(self, s, mask, touched):
        """Narrow the layer mask of the fragment starting at s."""
        self.trail.append((2, s, self.foff[s]))
        self.foff[s] = mask
        e = self.fend[s]
        for y in self.in_c[s]:
            touched[(0, y)] = None
        for x in self.out_c[e]:
            touched[(1, x)] = None
        touched[(0, e)] = None
        touched[(1, s)] = None

    def _assign(self, a, b, S, touched):
        s1 = self.fstart[a]
        e2 = self.fend[b] if b != s1 else a
        self.trail.append((1, a, b, s1, self.fend[s1], self.flen[s1], self.foff[s1], e2))
        self.succ[a] = b
        self.pred[b] = a
        self.nassigned += 1
        if b == s1:
            self.closed = (s1, S)
        else:
            self.fend[s1] = e2
            self.flen[s1] += self.flen[b]
            self.foff[s1] = S
            self.fstart[e2] = s1
        for x in list(self.out_c[a]):
            if x != b:
                self._rm(a, x)
                touched[(1, x)] = None
        for y in list(self.in_c[b]):
            if y != a:
                self._rm(y, b)
                touched[(0, y)] = None
        if b != s1:
            # merged fragment: its layer mask changed, recheck both ends
            for y in self.in_c[s1]:
                touched[(0, y)] = None
            for x in self.out_c[e2]:
                touched[(1, x)] = None
            touched[(0, e2)] = None
            touched[(1, s1)] = None

    def _undo(self, mark):
        tr = self.trail
        while len(tr) > mark:
            e = tr.pop()
            if e[0] == 0:
                self.out_c[e[1]].add(e[2])
                self.in_c[e[2]].add(e[1])
                heapq.heappush(self.heap, (len(self.out_c[e[1]]), self.rng.random(), e[1]))
            elif e[0] == 2:
                self.foff[e[1]] = e[2]
            else:
                _, a, b, s1, fe, fl, fo, e2 = e
                self.succ[a] = -1
                self.pred[b] = -1
                self.nassigned -= 1
                heapq.heappush(self.heap, (len(self.out_c[a]), self.rng.random(), a))
                self.fend[s1] = fe
                self.flen[s1] = fl
                self.foff[s1] = fo
                if b != s1:
                    self.fstart[e2] = b

    def _succ_options(self, a):
        return [(b, S) for b in self.out_c[a] for S in (self._feas(a, b),) if S]

    def _pred_options(self, b):
        return [(a, S) for a in self.in_c[b] for S in (self._feas(a, b),) if S]

    def _singleton_layers(self, v, succ_opts, pred_opts):
        """Layers r where v has a predecessor and a distinct successor at r."""
        k, full = self.k, self.full
        succ_at = [set() for _ in range(k)]
        pred_at = [set() for _ in range(k)]
        for b, S in succ_opts:
            for r in range(k):
                if S >> r & 1:
                    succ_at[r].add(b)
        for a, S in pred_opts:
            R = _rot(S, self.flen[self.fstart[a]], k, full)
            for r in range(k):
                if R >> r & 1:
                    pred_at[r].add(a)
        U = 0
        for r in range(k):
            sa, pa = succ_at[r], pred_at[r]
            if sa and pa and len(sa | pa) >= 2:
                U |= 1 << r
        return U

    def _propagate(self, touched):
        k, full = self.k, self.full
        while touched:
            side, v = touched.popitem()[0]
            if self.succ[v] == -1 and self.pred[v] == -1 and self.n > 2:
                so = self._succ_options(v)
                po = self._pred_options(v)
                U = self._singleton_layers(v, so, po) & self.foff[v]
                if not U:
                    return False
                if U != self.foff[v]:
                    self._set_mask(v, U, touched)
            if side == 0:
                if self.succ[v] != -1:
                    continue
                o = self._succ_options(v)
                if not o:
                    return False
                if len(o) == 1:
                    b, S = o[0]
                    self._assign(v, b, S, touched)
                    continue
                # layers of the fragment start that still admit some successor
                U = 0
                for _, S in o:
                    U |= S
                s1 = self.fstart[v]
                if U != self.foff[s1]:
                    self._set_mask(s1, U, touched)
            else:
                if self.pred[v] != -1:
                    continue
                o = self._pred_options(v)
                if not o:
                    return False
                if len(o) == 1:
                    a, S = o[0]
                    self._assign(a, v, S, touched)
                    continue
                U = 0
                for a, S in o:
                    U |= _rot(S, self.flen[self.fstart[a]], k, full)
                U &= self.foff[v]
                if U != self.foff[v]:
                    self._set_mask(v, U, touched)
        return True

    def _choose_scan(self):
        """Unassigned vertex with the fewest feasible successors (full scan)."""
        best, best_count = -1, 1 << 30
        for v in range(self.n):
            if self.succ[v] != -1:
                continue
            c = 0
            for b in self.out_c[v]:
                if self._feas(v, b):
                    c += 1
                    if c >= best_count:
                        break
            if c < best_count:
                best, best_count = v, c
                if c <= 2:
                    break
        return best

    def _choose(self):
        """Unassigned vertex with the fewest successor candidates (lazy heap)."""
        if self.branching == "scan":
            return self._choose_scan()
        heap = self.heap
        while heap:
            c, _, v = heap[0]
            if self.succ[v] != -1 or c != len(self.out_c[v]):
                heapq.heappop(heap)
                continue
            return v
        return -1

    def _dfs(self, limit):
        if self.nassigned == self.n:
            return True
        v = self._choose()
        if v < 0:
            return False
        opts = self._succ_options(v)
        if not opts:
            return False
        self.rng.shuffle(opts)
        opts.sort(key=lambda t: len(self.in_c[t[0]]))
        for b, S in opts:
            self.nodes += 1
            if self.nodes > limit:
                raise _Budget
            mark = len(self.trail)
            touched = {}
            self._assign(v, b, S, touched)
            if self._propagate(touched) and self._dfs(limit):
                return True
            self._undo(mark)
        return False

    def _witness(self):
        # layer mask of the closed cycle's fragment; pick the lowest layer for vertex 0
        s, mask = self.closed
        # position of 0 within the fragment starting at s
        pos, v = 0, s
        while v != 0:
            v = self.succ[v]
            pos += 1
        t = (mask & -mask).bit_length() - 1
        offset = (t + pos) % self.k
        order = [0]
        v = self.succ[0]
        while v != 0:
            order.append(v)
            v = self.succ[v]
        return CycleWitness.from_order(order, self.pattern, offset).normalized(self.k)

    def solve(self, node_limit: int | None = None) -> CycleWitness | None:
        """One run. Returns a witness, or None if the run failed.

        `exhausted` is set when the run proved that no cycle exists.
        """
        if self.n < 3 or self.n % self.k:
            self.exhausted = True
            return None
        self._reset()
        limit = self.nodes + node_limit if node_limit is not None else float("inf")
        touched = dict.fromkeys((s, v) for v in range(self.n) for s in (0, 1))
        try:
            if self._propagate(touched) and self._dfs(limit):
                return self._witness()
        except _Budget:
            return None
        self.exhausted = True
        return None


def search_pi_hc(d: LabeledDigraph, pattern: Pattern, rng: random.Random | None = None,
                 node_budget: int = 200_000, base_restart: int | None = None) -> CycleWitness | None:
    """Restarted fragment search with a total node budget.

    A single descent needs up to n nodes, so restart lengths are multiples
    of 2n by default. Returns None when the budget ran out or the instance
    has no cycle.
    """
    if d.n < 3:
        from .hc_solver import exact_pi_hc
        return exact_pi_hc(d, pattern)
    s = FragmentSearch(d, pattern, rng)
    base = base_restart or 2 * d.n
    i = 1
    while s.nodes < node_budget:
        limit = min(base * luby(i), node_budget - s.nodes)
        w = s.solve(limit)
        if w is not None or s.exhausted:
            return w
        i += 1
    return None


def search_directed_hc(d: LabeledDigraph, rng: random.Random | None = None,
                       node_budget: int = 200_000, base_restart: int | None = None) -> CycleWitness | None:
    return search_pi_hc(d, Pattern((Arrow.FORWARD,)), rng, node_budget, base_restart)
