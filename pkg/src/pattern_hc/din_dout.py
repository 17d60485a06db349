"""The D(S-in, T-out) random multi-digraph, Walkup 2-out bipartite graphs,
and the chained-matching construction of pattern Hamilton cycles.

Bins are indexed 0..k-1 here. Vertex v in bin i picks S[i][j] distinct
in-neighbours (tails) and T[i][j] distinct out-neighbours (heads) in bin j,
never itself. The in-round and out-round are kept as separate arc pools,
so the same ordered pair may occur twice.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .digraph import IN, OUT, LabeledDigraph
from .errors import BinTooSmall, HCNotFound, MatchingFailed, SizeMismatch
from .hc_solver import EXACT_DIRECTED_CAP, CycleWitness, exact_directed_hc, verify_pi_hc
from .matching import UNMATCHED, hall_violator, hopcroft_karp
from .pattern import Arrow, Pattern


def parse_matrix(text: str) -> np.ndarray:
    """'0,2;2,0' -> [[0,2],[2,0]]."""
    rows = [r for r in text.replace(" ", "").split(";") if r]
    mat = np.array([[int(x) for x in r.split(",")] for r in rows], dtype=np.int64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"matrix {text!r} is not square")
    if (mat < 0).any():
        raise ValueError("matrix entries must be nonnegative")
    return mat


def lemma2_matrices(k: int) -> tuple:
    """S = T with 2 between cyclically consecutive bins and 0 elsewhere."""
    S = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        S[i, (i + 1) % k] = 2
        S[(i + 1) % k, i] = 2
    return S, S.copy()


def equal_bins(n_per_bin: int, k: int) -> tuple:
    return tuple(tuple(range(i * n_per_bin, (i + 1) * n_per_bin)) for i in range(k))


@dataclass
class SinToutInstance:
    k: int
    bins: tuple
    S: np.ndarray
    T: np.ndarray
    in_choices: dict = field(repr=False)    # (v, j) -> tails chosen by v in bin j
    out_choices: dict = field(repr=False)   # (v, j) -> heads chosen by v in bin j

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.bins)

    def bin_of(self) -> dict:
        return {v: i for i, b in enumerate(self.bins) for v in b}

    def arcs(self) -> list:
        """Multi-arc list of (tail, head, label); label IN means chosen by the head."""
        out = []
        for (v, _j), tails in sorted(self.in_choices.items()):
            out.extend((u, v, IN) for u in tails)
        for (v, _j), heads in sorted(self.out_choices.items()):
            out.extend((v, w, OUT) for w in heads)
        return out

    def to_digraph(self) -> LabeledDigraph:
        return LabeledDigraph(self.n, self.arcs())

    def arcs_between(self, i: int, j: int) -> set:
        """Distinct ordered pairs (tail in B_i, head in B_j) from either pool."""
        pairs = set()
        for w in self.bins[j]:
            pairs.update((u, w) for u in self.in_choices.get((w, i), ()))
        for u in self.bins[i]:
            pairs.update((u, w) for w in self.out_choices.get((u, j), ()))
        return pairs

    def bipartite(self, i: int, j: int) -> "BipartiteTwoOut":
        """Walkup-type graph of arcs B_i -> B_j: B_i picks heads, B_j picks tails."""
        left, right = self.bins[i], self.bins[j]
        li = {v: x for x, v in enumerate(left)}
        ri = {v: x for x, v in enumerate(right)}
        lc = tuple(tuple(ri[w] for w in self.out_choices.get((u, j), ())) for u in left)
        rc = tuple(tuple(li[u] for u in self.in_choices.get((w, i), ())) for w in right)
        return BipartiteTwoOut(len(left), lc, rc, tuple(left), tuple(right))


def sample_sin_tout(bins: Sequence[Sequence[int]], S, T, rng: np.random.Generator) -> SinToutInstance:
    bins = tuple(tuple(int(v) for v in b) for b in bins)
    k = len(bins)
    S = np.asarray(S, dtype=np.int64)
    T = np.asarray(T, dtype=np.int64)
    if S.shape != (k, k) or T.shape != (k, k):
        raise SizeMismatch(f"S and T must be {k}x{k}")
    for i in range(k):
        for j in range(k):
            room = len(bins[j]) - (i == j)
            if S[i, j] > room or T[i, j] > room:
                raise BinTooSmall(f"bin {j} has room for {room} choices, need {max(S[i, j], T[i, j])}")
    in_choices, out_choices = {}, {}
    arrays = [np.asarray(b, dtype=np.int64) for b in bins]
    for i, b in enumerate(bins):
        for v in b:
            for j in range(k):
                s, t = int(S[i, j]), int(T[i, j])
                if not s and not t:
                    continue
                pool = arrays[j][arrays[j] != v] if i == j else arrays[j]
                if s:
                    in_choices[(v, j)] = tuple(rng.choice(pool, size=s, replace=False).tolist())
                if t:
                    out_choices[(v, j)] = tuple(rng.choice(pool, size=t, replace=False).tolist())
    return SinToutInstance(k, bins, S, T, in_choices, out_choices)


@dataclass(frozen=True)
class BipartiteTwoOut:
    """Bipartite graph on left 0..m-1 and right 0..m-1 built from choices.

    left_choices[u] are right vertices chosen by u, right_choices[w] are left
    vertices chosen by w. `left_ids`/`right_ids` optionally name the vertices.
    """

    m: int
    left_choices: tuple
    right_choices: tuple
    left_ids: tuple | None = None
    right_ids: tuple | None = None

    @property
    def m_right(self) -> int:
        return len(self.right_choices)

    def adjacency(self) -> list:
        adj = [set(c) for c in self.left_choices]
        for w, ch in enumerate(self.right_choices):
            for u in ch:
                adj[u].add(w)
        return [sorted(a) for a in adj]

    def edges(self) -> set:
        return {(u, w) for u, a in enumerate(self.adjacency()) for w in a}

    def edge_source(self, u: int, w: int) -> str:
        """'left', 'right' or 'both': who chose the edge."""
        by_l = w in self.left_choices[u]
        by_r = u in self.right_choices[w]
        return "both" if by_l and by_r else "left" if by_l else "right" if by_r else ""


def sample_walkup(m: int, rng: np.random.Generator, d: int = 2) -> BipartiteTwoOut:
    if m < d:
        raise BinTooSmall(f"m={m} is smaller than the number of choices {d}")
    lc = tuple(tuple(rng.choice(m, size=d, replace=False).tolist()) for _ in range(m))
    rc = tuple(tuple(rng.choice(m, size=d, replace=False).tolist()) for _ in range(m))
    return BipartiteTwoOut(m, lc, rc)


@dataclass(frozen=True)
class Matching:
    pairs: tuple     # pairs[u] = right partner of left u

    def __bool__(self):
        return True

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class NoMatching:
    size: int               # size of a maximum matching
    hall_set: tuple         # left set S
    neighbourhood: tuple    # N(S), strictly smaller than S

    def __bool__(self):
        return False


def find_perfect_matching(g: BipartiteTwoOut) -> Matching | NoMatching:
    if g.m != g.m_right:
        raise SizeMismatch(f"sides differ: {g.m} vs {g.m_right}")
    adj = g.adjacency()
    ml, mr = hopcroft_karp(adj, g.m_right)
    size = sum(1 for v in ml if v != UNMATCHED)
    if size == g.m:
        return Matching(tuple(ml))
    S, NS = hall_violator(adj, ml, mr)
    return NoMatching(size, tuple(S), tuple(NS))


# chained matchings and the contracted cycle

@dataclass(frozen=True)
class PathFamily:
    """Vertex-disjoint paths u_1..u_k with u_i in bin i."""

    paths: tuple
    pattern: Pattern

    def __len__(self):
        return len(self.paths)

    def orientations(self) -> tuple:
        return tuple(self.pattern.dirs[: self.pattern.k - 1])


def _perfect_matching_between(bins, arcs_between, i, j, direction):
    """Matching of B_i into B_j with arcs oriented `direction` (Forward: B_i -> B_j)."""
    left, right = bins[i], bins[j]
    li = {v: x for x, v in enumerate(left)}
    ri = {v: x for x, v in enumerate(right)}
    adj = [[] for _ in left]
    if direction is Arrow.FORWARD:
        for (a, b) in arcs_between(i, j):
            adj[li[a]].append(ri[b])
    else:
        for (a, b) in arcs_between(j, i):
            adj[li[b]].append(ri[a])
    adj = [sorted(set(a)) for a in adj]
    ml, mr = hopcroft_karp(adj, len(right))
    if any(v == UNMATCHED for v in ml):
        S, _ = hall_violator(adj, ml, mr)
        raise MatchingFailed(i, [left[x] for x in S])
    return {left[u]: right[v] for u, v in enumerate(ml)}


def chain_matchings_binned(bins, arcs_between: Callable, pattern: Pattern) -> PathFamily:
    """Chain perfect matchings B_i -> B_{i+1} oriented as pattern[i], i < k-1."""
    k = len(bins)
    sizes = {len(b) for b in bins}
    if len(sizes) != 1:
        raise SizeMismatch(f"bins must have equal sizes, got {[len(b) for b in bins]}")
    if pattern.k != k:
        raise SizeMismatch(f"pattern length {pattern.k} differs from bin count {k}")
    maps = [_perfect_matching_between(bins, arcs_between, i, i + 1, pattern[i]) for i in range(k - 1)]
    paths = []
    for u in bins[0]:
        p = [u]
        for mp in maps:
            p.append(mp[p[-1]])
        paths.append(tuple(p))
    return PathFamily(tuple(paths), pattern)


def _check_lemma2(inst: SinToutInstance):
    k = inst.k
    if k < 3:
        raise ValueError("the chained construction needs k >= 3; the k = 2 shortcut is not supported")
    for i in range(k):
        j = (i + 1) % k
        for M in (inst.S, inst.T):
            if M[i, j] < 2 or M[j, i] < 2:
                raise ValueError(f"need s, t >= 2 between consecutive bins {i} and {j}")


def chain_matchings(inst: SinToutInstance, pattern: Pattern) -> PathFamily:
    _check_lemma2(inst)
    return chain_matchings_binned(inst.bins, inst.arcs_between, pattern)


def contracted_digraph(paths: PathFamily, closing_arcs: set, last: Arrow) -> LabeledDigraph:
    """Path a -> path b iff the last vertex of a and first of b are joined as `last`."""
    start_of = {p[0]: x for x, p in enumerate(paths.paths)}
    end_of = {p[-1]: x for x, p in enumerate(paths.paths)}
    arcs = set()
    for (t, h) in closing_arcs:
        if last is Arrow.FORWARD and t in end_of and h in start_of:
            a, b = end_of[t], start_of[h]
        elif last is Arrow.BACKWARD and h in end_of and t in start_of:
            a, b = end_of[h], start_of[t]
        else:
            continue
        if a != b:
            arcs.add((a, b))
    return LabeledDigraph(len(paths.paths), sorted(arcs))


def directed_hc(d: LabeledDigraph, rng: random.Random | None = None, node_budget: int = 200_000):
    """Exact backtracking up to the exact cap, restarted fragment search above it."""
    if d.n <= EXACT_DIRECTED_CAP:
        return exact_directed_hc(d)
    from .search import search_directed_hc
    return search_directed_hc(d, rng, node_budget=node_budget)


def close_paths(paths: PathFamily, closing_arcs: set, rng=None, node_budget: int = 200_000) -> CycleWitness:
    """Join the paths into one cycle through the last pattern step; un-contract."""
    pattern = paths.pattern
    last = pattern[pattern.k - 1]
    if len(paths) == 1:
        p = paths.paths[0]
        arc = (p[-1], p[0]) if last is Arrow.FORWARD else (p[0], p[-1])
        if arc not in closing_arcs:
            raise HCNotFound("single path cannot be closed")
        return CycleWitness.from_order(p, pattern, 0)
    dc = contracted_digraph(paths, closing_arcs, last)
    w = directed_hc(dc, rng, node_budget)
    if w is None:
        raise HCNotFound(f"no directed Hamilton cycle on {dc.n} contracted vertices")
    order = [v for a in w.order for v in paths.paths[a]]
    return CycleWitness.from_order(order, pattern, 0)


def hc_on_contracted(paths: PathFamily, inst: SinToutInstance, pattern: Pattern,
                     rng=None, node_budget: int = 200_000) -> CycleWitness:
    k = inst.k
    if paths.pattern != pattern:
        paths = PathFamily(paths.paths, pattern)
    closing = inst.arcs_between(k - 1, 0) | inst.arcs_between(0, k - 1)
    return close_paths(paths, closing, rng, node_budget)


def lemma2_cycle(inst: SinToutInstance, pattern: Pattern, rng=None, node_budget: int = 200_000) -> CycleWitness:
    """Chained matchings plus a contracted Hamilton cycle; the result is verified."""
    paths = chain_matchings(inst, pattern)
    w = hc_on_contracted(paths, inst, pattern, rng, node_budget)
    if not verify_pi_hc(inst.to_digraph(), w, pattern):
        raise HCNotFound("constructed cycle failed verification")
    return w.normalized(pattern.k)


def arc_multiset_ok(inst: SinToutInstance, w: CycleWitness) -> bool:
    """Every cycle arc is available in the instance as often as it is used."""
    from collections import Counter
    avail = Counter((t, h) for t, h, _ in inst.arcs())
    used = Counter(w.arcs())
    return all(avail[a] >= c for a, c in used.items())
