"""The four construction steps: D_*, short paths, contraction, final cycle.

Path positions are 1-based as in the construction: a path is v_1..v_L with
L = 6k+1 (or 6k+3 for the single longer path of an alternating run with
n = 2 mod 4), the arc v_i v_{i+1} oriented as pattern[(i-1) mod k] and v_i
placed in bin (i-1) mod k. Bins are 0-based.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from ..digraph import DegreeVariant, LabeledDigraph
from ..din_dout import chain_matchings_binned, close_paths
from ..errors import AOutsideWindow, HCNotFound, PathBuildFailed, SizeMismatch
from ..hc_solver import CycleWitness
from ..pattern import Arrow, Pattern
from .bins import BinAssignment
from .classify import VertexClassification
from .exposure import ExposureGuard


# Step 1

@dataclass
class DStar:
    digraph: LabeledDigraph
    r: int                 # arcs arriving in the window
    r_star: int            # window arcs needed for the degree event
    m_minus: int
    window_arcs: list      # discovered e_i with i <= r_star

    @property
    def m_star(self) -> int:
        return self.m_minus + self.r_star


def _satisfied(indeg, outdeg, variant):
    if variant is DegreeVariant.ALTERNATING:
        return indeg >= 2 or outdeg >= 2
    return indeg + outdeg >= 2


def expose_until_A(guard: ExposureGuard, cls: VertexClassification, variant: DegreeVariant,
                   allow_zero: bool = False) -> DStar:
    """Reveal window arcs at dangerous vertices until every vertex meets the degree event.

    Only dangerous vertices can miss the event, since every other vertex has
    total degree at least h+3 >= 3 in D(n,p_-) or h+2 visible arcs each way.
    With allow_zero, the event may already hold at p_- (r_* = 0).
    """
    dangerous = set(cls.dangerous())
    indeg, outdeg = {}, {}
    for v in dangerous:
        arcs = guard.incident(v)
        outdeg[v] = sum(1 for t, _, _ in arcs if t == v)
        indeg[v] = len(arcs) - outdeg[v]
    missing = {v for v in dangerous if not _satisfied(indeg[v], outdeg[v], variant)}
    r = guard.window_size
    r_star = 0
    if missing:
        for i in range(1, r + 1):
            arc = guard.window_arc(i, dangerous)
            if arc is None:
                continue
            t, h, _ = arc
            if t in dangerous:
                outdeg[t] += 1
            if h in dangerous:
                indeg[h] += 1
            for v in (t, h):
                if v in missing and _satisfied(indeg[v], outdeg[v], variant):
                    missing.discard(v)
            if not missing:
                r_star = i
                break
        else:
            raise AOutsideWindow(f"degree event not reached within the window ({len(missing)} deficient)",
                                 r=r, deficient=sorted(missing)[:10])
    elif not allow_zero:
        raise AOutsideWindow("degree event already holds at p_-", r=r, r_star=0)
    extra = guard.discovered_window_arcs(r_star)
    base = guard.audit_digraph()
    d = base.with_arcs(extra) if extra else base
    return DStar(d, r, r_star, guard.m_minus, extra)


# Step 2

@dataclass(frozen=True)
class ShortPath:
    vertices: tuple
    pattern: Pattern
    nongood: int | None      # the non-good vertex w_2, None on the all-good fallback path
    j: int                   # 1-based pattern position of the edge w_1 w_2
    swaps: tuple = ()        # (w, partner) pairs exchanged

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def orientations(self) -> tuple:
        k = self.pattern.k
        return tuple(self.pattern[i % k] for i in range(self.length))

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]


@dataclass
class PathCollection:
    paths: list = field(default_factory=list)
    fallback: bool = False

    def __len__(self):
        return len(self.paths)

    def vertex_set(self) -> set:
        return {v for p in self.paths for v in p.vertices}

    def internal_vertices(self) -> set:
        return {v for p in self.paths for v in p.vertices[1:-1]}


class _PathBuilder:

    def __init__(self, guard: ExposureGuard, dstar: DStar, cls: VertexClassification,
                 bins: BinAssignment, pattern: Pattern, rng: np.random.Generator):
        self.guard, self.dstar, self.cls, self.bins = guard, dstar, cls, bins
        self.pattern, self.rng = pattern, rng
        self.k = pattern.k
        self.used = set()
        self.window_at = {}
        for t, h, _ in dstar.window_arcs:
            self.window_at.setdefault(t, set()).add((t, h))
            self.window_at.setdefault(h, set()).add((t, h))

    def _orient(self, i: int) -> Arrow:
        return self.pattern[(i - 1) % self.k]

    def _dstar_arcs(self, v):
        arcs = {(t, h) for t, h, _ in self.guard.incident(v)}
        return arcs | self.window_at.get(v, set())

    def _step_candidates(self, v, forward: bool, orient: Arrow, target_bin: int, taken: set) -> list:
        """Good unused vertices w in `target_bin` joined to the exposed v as required.

        forward: w follows v on the path, so the edge (v, w) has orientation
        `orient`; otherwise w precedes v and the edge (w, v) has it.
        """
        self.guard.expose(v)
        want_out = (orient is Arrow.FORWARD) == forward
        nbrs = self.guard.out_neighbors(v) if want_out else self.guard.in_neighbors(v)
        bin_of = self.bins.bin_of
        return [w for w in nbrs
                if bin_of[w] == target_bin and self.cls.is_good(w) and w not in self.used and w not in taken]

    def _choose(self, cands):
        return cands[int(self.rng.integers(len(cands)))]

    def _start_triples(self, w2):
        """All (w1, w3, j) with w1, w3 good, unused, distinct and j the first fitting position."""
        arcs = self._dstar_arcs(w2)
        into = {}   # x -> set of orientations of the edge (x, w2)
        for t, h in arcs:
            x = t if h == w2 else h
            into.setdefault(x, set()).add(Arrow.FORWARD if h == w2 else Arrow.BACKWARD)
        ok = sorted(x for x in into if self.cls.is_good(x) and x not in self.used and x != w2)
        out = []
        for x in ok:
            for y in ok:
                if x == y:
                    continue
                for j in range(1, self.k + 1):
                    a, b = self._orient(j), self._orient(j + 1)
                    # edge (w2, y) oriented b  <=>  edge (y, w2) oriented flip(b)
                    if a in into[x] and b.flipped() in into[y]:
                        out.append((x, y, j))
                        break
        return out

    def build(self, w2: int, length: int, nongood: bool) -> ShortPath:
        k, bins = self.k, self.bins
        self.guard.expose(w2)
        triples = self._start_triples(w2)
        if not triples:
            raise PathBuildFailed(w2, "no pair of good neighbours fits the pattern")
        w1, w3, j = self._choose(triples)
        L = length + 1
        a = [int(bins.bin_of[w]) + 1 for w in (w1, w2, w3)]          # 1-based bins
        partners = [a[0] + 3 * k, a[1] + 4 * k, a[2] + 5 * k]
        if len(set(partners)) != 3 or not all(k + j + 2 < q < L for q in partners):
            raise PathBuildFailed(w2, f"swap positions {partners} collide (j={j}, bins={a})")
        target = {q: (j - 1 + s) % k for s, q in enumerate(partners)}
        if length == 6 * k + 2:
            target[L] = 0

        def tgt(i):
            return target.get(i, (i - 1) % k)

        path = {k + j: w1, k + j + 1: w2, k + j + 2: w3}
        taken = set(path.values())
        for i in range(k + j + 2, L):
            c = self._step_candidates(path[i], True, self._orient(i), tgt(i + 1), taken)
            if not c:
                raise PathBuildFailed(w2, f"cannot extend forward from position {i}")
            path[i + 1] = self._choose(c)
            taken.add(path[i + 1])
        for i in range(k + j, 1, -1):
            c = self._step_candidates(path[i], False, self._orient(i - 1), tgt(i - 1), taken)
            if not c:
                raise PathBuildFailed(w2, f"cannot extend backward from position {i}")
            path[i - 1] = self._choose(c)
            taken.add(path[i - 1])
        verts = tuple(int(path[i]) for i in range(1, L + 1))
        swaps = []
        for s, q in enumerate(partners):
            w, partner = verts[k + j + s - 1], verts[q - 1]
            if bins.bin_of[w] != bins.bin_of[partner]:
                bins.swap(w, partner)
                swaps.append((w, partner))
        final = dict(target)
        for q in partners:
            del final[q]
        for i, v in enumerate(verts, start=1):
            want = final.get(i, (i - 1) % k)
            if bins.bin_of[v] != want:
                raise PathBuildFailed(w2, f"vertex at position {i} ended in bin {bins.bin_of[v]}, not {want}")
        self.used.update(verts)
        return ShortPath(verts, self.pattern, w2 if nongood else None, j, tuple(swaps))


def build_path_collection(guard: ExposureGuard, dstar: DStar, cls: VertexClassification,
                          bins: BinAssignment, pattern: Pattern, rng: np.random.Generator,
                          long_path: bool = False) -> PathCollection:
    """One short path through every non-good vertex; bins are swapped in place.

    With no non-good vertex a single path through a random good vertex is
    built so that the contraction step still has a fat vertex.
    """
    k = pattern.k
    b = _PathBuilder(guard, dstar, cls, bins, pattern, rng)
    coll = PathCollection()
    centres = cls.non_good()
    if not centres:
        good = np.flatnonzero(cls.good)
        centres = [int(good[int(rng.integers(len(good)))])]
        coll.fallback = True
    for x, w2 in enumerate(centres):
        if w2 in b.used:
            raise PathBuildFailed(w2, "non-good vertex already lies on a path")
        length = 6 * k + 2 if (long_path and x == 0) else 6 * k
        coll.paths.append(b.build(w2, length, not coll.fallback))
    return coll


# Step 3

@dataclass
class ContractedDigraph:
    """Bins of ordinary and fat vertices with the arcs between consecutive bins.

    A fat vertex is named by the first vertex of its path; it uses the path's
    first vertex toward the last bin and the path's last vertex toward bin 1.
    """

    k: int
    bins: tuple
    fat: dict          # name -> ShortPath
    arcs: set

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.bins)

    def arcs_between(self, i: int, j: int) -> set:
        return self._by_pair.get((i, j), set())

    def __post_init__(self):
        where = {v: i for i, b in enumerate(self.bins) for v in b}
        self._by_pair = {}
        for t, h in self.arcs:
            self._by_pair.setdefault((where[t], where[h]), set()).add((t, h))

    def balanced(self) -> bool:
        return len({len(b) for b in self.bins}) == 1


def contract(d: LabeledDigraph, paths: PathCollection, bins: BinAssignment) -> ContractedDigraph:
    k = bins.k
    on_path = paths.vertex_set()
    bin_of = bins.bin_of
    members = [[] for _ in range(k)]
    for v in range(d.n):
        if v not in on_path:
            members[int(bin_of[v])].append(v)
    fat = {p.start: p for p in paths.paths}
    members[0].extend(sorted(fat))
    role = {}          # original vertex -> (name, bin) for arc purposes
    for v in range(d.n):
        if v not in on_path:
            role[v] = (v, int(bin_of[v]))
    arcs = set()

    def consecutive(i, j):
        return (i - j) % k in (1, k - 1)

    for t, h, _ in d.arcs():
        if t in role and h in role:
            (a, i), (b, j) = role[t], role[h]
            if consecutive(i, j):
                arcs.add((a, b))
    for name, p in fat.items():
        for v, side in ((p.start, k - 1), (p.end, 1 % k)):
            for w in d.out_neighbors(v):
                if w in role and role[w][1] == side:
                    arcs.add((name, w))
            for u in d.in_neighbors(v):
                if u in role and role[u][1] == side:
                    arcs.add((u, name))
    cd = ContractedDigraph(k, tuple(tuple(sorted(m)) for m in members), fat, arcs)
    if not cd.balanced():
        raise SizeMismatch(f"contracted bins are unbalanced: {[len(b) for b in cd.bins]}")
    return cd


# Step 4

def final_cycle(cd: ContractedDigraph, pattern: Pattern, rng: random.Random,
                node_budget: int = 200_000) -> CycleWitness:
    """Chained matchings and a closing directed cycle on D_**, then un-contract."""
    k = cd.k
    fam = chain_matchings_binned(cd.bins, cd.arcs_between, pattern)
    closing = cd.arcs_between(k - 1, 0) | cd.arcs_between(0, k - 1)
    w = close_paths(fam, closing, rng, node_budget)
    order, orients = [], []
    for v, o in zip(w.order, w.orientations):
        if v in cd.fat:
            p = cd.fat[v]
            order.extend(p.vertices)
            orients.extend(p.orientations)
        else:
            order.append(v)
        orients.append(o)
    if len(set(order)) != len(order):
        raise HCNotFound("un-contracted cycle repeats a vertex")
    return CycleWitness(tuple(order), tuple(orients))
