"""Access-controlled view of D(n, p_-) and the arcs arriving after it.

The construction may look at the arcs of a vertex only after exposing that
vertex; exposing marks all its arcs discovered. Arcs arriving in the window
(p_-, p_+] are revealed one at a time and only when they touch a watched,
already exposed vertex. Everything the guard hands out before `release` is
recorded so tests can audit that no undiscovered arc was read.
"""
from __future__ import annotations

import numpy as np

from ..digraph import IN, OUT, LabeledDigraph
from ..errors import ExposureViolation
from ..random_model import ProcessTrace


class ExposureGuard:

    def __init__(self, base: LabeledDigraph, window_tails=(), window_heads=(), window_labels=None,
                 m_minus: int | None = None):
        self.n = base.n
        self._base = base
        self._arcs = {(t, h): lab for t, h, lab in base.arcs()}
        self._out = base.out_lists()
        self._in = base.in_lists()
        self._wt = [int(x) for x in window_tails]
        self._wh = [int(x) for x in window_heads]
        if window_labels is None:
            window_labels = [OUT] * len(self._wt)
        self._wl = [int(x) for x in window_labels]
        self.m_minus = base.num_arcs if m_minus is None else m_minus
        self.exposed = set()
        self.discovered = set()          # arcs (tail, head) of D(n,p_-) or the window
        self.window_discovered = {}      # window index (1-based) -> (tail, head, label)
        self.revealed = []               # every arc handed out before release
        self.log = []
        self.released = False

    @classmethod
    def from_trace(cls, trace: ProcessTrace, p_minus: float, p_plus: float) -> "ExposureGuard":
        base = trace.prefix(p=p_minus)
        m_minus = trace.count_at(p_minus)
        m_plus = trace.count_at(p_plus)
        t, h, _ = trace.arrivals(m_plus)
        t, h = t[m_minus:], h[m_minus:]
        xi, xo = trace.stamps(t, h)
        labels = np.where(xi <= xo, IN, OUT)
        return cls(base, t, h, labels, m_minus)

    @property
    def window_size(self) -> int:
        """r: number of arcs arriving in the window."""
        return len(self._wt)

    # counts are public: they say nothing about where undiscovered arcs go

    def visible_counts(self, bin_of: np.ndarray, k: int) -> tuple:
        """d+[v, i]: out-arcs visible from v into bin i; d-[v, i]: in-arcs visible from v."""
        n = self.n
        dplus = np.zeros((n, k), dtype=np.int64)
        dminus = np.zeros((n, k), dtype=np.int64)
        if self._arcs:
            arr = np.array([(t, h, lab) for (t, h), lab in self._arcs.items()], dtype=np.int64)
            t, h, lab = arr[:, 0], arr[:, 1], arr[:, 2]
            o = (lab & OUT) > 0
            np.add.at(dplus, (t[o], bin_of[h[o]]), 1)
            i = (lab & IN) > 0
            np.add.at(dminus, (h[i], bin_of[t[i]]), 1)
        return dplus, dminus

    def undiscovered_counts(self, bin_of: np.ndarray, k: int, exclude=()) -> tuple:
        """u+[v, i], u-[v, i]: like visible_counts but only undiscovered arcs whose
        other end is outside `exclude` (vertices removed from the bins)."""
        n = self.n
        uplus = np.zeros((n, k), dtype=np.int64)
        uminus = np.zeros((n, k), dtype=np.int64)
        gone = set(exclude)
        for (t, h), lab in self._arcs.items():
            if (t, h) in self.discovered:
                continue
            if lab & OUT and h not in gone:
                uplus[t, bin_of[h]] += 1
            if lab & IN and t not in gone:
                uminus[h, bin_of[t]] += 1
        return uplus, uminus

    # exposure

    def is_exposed(self, v: int) -> bool:
        return v in self.exposed

    def expose(self, v: int) -> list:
        """Reveal every arc of D(n,p_-) at v; they become discovered."""
        v = int(v)
        if v not in self.exposed:
            self.exposed.add(v)
            self.log.append(("expose", v))
            for w in self._out[v]:
                self.discovered.add((v, w))
            for u in self._in[v]:
                self.discovered.add((u, v))
        return self.incident(v)

    def _hand_out(self, arcs):
        if not self.released:
            self.revealed.extend((t, h) for t, h, _ in arcs)
        return arcs

    def incident(self, v: int) -> list:
        """Arcs (tail, head, label) of D(n,p_-) at an exposed vertex."""
        v = int(v)
        if not self.released and v not in self.exposed:
            raise ExposureViolation(f"vertex {v} has not been exposed")
        arcs = [(v, w, self._arcs[(v, w)]) for w in self._out[v]]
        arcs += [(u, v, self._arcs[(u, v)]) for u in self._in[v]]
        return self._hand_out(arcs)

    def out_neighbors(self, v: int) -> tuple:
        self.incident(v)
        return self._out[v]

    def in_neighbors(self, v: int) -> tuple:
        self.incident(v)
        return self._in[v]

    def total_degree(self, v: int) -> int:
        return len(self.incident(v))

    def window_arc(self, i: int, watched) -> tuple | None:
        """e_i if it touches a watched vertex (all watched vertices must be exposed)."""
        t, h = self._wt[i - 1], self._wh[i - 1]
        hit = t in watched or h in watched
        if not hit:
            return None
        for v in (t, h):
            if v in watched and not self.released and v not in self.exposed:
                raise ExposureViolation(f"watched vertex {v} has not been exposed")
        arc = (t, h, self._wl[i - 1])
        self.window_discovered[i] = arc
        self.discovered.add((t, h))
        self.log.append(("window", i))
        return self._hand_out([arc])[0]

    def discovered_window_arcs(self, upto: int) -> list:
        return [a for i, a in sorted(self.window_discovered.items()) if i <= upto]

    # whole-graph access

    def audit_digraph(self) -> LabeledDigraph:
        """Whole D(n,p_-) for diagnostics that do not steer the construction."""
        self.log.append(("audit",))
        return self._base

    def release(self) -> LabeledDigraph:
        """End of the exposure discipline; everything becomes readable."""
        self.released = True
        self.log.append(("release",))
        return self._base

    def audit_ok(self) -> bool:
        """Every arc handed out before release was discovered and touches an exposed vertex."""
        return all(a in self.discovered and (a[0] in self.exposed or a[1] in self.exposed)
                   for a in self.revealed)
