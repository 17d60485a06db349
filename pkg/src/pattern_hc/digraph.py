"""Simple labeled digraphs, degree statistics and the degree event A.

Vertices are 0..n-1. Each arc (tail, head) carries a nonempty label set
drawn from {in, out}, stored as a bit mask. A pair that arrived once in the
in-round and once in the out-round is a single arc with both labels.
"""
from __future__ import annotations

import enum
import io
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import PatternHCError

IN = 1
OUT = 2
BOTH = IN | OUT

_LABEL_TEXT = {IN: "i", OUT: "o", BOTH: "io"}
_TEXT_LABEL = {v: k for k, v in _LABEL_TEXT.items()}
_TEXT_LABEL["oi"] = BOTH


class DegreeVariant(enum.Enum):
    ALTERNATING = "alternating"          # in >= 2 or out >= 2 at every vertex
    NON_ALTERNATING = "non-alternating"  # total degree >= 2 at every vertex

    @classmethod
    def for_pattern(cls, p) -> "DegreeVariant":
        from .pattern import PatternClass, as_pattern, classify, primitive_root
        c = classify(primitive_root(as_pattern(p)))
        return cls.ALTERNATING if c is PatternClass.ALTERNATING else cls.NON_ALTERNATING


class DigraphFormatError(PatternHCError, ValueError):
    pass


class LabeledDigraph:
    """Immutable simple digraph with in/out labels on its arcs."""

    __slots__ = ("n", "_arcs", "_out", "_in", "_deg")

    def __init__(self, n: int, arcs: Mapping | Iterable = ()):
        n = int(n)
        if n < 0:
            raise ValueError("n must be nonnegative")
        table = {}
        items = arcs.items() if isinstance(arcs, Mapping) else arcs
        for item in items:
            if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], tuple):
                (t, h), lab = item
            elif len(item) == 3:
                t, h, lab = item
            else:
                (t, h), lab = item, BOTH
            t, h, lab = int(t), int(h), int(lab)
            if t == h:
                raise ValueError(f"self-loop at {t}")
            if not (0 <= t < n and 0 <= h < n):
                raise ValueError(f"arc ({t},{h}) outside [0,{n})")
            if lab & ~BOTH or not lab:
                raise ValueError(f"bad label {lab}")
            table[(t, h)] = table.get((t, h), 0) | lab
        self.n = n
        self._arcs = table
        self._out = None
        self._in = None
        self._deg = None

    @classmethod
    def from_arrays(cls, n, tails, heads, labels=None) -> "LabeledDigraph":
        tails = np.asarray(tails, dtype=np.int64)
        heads = np.asarray(heads, dtype=np.int64)
        if labels is None:
            labels = np.full(len(tails), BOTH, dtype=np.int64)
        return cls(n, zip(tails.tolist(), heads.tolist(), np.asarray(labels).tolist()))

    @classmethod
    def empty(cls, n: int) -> "LabeledDigraph":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "LabeledDigraph":
        return cls(n, ((a, b, BOTH) for a in range(n) for b in range(n) if a != b))

    @classmethod
    def directed_cycle(cls, order: Iterable[int], n: int | None = None) -> "LabeledDigraph":
        order = list(order)
        n = len(order) if n is None else n
        return cls(n, ((order[i], order[(i + 1) % len(order)]) for i in range(len(order))))

    # basic access
    def __len__(self):
        return len(self._arcs)

    @property
    def num_arcs(self) -> int:
        return len(self._arcs)

    def has_arc(self, tail: int, head: int) -> bool:
        return (tail, head) in self._arcs

    def label(self, tail: int, head: int) -> int:
        return self._arcs.get((tail, head), 0)

    def arcs(self) -> list:
        """Sorted list of (tail, head, label)."""
        return [(t, h, lab) for (t, h), lab in sorted(self._arcs.items())]

    def arc_set(self) -> set:
        return set(self._arcs)

    def __iter__(self) -> Iterator:
        return iter(sorted(self._arcs))

    def __contains__(self, arc) -> bool:
        return tuple(arc) in self._arcs

    def __eq__(self, other):
        if not isinstance(other, LabeledDigraph):
            return NotImplemented
        return self.n == other.n and self._arcs == other._arcs

    def __hash__(self):
        return hash((self.n, frozenset(self._arcs.items())))

    def __repr__(self):
        return f"LabeledDigraph(n={self.n}, arcs={len(self._arcs)})"

    def issubgraph(self, other: "LabeledDigraph", labels: bool = False) -> bool:
        if self.n != other.n:
            return False
        if labels:
            return all(lab & ~other.label(t, h) == 0 and other.has_arc(t, h)
                       for (t, h), lab in self._arcs.items())
        return all(a in other._arcs for a in self._arcs)

    # adjacency
    def _build_adjacency(self):
        out = [[] for _ in range(self.n)]
        inn = [[] for _ in range(self.n)]
        for (t, h) in sorted(self._arcs):
            out[t].append(h)
            inn[h].append(t)
        self._out = [tuple(x) for x in out]
        self._in = [tuple(x) for x in inn]

    def out_neighbors(self, v: int) -> tuple:
        if self._out is None:
            self._build_adjacency()
        return self._out[v]

    def in_neighbors(self, v: int) -> tuple:
        if self._in is None:
            self._build_adjacency()
        return self._in[v]

    def neighbors(self, v: int) -> set:
        """Neighbours in the underlying undirected graph."""
        return set(self.out_neighbors(v)) | set(self.in_neighbors(v))

    def out_lists(self) -> list:
        if self._out is None:
            self._build_adjacency()
        return self._out

    def in_lists(self) -> list:
        if self._in is None:
            self._build_adjacency()
        return self._in

    # degrees
    def _degrees(self):
        if self._deg is None:
            outd = np.zeros(self.n, dtype=np.int64)
            ind = np.zeros(self.n, dtype=np.int64)
            if self._arcs:
                a = np.fromiter((x for arc in self._arcs for x in arc), dtype=np.int64,
                                count=2 * len(self._arcs)).reshape(-1, 2)
                outd = np.bincount(a[:, 0], minlength=self.n)
                ind = np.bincount(a[:, 1], minlength=self.n)
            outd.flags.writeable = False
            ind.flags.writeable = False
            self._deg = (ind, outd)
        return self._deg

    @property
    def in_degrees(self) -> np.ndarray:
        return self._degrees()[0]

    @property
    def out_degrees(self) -> np.ndarray:
        return self._degrees()[1]

    @property
    def total_degrees(self) -> np.ndarray:
        ind, outd = self._degrees()
        return ind + outd

    def in_degree(self, v: int) -> int:
        return int(self.in_degrees[v])

    def out_degree(self, v: int) -> int:
        return int(self.out_degrees[v])

    def total_degree(self, v: int) -> int:
        return int(self.in_degrees[v] + self.out_degrees[v])

    # derived digraphs
    def reversed(self) -> "LabeledDigraph":
        """Every arc reversed; labels swap so visibility stays at the same endpoint."""
        swap = {IN: OUT, OUT: IN, BOTH: BOTH}
        return LabeledDigraph(self.n, (((h, t), swap[lab]) for (t, h), lab in self._arcs.items()))

    def union(self, other: "LabeledDigraph") -> "LabeledDigraph":
        if self.n != other.n:
            raise ValueError("vertex counts differ")
        return LabeledDigraph(self.n, list(self._arcs.items()) + list(other._arcs.items()))

    def with_arcs(self, arcs: Iterable) -> "LabeledDigraph":
        return LabeledDigraph(self.n, list(self._arcs.items()) + list(arcs))

    # serialization
    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"n={self.n}\n")
        for t, h, lab in self.arcs():
            buf.write(f"{t} {h} {_LABEL_TEXT[lab]}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "LabeledDigraph":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or not lines[0].startswith("n="):
            raise DigraphFormatError("missing 'n=<int>' header")
        try:
            n = int(lines[0][2:])
        except ValueError as exc:
            raise DigraphFormatError(f"bad header {lines[0]!r}") from exc
        arcs = []
        for no, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) not in (2, 3):
                raise DigraphFormatError(f"line {no}: expected 'tail head labels'")
            lab = BOTH if len(parts) == 2 else _TEXT_LABEL.get(parts[2])
            if lab is None:
                raise DigraphFormatError(f"line {no}: bad labels {parts[2]!r}")
            arcs.append((int(parts[0]), int(parts[1]), lab))
        try:
            return cls(n, arcs)
        except ValueError as exc:
            raise DigraphFormatError(str(exc)) from exc


def event_A(d: LabeledDigraph, variant: DegreeVariant) -> bool:
    if d.n == 0:
        return False
    ind, outd = d.in_degrees, d.out_degrees
    if variant is DegreeVariant.ALTERNATING:
        return bool(np.all((ind >= 2) | (outd >= 2)))
    return bool(np.all(ind + outd >= 2))


def deficient_vertices(d: LabeledDigraph, variant: DegreeVariant) -> np.ndarray:
    ind, outd = d.in_degrees, d.out_degrees
    if variant is DegreeVariant.ALTERNATING:
        bad = (ind < 2) & (outd < 2)
    else:
        bad = ind + outd < 2
    return np.flatnonzero(bad)


def low_degree_stats(d: LabeledDigraph) -> tuple:
    """(X, Y): #vertices with in = out = 1, #vertices with total degree 1."""
    ind, outd = d.in_degrees, d.out_degrees
    x = int(np.count_nonzero((ind == 1) & (outd == 1)))
    y = int(np.count_nonzero(ind + outd == 1))
    return x, y
