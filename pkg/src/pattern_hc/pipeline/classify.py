"""Good, bad and dangerous vertices."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .bins import BinAssignment
from .exposure import ExposureGuard


class VertexClass(enum.IntEnum):
    GOOD = 0
    BAD = 1
    DANGEROUS = 2


@dataclass
class VertexClassification:
    """Classes at p'_- plus the counts they were decided from.

    h is the slack parameter: good needs h+2 visible arcs each way into every
    bin, bad needs total degree at least h+3. The paper's value is h = 4k.
    total[v] is -1 for good vertices, whose arcs stay unexposed.
    """

    cls: np.ndarray
    dplus: np.ndarray
    dminus: np.ndarray
    total: np.ndarray
    h: int

    @property
    def n(self) -> int:
        return len(self.cls)

    @property
    def good(self) -> np.ndarray:
        return self.cls == VertexClass.GOOD

    def non_good(self) -> list:
        return np.flatnonzero(self.cls != VertexClass.GOOD).tolist()

    def dangerous(self) -> list:
        return np.flatnonzero(self.cls == VertexClass.DANGEROUS).tolist()

    def counts(self) -> dict:
        c = np.bincount(self.cls, minlength=3)
        return {"good": int(c[0]), "bad": int(c[1]), "dangerous": int(c[2])}

    def is_good(self, v: int) -> bool:
        return self.cls[v] == VertexClass.GOOD


def classify_vertices(guard: ExposureGuard, bins: BinAssignment, h: int | None = None) -> VertexClassification:
    """Read the visible per-bin counts, then expose every non-good vertex."""
    k = bins.k
    h = 4 * k if h is None else int(h)
    if h < 0:
        raise ValueError("h must be nonnegative")
    dplus, dminus = guard.visible_counts(bins.bin_of, k)
    g = h + 2
    good = (dplus >= g).all(axis=1) & (dminus >= g).all(axis=1)
    cls = np.full(guard.n, VertexClass.GOOD, dtype=np.int64)
    total = np.full(guard.n, -1, dtype=np.int64)
    for v in np.flatnonzero(~good).tolist():
        total[v] = len(guard.expose(v))
        cls[v] = VertexClass.BAD if total[v] >= h + 3 else VertexClass.DANGEROUS
    return VertexClassification(cls, dplus, dminus, total, h)
