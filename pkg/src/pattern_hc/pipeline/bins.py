"""Equitable bin assignment and the pattern the construction runs on."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DivisibilityError
from ..pattern import ALTERNATING4, Pattern, PatternClass, as_pattern, classify


def effective_pattern(p) -> Pattern:
    """Pattern used for binning: the alternating one is run as (>,<,>,<)."""
    p = as_pattern(p)
    c = classify(p)
    if c is PatternClass.ALTERNATING:
        return ALTERNATING4
    if c is PatternClass.NON_ALTERNATING:
        return p
    raise ValueError(f"the construction needs an alternating or non-alternating pattern, got {c.value}")


def bin_sizes(n: int, p) -> tuple:
    p = as_pattern(p)
    if classify(p) is PatternClass.ALTERNATING:
        if n % 2:
            raise DivisibilityError(f"alternating cycles need even n, got {n}")
        q, r = divmod(n, 4)
        return (q + (r > 0), q + (r > 0), q, q)
    k = effective_pattern(p).k
    if n % k:
        raise DivisibilityError(f"{k} does not divide n={n}")
    return (n // k,) * k


@dataclass
class BinAssignment:
    """Vertex -> bin (0-based) with a log of swaps."""

    k: int
    bin_of: np.ndarray
    swaps: list = field(default_factory=list)   # (vertex, old bin, new bin)

    @property
    def n(self) -> int:
        return len(self.bin_of)

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.bin_of == i)

    @property
    def sizes(self) -> tuple:
        return tuple(int(c) for c in np.bincount(self.bin_of, minlength=self.k))

    def swap(self, u: int, w: int):
        bu, bw = int(self.bin_of[u]), int(self.bin_of[w])
        if bu == bw:
            return
        self.bin_of[u], self.bin_of[w] = bw, bu
        self.swaps.append((int(u), bu, bw))
        self.swaps.append((int(w), bw, bu))

    def copy(self) -> "BinAssignment":
        return BinAssignment(self.k, self.bin_of.copy(), list(self.swaps))


def assign_bins(n: int, p, order: Sequence[int] | None = None) -> BinAssignment:
    """Fill bins 0..k-1 in turn with consecutive vertices of `order` (default 0..n-1)."""
    sizes = bin_sizes(n, p)
    order = np.arange(n) if order is None else np.asarray(order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError("order must be a permutation of range(n)")
    bin_of = np.empty(n, dtype=np.int64)
    lo = 0
    for i, s in enumerate(sizes):
        bin_of[order[lo:lo + s]] = i
        lo += s
    return BinAssignment(len(sizes), bin_of)
