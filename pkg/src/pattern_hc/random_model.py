"""Random digraph models: D(n,p), D(n,m) and the coupled in/out process.

D(n,p) is the union of two independent rounds D_in(n,p') and D_out(n,p')
with 2p' - p'^2 = p. The process version gives every ordered pair (v, w)
two uniform stamps X_in, X_out; the pair is an arc at p'-time t once
min(X_in, X_out) <= t. Stamps come from a counter-based hash of
(seed, pair, label) so a trace never stores all 2n(n-1) of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .digraph import BOTH, IN, OUT, DegreeVariant, LabeledDigraph
from .errors import DomainError, IndexOutOfRange, InvalidProbability

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_CHUNK = 1 << 22


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; uint64 arithmetic wraps
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash_uniform(key: tuple, counters: np.ndarray) -> np.ndarray:
    """Uniforms in (0, 1) from a 128-bit key and uint64 counters."""
    k0 = np.asarray(key[0], dtype=np.uint64)   # arrays of keys broadcast against counters
    k1 = np.asarray(key[1], dtype=np.uint64)
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _mix64(c * _GOLDEN + k0)
        z = _mix64(z ^ k1)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def sprinkle_probability(p: float) -> float:
    """p' with 2p' - p'^2 = p, i.e. 1 - sqrt(1 - p), in a cancellation-free form."""
    _check_probability(p)
    return p / (1.0 + math.sqrt(1.0 - p))


def _check_probability(p):
    if not (isinstance(p, (int, float, np.floating)) and 0.0 <= p <= 1.0):
        raise InvalidProbability(f"probability must lie in [0, 1], got {p!r}")


def num_pairs(n: int) -> int:
    return n * (n - 1)


def decode_pairs(n: int, q: np.ndarray) -> tuple:
    """Pair index q -> (tail, head); q = tail*(n-1) + r and head = r + (r >= tail)."""
    q = np.asarray(q, dtype=np.int64)
    tail = q // (n - 1)
    r = q - tail * (n - 1)
    head = r + (r >= tail)
    return tail, head


def encode_pairs(n: int, tail, head) -> np.ndarray:
    tail = np.asarray(tail, dtype=np.int64)
    head = np.asarray(head, dtype=np.int64)
    return tail * (n - 1) + head - (head > tail)


# direct samplers

def _round_indices(n, pp, rng):
    N = num_pairs(n)
    count = int(rng.binomial(N, pp))
    return rng.choice(N, size=count, replace=False)


def sample_dnp(n: int, p: float, rng: np.random.Generator) -> LabeledDigraph:
    """D(n,p) as the labeled union of two independent p'-rounds."""
    if n < 2:
        raise DomainError("n must be >= 2")
    pp = sprinkle_probability(p)
    q_in = _round_indices(n, pp, rng)
    q_out = _round_indices(n, pp, rng)
    arcs = {}
    for q, lab in ((q_in, IN), (q_out, OUT)):
        t, h = decode_pairs(n, q)
        for a, b in zip(t.tolist(), h.tolist()):
            arcs[(a, b)] = arcs.get((a, b), 0) | lab
    return LabeledDigraph(n, arcs)


def sample_dnp_degrees(n: int, p: float, rng: np.random.Generator) -> tuple:
    """(in-degrees, out-degrees) of the merged D(n,p) without building the digraph."""
    pp = sprinkle_probability(p)
    q = np.union1d(_round_indices(n, pp, rng), _round_indices(n, pp, rng))
    t, h = decode_pairs(n, q)
    return np.bincount(h, minlength=n), np.bincount(t, minlength=n)


def sample_dnm(n: int, m: int, rng: np.random.Generator) -> LabeledDigraph:
    """Uniform m-subset of the ordered pairs. Each arc gets the label of a fair coin."""
    N = num_pairs(n)
    if not 0 <= m <= N:
        raise IndexOutOfRange(f"m must lie in [0, {N}]")
    q = rng.choice(N, size=m, replace=False)
    t, h = decode_pairs(n, q)
    labs = np.where(rng.random(m) < 0.5, IN, OUT)
    return LabeledDigraph.from_arrays(n, t, h, labs)


# the process

@dataclass
class _Arrivals:
    horizon: float
    tail: np.ndarray
    head: np.ndarray
    x_in: np.ndarray
    x_out: np.ndarray

    @property
    def time(self):
        return np.minimum(self.x_in, self.x_out)


@dataclass
class ProcessTrace:
    """Arrival schedule of the coupled in/out process on n vertices.

    All times on this object are on the p'-clock of a single round; the
    D(n,p) time of p'-time t is 2t - t^2.
    """

    n: int
    key: tuple
    _cache: _Arrivals | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n must be >= 2")
        self.key = (int(self.key[0]) & (2**64 - 1), int(self.key[1]) & (2**64 - 1))

    @property
    def num_pairs(self) -> int:
        return num_pairs(self.n)

    def stamps(self, tail, head) -> tuple:
        """(X_in, X_out) for the given ordered pairs."""
        q = encode_pairs(self.n, tail, head).astype(np.uint64)
        return hash_uniform(self.key, 2 * q), hash_uniform(self.key, 2 * q + np.uint64(1))

    def _scan(self, horizon: float) -> _Arrivals:
        N = self.num_pairs
        parts = []
        for lo in range(0, N, _CHUNK):
            q = np.arange(lo, min(N, lo + _CHUNK), dtype=np.uint64)
            xi = hash_uniform(self.key, 2 * q)
            xo = hash_uniform(self.key, 2 * q + np.uint64(1))
            keep = np.minimum(xi, xo) <= horizon
            parts.append((q[keep].astype(np.int64), xi[keep], xo[keep]))
        q = np.concatenate([a for a, _, _ in parts])
        xi = np.concatenate([b for _, b, _ in parts])
        xo = np.concatenate([c for _, _, c in parts])
        t, h = decode_pairs(self.n, q)
        arrival = np.minimum(xi, xo)
        lab = np.where(xi <= xo, 0, 1)   # label of arrival: in before out on ties
        order = np.lexsort((lab, h, t, arrival))
        return _Arrivals(horizon, t[order], h[order], xi[order], xo[order])

    def _ensure_horizon(self, horizon: float) -> _Arrivals:
        horizon = min(1.0, horizon)
        if self._cache is None or self._cache.horizon < horizon:
            self._cache = self._scan(horizon)
        return self._cache

    def _ensure_count(self, m: int) -> _Arrivals:
        N = self.num_pairs
        if not 0 <= m <= N:
            raise IndexOutOfRange(f"m must lie in [0, {N}], got {m}")
        c = self._cache
        if c is not None and (len(c.tail) >= m or c.horizon >= 1.0):
            return c
        frac = min(1.0, m / N * (1.0 + 8.0 / math.sqrt(max(m, 1))) + 1.0 / N)
        h = 1.0 - math.sqrt(1.0 - frac)
        while True:
            c = self._ensure_horizon(h)
            if len(c.tail) >= m or c.horizon >= 1.0:
                return c
            h = min(1.0, 2.0 * h)

    def arrivals(self, m: int) -> tuple:
        """(tail, head, arrival time) of the first m distinct arcs."""
        c = self._ensure_count(m)
        return c.tail[:m], c.head[:m], c.time[:m]

    def arrival_time(self, m: int) -> float:
        """p'-time of the m-th arc (m >= 1)."""
        if m < 1:
            raise IndexOutOfRange("m must be >= 1")
        return float(self.arrivals(m)[2][m - 1])

    def p_of_count(self, m: int) -> float:
        t = self.arrival_time(m)
        return 2 * t - t * t

    def count_at(self, p: float) -> int:
        t = sprinkle_probability(p)
        c = self._ensure_horizon(t)
        return int(np.searchsorted(c.time, t, side="right"))

    def _digraph(self, c: _Arrivals, m: int, t: float) -> LabeledDigraph:
        lab = np.where(c.x_in[:m] <= t, IN, 0) | np.where(c.x_out[:m] <= t, OUT, 0)
        return LabeledDigraph.from_arrays(self.n, c.tail[:m], c.head[:m], lab)

    def prefix(self, p: float | None = None, m: int | None = None) -> LabeledDigraph:
        """D(n,p) (labels at p') or the first m arcs (labels at the m-th arrival)."""
        if (p is None) == (m is None):
            raise ValueError("give exactly one of p or m")
        if p is not None:
            _check_probability(p)
            t = sprinkle_probability(p)
            c = self._ensure_horizon(t)
            m = int(np.searchsorted(c.time, t, side="right"))
            return self._digraph(c, m, t)
        c = self._ensure_count(m)
        if m == 0:
            return LabeledDigraph(self.n)
        return self._digraph(c, m, float(c.time[m - 1]))

    def visible_rounds(self, t: float) -> tuple:
        """Arcs of D_in(n,t) and D_out(n,t) as (tail, head) arrays."""
        c = self._ensure_horizon(t)
        m = int(np.searchsorted(c.time, t, side="right"))
        inn = c.x_in[:m] <= t
        out = c.x_out[:m] <= t
        return (c.tail[:m][inn], c.head[:m][inn]), (c.tail[:m][out], c.head[:m][out])


def sample_trace(n: int, rng: np.random.Generator) -> ProcessTrace:
    key = rng.integers(0, 2**64, size=2, dtype=np.uint64)
    return ProcessTrace(n, (int(key[0]), int(key[1])))


def prefix_digraph(trace: ProcessTrace, p: float | None = None, m: int | None = None) -> LabeledDigraph:
    return trace.prefix(p=p, m=m)


def hitting_index_of_order(n: int, tails, heads, variant: DegreeVariant):
    """Smallest m such that the first m arcs satisfy event A, or None."""
    ind = [0] * n
    outd = [0] * n
    alt = variant is DegreeVariant.ALTERNATING
    deficient = n
    for i, (a, b) in enumerate(zip(tails, heads)):
        for v, deg, other in ((a, outd, ind), (b, ind, outd)):
            before = (deg[v] >= 2 or other[v] >= 2) if alt else deg[v] + other[v] >= 2
            deg[v] += 1
            after = (deg[v] >= 2 or other[v] >= 2) if alt else deg[v] + other[v] >= 2
            if after and not before:
                deficient -= 1
        if deficient == 0:
            return i + 1
    return None


def hitting_index(trace: ProcessTrace, variant: DegreeVariant):
    """Arc count m_* at which event A first holds; None if it never does (n = 2, alternating)."""
    n = trace.n
    N = trace.num_pairs
    # guess slightly above the expected hitting count, double if short
    guess = min(N, max(2 * n, int(n * (math.log(n) + 2 * math.log(max(math.log(n), 1.0)) + 6) / 2) + 8))
    while True:
        t, h, _ = trace.arrivals(guess)
        m = hitting_index_of_order(n, t.tolist(), h.tolist(), variant)
        if m is not None or guess >= N:
            return m
        guess = min(N, 2 * guess)


# thresholds

def threshold_p(variant: DegreeVariant, n: int, c: float = 0.0) -> float:
    if n < 3:
        raise DomainError("threshold needs n >= 3 so that log log n > 0")
    ln = math.log(n)
    lln = math.log(ln)
    coef = 2.0 if variant is DegreeVariant.ALTERNATING else 1.0
    return min(1.0, max(0.0, (ln + coef * lln + c) / (2 * n)))


def omega(n: int) -> float:
    if n < 16:
        raise DomainError("p_plus_minus needs n >= 16 so that log log log n > 0")
    return math.log(math.log(math.log(n)))


def p_plus_minus(variant: DegreeVariant, n: int) -> tuple:
    w = omega(n)
    return threshold_p(variant, n, -w), threshold_p(variant, n, w)


def limit_probability_A(variant: DegreeVariant, c: float = 0.0) -> float:
    """Limiting P(A) at threshold_p(variant, n, c)."""
    lam = math.exp(-c) / 4 if variant is DegreeVariant.ALTERNATING else math.exp(-c)
    return math.exp(-lam)


def limit_mean_low_degree(variant: DegreeVariant, c: float = 0.0) -> float:
    """Limiting E[X] (alternating) or E[Y] (non-alternating)."""
    return math.exp(-c) / 4 if variant is DegreeVariant.ALTERNATING else math.exp(-c)
