"""Orientation patterns for oriented Hamilton cycles.

A pattern of length k is a k-tuple of arrow directions. A cycle v_1 ... v_n
follows the pattern when the edge v_i v_{i+1} is oriented as entry i mod k.
Two patterns are equivalent when one maps to the other by a cyclic rotation
and/or a reflection (reverse the order and flip every arrow).
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BadGlyph, EmptyPattern, PatternTooLong

MAX_PATTERN_LENGTH = 64


class Arrow(enum.IntEnum):
    # integer order gives Forward < Backward for the lexicographic canonical form
    FORWARD = 0
    BACKWARD = 1

    @property
    def glyph(self) -> str:
        return ">" if self is Arrow.FORWARD else "<"

    def flipped(self) -> "Arrow":
        return Arrow.BACKWARD if self is Arrow.FORWARD else Arrow.FORWARD


F = Arrow.FORWARD
B = Arrow.BACKWARD

_GLYPHS = {">": F, "<": B}


class PatternClass(enum.Enum):
    TRIVIAL = "trivial"
    ALTERNATING = "alternating"
    NON_ALTERNATING = "non-alternating"
    NON_PRIMITIVE = "non-primitive"


@dataclass(frozen=True)
class Pattern:
    dirs: tuple

    def __post_init__(self):
        dirs = tuple(Arrow(d) for d in self.dirs)
        if not dirs:
            raise EmptyPattern("pattern must have length >= 1")
        if len(dirs) > MAX_PATTERN_LENGTH:
            raise PatternTooLong(f"pattern length {len(dirs)} exceeds {MAX_PATTERN_LENGTH}")
        object.__setattr__(self, "dirs", dirs)

    @property
    def k(self) -> int:
        return len(self.dirs)

    def __len__(self):
        return len(self.dirs)

    def __getitem__(self, i):
        return self.dirs[i]

    def __iter__(self):
        return iter(self.dirs)

    def __str__(self):
        return "".join(d.glyph for d in self.dirs)

    def __repr__(self):
        return f"Pattern('{self}')"

    def rotated(self, t: int) -> "Pattern":
        t %= self.k
        return Pattern(self.dirs[t:] + self.dirs[:t])

    def reflected(self) -> "Pattern":
        return Pattern(tuple(d.flipped() for d in reversed(self.dirs)))

    def reversed_arcs(self) -> "Pattern":
        """Pattern seen after reversing every arc of the digraph."""
        return Pattern(tuple(d.flipped() for d in self.dirs))

    def repeated(self, times: int) -> "Pattern":
        return Pattern(self.dirs * times)


def parse_pattern(text: str) -> Pattern:
    if not text:
        raise EmptyPattern("empty pattern text")
    dirs = []
    for i, ch in enumerate(text):
        if ch not in _GLYPHS:
            raise BadGlyph(i, ch)
        dirs.append(_GLYPHS[ch])
    return Pattern(tuple(dirs))


def as_pattern(p) -> Pattern:
    """Accept a Pattern, a glyph string or a sequence of arrows."""
    if isinstance(p, Pattern):
        return p
    if isinstance(p, str):
        return parse_pattern(p)
    return Pattern(tuple(p))


def orbit(p: Pattern) -> list:
    """All 2k rotations and reflected rotations (with repeats)."""
    r = p.reflected()
    return [p.rotated(t) for t in range(p.k)] + [r.rotated(t) for t in range(p.k)]


def canonical_form(p: Pattern) -> Pattern:
    """Lexicographically least member of the orbit (forward before backward)."""
    return _canonical(p.dirs)


@functools.lru_cache(maxsize=1 << 14)
def _canonical(dirs: tuple) -> Pattern:
    k = len(dirs)
    r = tuple(d.flipped() for d in reversed(dirs))
    best = min(min(dirs[t:] + dirs[:t] for t in range(k)), min(r[t:] + r[:t] for t in range(k)))
    return Pattern(best)


def is_primitive(p: Pattern) -> bool:
    k = p.k
    for d in range(1, k):
        if k % d == 0 and p.dirs == p.dirs[:d] * (k // d):
            return False
    return True


def primitive_root(p: Pattern) -> Pattern:
    """Shortest pattern whose repetition is p."""
    k = p.k
    for d in range(1, k + 1):
        if k % d == 0 and p.dirs == p.dirs[:d] * (k // d):
            return Pattern(p.dirs[:d])
    return p


def are_equivalent(p: Pattern, q: Pattern) -> bool:
    return p.k == q.k and canonical_form(p) == canonical_form(q)


def follows(orientations: Sequence, p: Pattern, offset: int = 0) -> bool:
    """True iff k | n and orientations[i] == p[(i + offset) mod k] for all i."""
    n = len(orientations)
    if n == 0 or n % p.k:
        return False
    k = p.k
    return all(Arrow(o) == p.dirs[(i + offset) % k] for i, o in enumerate(orientations))


def follows_some_rotation(orientations: Sequence, p: Pattern) -> bool:
    return any(follows(orientations, p, t) for t in range(p.k))


def classify(p: Pattern) -> PatternClass:
    if not is_primitive(p):
        return PatternClass.NON_PRIMITIVE
    if p.k == 1:
        return PatternClass.TRIVIAL
    if p.k == 2:
        return PatternClass.ALTERNATING
    return PatternClass.NON_ALTERNATING


def all_patterns(k: int) -> Iterable[Pattern]:
    for mask in range(1 << k):
        yield Pattern(tuple(Arrow((mask >> (k - 1 - i)) & 1) for i in range(k)))


ALTERNATING = Pattern((F, B))
ALTERNATING4 = Pattern((F, B, F, B))
