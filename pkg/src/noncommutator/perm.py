"""Permutations of {0, ..., n-1} stored as image tables.

Composition is left to right: ``p * q`` applies ``p`` first, then ``q``.
Points are 0-based internally and 1-based in cycle notation.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K

__all__ = [
    "Permutation",
    "CycleNotationError",
    "compose",
    "inverse",
    "commutator",
    "parse_cycles",
    "print_cycles",
    "cycle_type",
    "element_order",
]


class CycleNotationError(ValueError):
    """Malformed cycle notation."""


class Permutation:
    """An immutable permutation given by its image table."""

    __slots__ = ("_a", "_key", "_hash")

    def __init__(self, images: Iterable[int] | np.ndarray, *, _trusted: bool = False):
        a = np.array(images, dtype=np.int32).reshape(-1)
        if not _trusted:
            n = a.shape[0]
            if n == 0:
                raise ValueError("degree must be positive")
            seen = np.zeros(n, dtype=bool)
            if a.min() < 0 or a.max() >= n:
                raise ValueError("image out of range")
            seen[a] = True
            if not seen.all():
                raise ValueError("images do not form a bijection")
        a.flags.writeable = False
        self._a = a
        self._key = None
        self._hash = None

    @classmethod
    def _wrap(cls, a: np.ndarray) -> "Permutation":
        return cls(a, _trusted=True)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        if degree <= 0:
            raise ValueError("degree must be positive")
        return cls._wrap(np.arange(degree, dtype=np.int32))

    @property
    def degree(self) -> int:
        return self._a.shape[0]

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(int(i) for i in self._a)

    @property
    def array(self) -> np.ndarray:
        """Read-only int32 image table."""
        return self._a

    def key(self) -> bytes:
        if self._key is None:
            self._key = self._a.tobytes()
        return self._key

    def __call__(self, point: int) -> int:
        return int(self._a[point])

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return inverse(self) ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def is_identity(self) -> bool:
        return bool(K.is_identity(self._a))

    def conjugate(self, x: "Permutation") -> "Permutation":
        """x^-1 * self * x."""
        return inverse(x) * self * x

    def __repr__(self):
        return f"Permutation({print_cycles(self)!r}, degree={self.degree})"

    def __str__(self):
        return print_cycles(self)


def _check_degrees(p: Permutation, q: Permutation) -> None:
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} != {q.degree}")


def compose(p: Permutation, q: Permutation) -> Permutation:
    """p then q: the result sends i to q(p(i))."""
    _check_degrees(p, q)
    return Permutation._wrap(K.compose(p.array, q.array))


def inverse(p: Permutation) -> Permutation:
    return Permutation._wrap(K.invert(p.array))


def commutator(a: Permutation, b: Permutation) -> Permutation:
    """a^-1 b^-1 a b."""
    _check_degrees(a, b)
    return Permutation._wrap(K.commutator(a.array, b.array))


_TOKEN = re.compile(r"\s*(?:(\()|(\))|(,)|(\d+)|(\S))")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse 1-based disjoint cycle notation such as ``"(1,2)(43,44)"``.

    Empty text and ``"()"`` give the identity.  Each point may appear at most
    once in the whole expression.
    """
    if degree <= 0:
        raise CycleNotationError("degree must be positive")
    images = list(range(degree))
    seen: set[int] = set()
    stripped = text.strip()
    if re.fullmatch(r"(\(\s*\)\s*)?", stripped):
        return Permutation.identity(degree)
    pos = 0
    cycle: list[int] | None = None
    expect_point = False
    for m in _TOKEN.finditer(stripped):
        if m.start() != pos:
            raise CycleNotationError(f"unexpected text at offset {pos}")
        pos = m.end()
        lpar, rpar, comma, num, junk = m.groups()
        if junk is not None:
            raise CycleNotationError(f"unexpected character {junk!r}")
        if lpar:
            if cycle is not None:
                raise CycleNotationError("nested parenthesis")
            cycle = []
            expect_point = True
        elif num is not None:
            if cycle is None or not expect_point:
                raise CycleNotationError(f"misplaced point {num}")
            point = int(num)
            if not 1 <= point <= degree:
                raise CycleNotationError(f"point {point} out of range 1..{degree}")
            if point in seen:
                raise CycleNotationError(f"point {point} repeated")
            seen.add(point)
            cycle.append(point - 1)
            expect_point = False
        elif comma:
            if cycle is None or expect_point:
                raise CycleNotationError("misplaced comma")
            expect_point = True
        else:
            if cycle is None or expect_point:
                raise CycleNotationError("misplaced closing parenthesis")
            if len(cycle) < 2:
                raise CycleNotationError("a cycle needs at least two points")
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a] = b
            cycle = None
    if pos != len(stripped):
        raise CycleNotationError(f"unexpected text at offset {pos}")
    if cycle is not None:
        raise CycleNotationError("unclosed parenthesis")
    return Permutation(images)


def cycles(p: Permutation) -> list[list[int]]:
    """Nontrivial cycles (0-based), each from its least point, sorted."""
    a = p.array
    seen = np.zeros(p.degree, dtype=bool)
    out = []
    for i in range(p.degree):
        if seen[i] or a[i] == i:
            continue
        cyc = [i]
        seen[i] = True
        j = int(a[i])
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = int(a[j])
        out.append(cyc)
    return out


def print_cycles(p: Permutation) -> str:
    cs = cycles(p)
    if not cs:
        return "()"
    return "".join("(" + ",".join(str(i + 1) for i in c) + ")" for c in cs)


def cycle_type(p: Permutation) -> tuple[int, ...]:
    """Cycle lengths including fixed points, in decreasing order."""
    lengths = K.cycle_lengths(p.array)
    counts = Counter(int(x) for x in lengths)
    out: list[int] = []
    for length in sorted(counts, reverse=True):
        out.extend([length] * (counts[length] // length))
    return tuple(out)


def element_order(p: Permutation) -> int:
    return math.lcm(*cycle_type(p))


def from_cycles(cycle_list: Sequence[Sequence[int]], degree: int) -> Permutation:
    """Build from 0-based cycles."""
    images = list(range(degree))
    for c in cycle_list:
        for a, b in zip(c, list(c[1:]) + [c[0]]):
            images[a] = b
    return Permutation(images)
