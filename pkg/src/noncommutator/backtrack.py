"""Backtrack search over a stabilizer chain: centralizers and conjugacy.

Both searches walk the tree of base images of a chain whose base follows
the cycles of the element being examined, so fixing the image of one point
of a cycle forces the images of the rest of that cycle.
"""

from __future__ import annotations

import time
import zlib
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .bsgs import PermGroup, StabilizerChain, chain_from_levels, chain_with_base, make_rng
from .perm import Permutation, cycle_type

__all__ = [
    "SearchBudget",
    "BudgetExhausted",
    "centralizer",
    "conjugating_element",
    "adapted_base",
]

_CHUNK = 200_000


@dataclass(frozen=True)
class SearchBudget:
    """Limits on one search; ``None`` means unlimited."""

    nodes: int | None = None
    seconds: float | None = None


UNLIMITED = SearchBudget()


class BudgetExhausted(RuntimeError):
    """A search hit its node or time limit before reaching an answer."""


class _Meter:
    def __init__(self, budget: SearchBudget | None):
        self.budget = budget or UNLIMITED
        self.nodes = 0
        self.t0 = time.monotonic()

    def chunk(self) -> int:
        if self.budget.nodes is None:
            return _CHUNK
        left = self.budget.nodes - self.nodes
        if left <= 0:
            raise BudgetExhausted(f"node budget of {self.budget.nodes} exhausted")
        return min(_CHUNK, left)

    def charge(self, nodes: int):
        self.nodes += nodes
        if self.budget.seconds is not None and time.monotonic() - self.t0 > self.budget.seconds:
            raise BudgetExhausted(f"time budget of {self.budget.seconds}s exhausted")


def adapted_base(g: Permutation, h: Permutation | None = None) -> list[int]:
    """All points, grouped cycle by cycle along ``g``.

    Cycles whose length has the fewest candidate images in ``h`` come
    first (longer cycles break ties); fixed points come last.
    """
    h = g if h is None else h
    a = g.array
    hl = Counter(int(x) for x in K.cycle_lengths(h.array))
    seen = np.zeros(g.degree, dtype=bool)
    cycs = []
    for i in range(g.degree):
        if seen[i]:
            continue
        c = [i]
        seen[i] = True
        j = int(a[i])
        while j != i:
            c.append(j)
            seen[j] = True
            j = int(a[j])
        cycs.append(c)
    cycs.sort(key=lambda c: (len(c) == 1, hl[len(c)], -len(c), c[0]))
    return [p for c in cycs for p in c]


def _anchors(g: Permutation, base: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """For each level: an earlier level on the same g-cycle and the g-power
    that carries its point to this level's point (or -1)."""
    k = len(base)
    anchor = np.full(k, -1, dtype=np.int64)
    shift = np.zeros(k, dtype=np.int64)
    level_of = {p: i for i, p in enumerate(base)}
    a = g.array
    for d, p in enumerate(base):
        q = int(a[p])
        steps = 1
        # walk backwards: find the earliest level on this cycle
        best = None
        while q != p:
            e = level_of.get(q)
            if e is not None and e < d and (best is None or e < best[0]):
                best = (e, steps)
            q = int(a[q])
            steps += 1
        if best is not None:
            e, s = best
            # base[e] = g^s(p)  =>  p = g^(len - s)(base[e])
            length = steps
            anchor[d] = e
            shift[d] = (length - s) % length
    return anchor, shift


def _base_changed(chain: StabilizerChain, base: Sequence[int]) -> StabilizerChain:
    cache = chain.__dict__.setdefault("_rebased", {})
    key = tuple(base)
    c = cache.get(key)
    if c is None:
        if tuple(chain.base[: len(base)]) == key:
            c = chain
        else:
            # seeded by the base itself so rebased chains never depend on call order
            c = chain_with_base(chain, base, make_rng(zlib.crc32(np.asarray(key, dtype=np.int32).tobytes())))
        if len(cache) > 256:
            cache.clear()
        cache[key] = c
    return c


class _Search:
    """Reusable state for searches of one (chain, g, h) triple."""

    def __init__(self, chain: StabilizerChain, g: Permutation, h: Permutation,
                 base: Sequence[int]):
        self.chain = chain
        self.g = g
        self.h = h
        k = len(chain.base_array)
        n = chain.degree
        self.k = k
        self.n = n
        self.anchor, self.shift = _anchors(g, chain.base)
        self.cyc_g = K.cycle_lengths(g.array)
        self.cyc_h = K.cycle_lengths(h.array)
        self.cand = np.zeros((k + 1, n), dtype=np.int32)
        self.ncand = np.zeros(k + 1, dtype=np.int32)
        self.idx = np.zeros(k + 1, dtype=np.int32)
        self.w = np.zeros((k + 1, n), dtype=np.int32)
        self.img = np.zeros(k + 1, dtype=np.int32)
        self.out = np.zeros(n, dtype=np.int32)

    def run(self, prune: np.ndarray, start: int, first_choice: int,
            meter: _Meter) -> np.ndarray | None:
        c = self.chain
        if prune.shape[0] == 0:
            prune = np.zeros((0, self.n), dtype=np.int32)
        active = np.zeros((self.k + 1, prune.shape[0]), dtype=np.bool_)
        state = np.zeros(3, dtype=np.int64)
        while True:
            before = int(state[2])
            status = K.backtrack_search(
                c.base_array, c.trans, c.inorb, c.orbit, c.orblen,
                self.g.array, self.h.array, self.cyc_g, self.cyc_h,
                self.anchor, self.shift, prune, start, first_choice, state,
                self.cand, self.ncand, self.idx, self.w, self.img, active,
                meter.chunk(), self.out)
            meter.charge(int(state[2]) - before)
            if status == K.STATUS_FOUND:
                return self.out.copy()
            if status == K.STATUS_EXHAUSTED:
                return None


def _stack(elements: Iterable[np.ndarray], n: int) -> np.ndarray:
    rows = [np.asarray(e, dtype=np.int32).reshape(1, n) for e in elements]
    if not rows:
        return np.zeros((0, n), dtype=np.int32)
    return np.vstack(rows)


def centralizer(chain: StabilizerChain, g: Permutation, budget: SearchBudget | None = None,
                known: Sequence[Permutation] = ()) -> PermGroup:
    """Centralizer of ``g`` in the group of ``chain``, with an exact chain.

    ``g`` need not lie in the group.  ``known`` may list elements already
    known to lie in the centralizer; they only speed the search up.
    Levels are completed bottom-up (Sims' method): at each level the orbit
    of the base point under the centralizer found so far is extended by
    searching for an element that maps the base point to each point outside
    it, one point per orbit of what is already known.
    """
    if g.degree != chain.degree:
        raise ValueError(f"degree mismatch: {g.degree} != {chain.degree}")
    n = chain.degree
    meter = _Meter(budget)
    if chain.order == 1:
        return chain.group()
    base = adapted_base(g)
    c = _base_changed(chain, base)
    search = _Search(c, g, g, base)
    ident = np.arange(n, dtype=np.int32)
    found: list[np.ndarray] = []
    seeds = list(known)
    if chain.contains(g):
        seeds.append(g)
    for s in seeds:
        a = s.array
        if not np.array_equal(a, ident) and np.array_equal(a[g.array], g.array[a]) and chain.contains(s):
            found.append(a.copy())
    cbase = c.base_array
    k = len(cbase)
    cyc = search.cyc_g
    for i in range(k - 1, -1, -1):
        if c.orblen[i] == 1 or search.anchor[i] >= 0:
            continue
        beta = int(cbase[i])
        fixed = cbase[:i]

        def level_gens():
            rows = [f for f in found if np.array_equal(f[fixed], fixed)]
            return _stack(rows, n)

        gens_i = level_gens()
        rep = K.orbit_partition(gens_i, n)
        failed = set()
        for delta in c.orbit[i, : c.orblen[i]]:
            delta = int(delta)
            if cyc[delta] != cyc[beta] or rep[delta] == rep[beta] or rep[delta] in failed:
                continue
            x = search.run(_stack(found, n), i, delta, meter)
            if x is None:
                failed.add(int(rep[delta]))
            else:
                found.append(x)
                gens_i = level_gens()
                rep = K.orbit_partition(gens_i, n)
                failed = {int(rep[f]) for f in failed}
    cc = chain_from_levels(n, c.base, found)
    return PermGroup(cc.strong_generators or (Permutation.identity(n),), n, chain=cc)


def conjugating_element(chain: StabilizerChain, g: Permutation, h: Permutation,
                        budget: SearchBudget | None = None,
                        h_centralizer: StabilizerChain | None = None,
                        g_centralizer_order: int | None = None,
                        h_centralizer_order: int | None = None) -> Permutation | None:
    """Some x in the group with x^-1 g x == h, or None if there is none.

    Cheap invariants are compared first (cycle type, then centralizer
    orders when both are supplied).  ``h_centralizer`` (a chain of the
    centralizer of ``h``) prunes the search; without it only ``h`` itself
    is used.
    """
    if g.degree != h.degree or g.degree != chain.degree:
        raise ValueError("degree mismatch")
    if cycle_type(g) != cycle_type(h):
        return None
    if g_centralizer_order is not None and h_centralizer_order is not None \
            and g_centralizer_order != h_centralizer_order:
        return None
    if g == h:
        return Permutation.identity(g.degree)
    n = chain.degree
    if chain.order == 1:
        return None
    base = adapted_base(g, h)
    c = _base_changed(chain, base)
    search = _Search(c, g, h, base)
    if h_centralizer is not None:
        prune = h_centralizer.strong_array
    else:
        prune = _stack([h.array] if chain.contains(h) else [], n)
    x = search.run(np.ascontiguousarray(prune, dtype=np.int32), 0, -1, _Meter(budget))
    if x is None:
        return None
    xp = Permutation._wrap(x)
    if not (h == g.conjugate(xp) and chain.contains(xp)):  # pragma: no cover - soundness guard
        raise AssertionError("backtrack returned a non-conjugating element")
    return xp
