"""Group constructors and group-level invariants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .backtrack import SearchBudget, centralizer
from .bsgs import PermGroup, build_chain
from .perm import Permutation, commutator, from_cycles

__all__ = [
    "BlockSystem",
    "InvalidBlockSystem",
    "CentralQuotientGroup",
    "wreath_imprimitive",
    "block_action",
    "consecutive_blocks",
    "normal_closure",
    "derived_subgroup",
    "center",
    "is_perfect",
    "direct_product",
    "central_quotient",
]


class InvalidBlockSystem(ValueError):
    """A generator does not permute the blocks."""


@dataclass(frozen=True)
class BlockSystem:
    degree: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        sizes = {len(b) for b in self.blocks}
        points = sorted(p for b in self.blocks for p in b)
        if len(sizes) != 1 or points != list(range(self.degree)):
            raise InvalidBlockSystem("blocks must be equal-sized and partition the points")

    def block_index(self) -> np.ndarray:
        idx = np.empty(self.degree, dtype=np.int64)
        for i, b in enumerate(self.blocks):
            idx[list(b)] = i
        return idx


def consecutive_blocks(degree: int, size: int) -> BlockSystem:
    if degree % size:
        raise InvalidBlockSystem(f"block size {size} does not divide degree {degree}")
    return BlockSystem(degree, tuple(tuple(range(i, i + size)) for i in range(0, degree, size)))


def wreath_imprimitive(base_order: int, top: PermGroup) -> tuple[PermGroup, BlockSystem]:
    """C_{base_order} wr top in its imprimitive action on base_order * n points.

    Block i is {b*i, ..., b*i + b - 1}.  Generators: a b-cycle on block 0
    and, for each generator of ``top``, the rigid lift moving block i onto
    block top(i).
    """
    if base_order < 2:
        raise ValueError("base order must be at least 2")
    b, n = base_order, top.degree
    degree = b * n
    gens = [from_cycles([list(range(b))], degree)]
    for s in top.generators:
        if s.is_identity():
            continue
        a = s.array
        gens.append(Permutation([b * int(a[p // b]) + p % b for p in range(degree)]))
    return PermGroup(gens, degree), consecutive_blocks(degree, b)


def block_action(g: PermGroup, blocks: BlockSystem) -> PermGroup:
    """The permutation group induced on block indices."""
    if blocks.degree != g.degree:
        raise InvalidBlockSystem("block system degree differs from group degree")
    where = blocks.block_index()
    m = len(blocks.blocks)
    images = []
    for s in g.generators:
        a = s.array
        img = []
        for i, blk in enumerate(blocks.blocks):
            targets = {int(where[a[p]]) for p in blk}
            if len(targets) != 1:
                raise InvalidBlockSystem(f"generator {s} splits block {i}")
            img.append(targets.pop())
        p = Permutation(img)
        if not p.is_identity():
            images.append(p)
    return PermGroup(images or [Permutation.identity(m)], m)


def normal_closure(g: PermGroup, seed: Iterable[Permutation], rng_seed: int | None = None) -> PermGroup:
    """Smallest normal subgroup of ``g`` containing ``seed``.

    Conjugates of the current generators by the generators of ``g`` are
    added until every such conjugate already lies in the subgroup.
    """
    chain = g.chain
    gens = []
    for s in seed:
        if not chain.contains(s):
            raise ValueError(f"seed element {s} is not in the group")
        if not s.is_identity():
            gens.append(s)
    if not gens:
        trivial = PermGroup([], g.degree)
        return trivial
    sub = build_chain(PermGroup(gens), rng_seed)
    queue = list(gens)
    while queue:
        x = queue.pop()
        for s in g.generators:
            y = x.conjugate(s)
            if not sub.contains(y):
                gens.append(y)
                queue.append(y)
                sub = build_chain(PermGroup(gens), rng_seed)
    return PermGroup(gens, g.degree, chain=sub)


def derived_subgroup(g: PermGroup) -> PermGroup:
    """[G, G] as the normal closure of all generator commutators."""
    gens = g.generators
    seed = [commutator(a, b) for a in gens for b in gens if a is not b]
    return normal_closure(g, seed)


def center(g: PermGroup, budget: SearchBudget | None = None) -> PermGroup:
    """Z(G) as C(g_1) ∩ C(g_2) ∩ ..., each centralizer taken in the last."""
    z = g
    for s in g.generators:
        if z.order() == 1:
            break
        z = centralizer(z.chain, s, budget)
    return z


def is_perfect(g: PermGroup) -> bool:
    return derived_subgroup(g).order() == g.order()


def direct_product(a: PermGroup, b: PermGroup) -> PermGroup:
    """A × B on the disjoint union of the two point sets (A's points first)."""
    n, m = a.degree, b.degree
    gens = []
    for s in a.generators:
        if not s.is_identity():
            gens.append(Permutation(list(s.images) + list(range(n, n + m))))
    for s in b.generators:
        if not s.is_identity():
            gens.append(Permutation(list(range(n)) + [n + i for i in s.images]))
    return PermGroup(gens, n + m)


def pair(x: Permutation, y: Permutation) -> Permutation:
    """The element (x, y) of a direct product of two degree-n groups."""
    n = x.degree
    return Permutation(np.concatenate([x.array, y.array + n]))


def split(p: Permutation, n: int) -> tuple[Permutation, Permutation]:
    a = p.array
    return Permutation._wrap(a[:n].copy()), Permutation._wrap((a[n:] - n).astype(np.int32))


class CentralQuotientGroup:
    """(G × G)/T with T = <(t, t)> for a central involution t of G.

    Elements are degree-2n permutations (pairs) reduced to a canonical
    representative: of (x, y) and (xt, yt), the one whose first coordinate
    has the lexicographically smaller image table, ties broken on the second.
    """

    def __init__(self, factor: PermGroup, t: Permutation):
        self.factor = factor
        self.t = t
        self.n = factor.degree
        self.base = direct_product(factor, factor)
        self.tt = pair(t, t)

    @property
    def order(self) -> int:
        return self.factor.order() ** 2 // 2

    def canonical(self, p: Permutation) -> Permutation:
        q = p * self.tt
        return q if (q.images < p.images) else p

    def element(self, x: Permutation, y: Permutation) -> Permutation:
        return self.canonical(pair(x, y))

    def multiply(self, p: Permutation, q: Permutation) -> Permutation:
        return self.canonical(p * q)

    def inverse(self, p: Permutation) -> Permutation:
        return self.canonical(~p)

    def commutator(self, p: Permutation, q: Permutation) -> Permutation:
        return self.canonical(commutator(p, q))

    def equal(self, p: Permutation, q: Permutation) -> bool:
        return self.canonical(p) == self.canonical(q)

    def contains(self, p: Permutation) -> bool:
        return p.degree == 2 * self.n and self.base.chain.contains(p)

    def designated(self) -> Permutation:
        """(t, 1)T, which is not a commutator of K when t is the only noncommutator of G."""
        return self.element(self.t, Permutation.identity(self.n))

    def components(self, p: Permutation) -> tuple[Permutation, Permutation]:
        return split(p, self.n)


def central_quotient(g: PermGroup, t: Permutation) -> CentralQuotientGroup:
    if t.degree != g.degree:
        raise ValueError("degree mismatch")
    if t.is_identity() or not (t * t).is_identity():
        raise ValueError("t must be an involution")
    if not g.chain.contains(t) or any(s * t != t * s for s in g.generators):
        raise ValueError("t must be a central element of the group")
    return CentralQuotientGroup(g, t)
