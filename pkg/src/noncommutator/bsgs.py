"""Stabilizer chains: group order, membership and uniform random elements."""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels as K
from .perm import Permutation

__all__ = [
    "PermGroup",
    "StabilizerChain",
    "build_chain",
    "chain_with_base",
    "group_order",
    "contains",
    "uniform_random",
    "subgroup_of",
    "same_group",
    "make_rng",
]

DEFAULT_SEED = 20240917


def make_rng(seed: int | None = None) -> np.random.Generator:
    """The one way random streams are created in this package."""
    return np.random.Generator(np.random.PCG64(DEFAULT_SEED if seed is None else seed))


class PermGroup:
    """A permutation group given by generators of a common degree.

    The stabilizer chain is built on first use (seed ``DEFAULT_SEED``) and
    cached; constructors that already hold a verified chain attach it.
    """

    def __init__(self, generators: Iterable[Permutation], degree: int | None = None,
                 *, chain: "StabilizerChain | None" = None, name: str | None = None):
        gens = tuple(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree required for a group without generators")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise ValueError(f"generator of degree {g.degree} in a group of degree {degree}")
        if not gens:
            gens = (Permutation.identity(degree),)
        self.degree = degree
        self.generators = gens
        self.name = name
        self._chain = chain

    @property
    def chain(self) -> "StabilizerChain":
        if self._chain is None:
            self._chain = build_chain(self)
        return self._chain

    def order(self) -> int:
        return self.chain.order

    def __contains__(self, p: Permutation) -> bool:
        return self.chain.contains(p)

    def __repr__(self):
        label = self.name or "PermGroup"
        return f"<{label} degree={self.degree} gens={len(self.generators)}>"


class StabilizerChain:
    """Base, strong generators and explicit transversals of a group.

    Immutable once constructed.  ``verified`` records how correctness was
    established: ``"schreier"`` (every Schreier generator sifts) or
    ``"order"`` (orbit lengths multiply to an independently known order).
    """

    def __init__(self, degree: int, base: np.ndarray, strong: np.ndarray,
                 trans: np.ndarray, tinv: np.ndarray, inorb: np.ndarray,
                 orbit: np.ndarray, orblen: np.ndarray, verified: str):
        self.degree = degree
        self.base_array = base
        self.strong_array = strong
        self.trans = trans
        self.tinv = tinv
        self.inorb = inorb
        self.orbit = orbit
        self.orblen = orblen
        self.verified = verified
        for arr in (base, strong, trans, tinv, inorb, orbit, orblen):
            arr.flags.writeable = False
        self.order = math.prod(int(x) for x in orblen)

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(int(b) for b in self.base_array)

    @property
    def strong_generators(self) -> tuple[Permutation, ...]:
        return tuple(Permutation._wrap(row.copy()) for row in self.strong_array)

    @property
    def orbit_sizes(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.orblen)

    def fundamental_orbit(self, level: int) -> list[int]:
        return [int(x) for x in self.orbit[level, : self.orblen[level]]]

    def transversal_element(self, level: int, point: int) -> Permutation:
        if not self.inorb[level, point]:
            raise KeyError(f"{point} not in orbit of level {level}")
        return Permutation._wrap(self.trans[level, point].copy())

    def level_generators(self, level: int) -> np.ndarray:
        """Strong generators fixing the first ``level`` base points."""
        if level == 0 or self.strong_array.shape[0] == 0:
            return self.strong_array
        cols = self.base_array[:level]
        return self.strong_array[(self.strong_array[:, cols] == cols).all(axis=1)]

    def sift(self, p: Permutation) -> tuple[Permutation, int]:
        if p.degree != self.degree:
            raise ValueError(f"degree mismatch: {p.degree} != {self.degree}")
        r, stop = K.sift(p.array, 0, self.base_array, self.tinv, self.inorb)
        return Permutation._wrap(r), int(stop)

    def contains(self, p: Permutation) -> bool:
        r, stop = self.sift(p)
        return stop == len(self.base_array) and r.is_identity()

    def random_element(self, rng: np.random.Generator) -> Permutation:
        return Permutation._wrap(self.random_array(rng))

    def random_array(self, rng: np.random.Generator) -> np.ndarray:
        k = len(self.orblen)
        if k == 0:
            return np.arange(self.degree, dtype=np.int32)
        picks = rng.integers(0, self.orblen)
        choice = self.orbit[np.arange(k), picks]
        return K.element_from_choices(choice, self.trans)

    def group(self) -> PermGroup:
        gens = self.strong_generators or (Permutation.identity(self.degree),)
        return PermGroup(gens, self.degree, chain=self)


class _Builder:
    """Mutable chain under construction."""

    def __init__(self, degree: int, base: Sequence[int]):
        n = degree
        self.n = n
        self.base: list[int] = [int(b) for b in base]
        self.gens = np.empty((0, n), dtype=np.int32)
        cap = max(4, len(self.base))
        self.trans = np.zeros((cap, n, n), dtype=np.int32)
        self.tinv = np.zeros((cap, n, n), dtype=np.int32)
        self.inorb = np.zeros((cap, n), dtype=np.bool_)
        self.orbit = np.zeros((cap, n), dtype=np.int32)
        self.orblen = np.zeros(cap, dtype=np.int32)
        for lev in range(len(self.base)):
            self._recompute(lev)

    def _grow(self):
        cap = self.trans.shape[0] * 2
        n = self.n
        for name, shape, dt in (("trans", (cap, n, n), np.int32), ("tinv", (cap, n, n), np.int32),
                                ("inorb", (cap, n), np.bool_), ("orbit", (cap, n), np.int32),
                                ("orblen", (cap,), np.int32)):
            old = getattr(self, name)
            new = np.zeros(shape, dtype=dt)
            new[: old.shape[0]] = old
            setattr(self, name, new)

    def level_gens(self, lev: int) -> np.ndarray:
        if lev == 0 or self.gens.shape[0] == 0:
            return self.gens
        cols = np.asarray(self.base[:lev])
        return self.gens[(self.gens[:, cols] == cols).all(axis=1)]

    def _recompute(self, lev: int):
        orbit, length, trans, tinv, inorb = K.orbit_transversal(self.base[lev], self.level_gens(lev))
        self.trans[lev] = trans
        self.tinv[lev] = tinv
        self.inorb[lev] = inorb
        self.orbit[lev] = orbit
        self.orblen[lev] = length

    def views(self):
        k = len(self.base)
        return (np.asarray(self.base, dtype=np.int64), self.trans[:k], self.tinv[:k],
                self.inorb[:k], self.orbit[:k], self.orblen[:k])

    def sift(self, x: np.ndarray, start: int = 0):
        base, _, tinv, inorb, _, _ = self.views()
        return K.sift(x, start, base, tinv, inorb)

    def add_generator(self, h: np.ndarray, stop: int):
        """Add a residue that dropped out of the sift at level ``stop``."""
        if stop == len(self.base):
            moved = np.nonzero(h != np.arange(self.n))[0]
            fresh = [int(p) for p in moved if int(p) not in self.base]
            self.base.append(fresh[0])
            if len(self.base) > self.trans.shape[0]:
                self._grow()
        h = h.astype(np.int32)
        self.gens = np.vstack([self.gens, h.reshape(1, -1)])
        for lev in range(stop + 1):
            # transversal elements stay valid while the orbit does not grow
            if self.orblen[lev] == 0 or not K.orbit_closed(h, self.orbit[lev], self.orblen[lev], self.inorb[lev]):
                self._recompute(lev)

    def order(self) -> int:
        return math.prod(int(x) for x in self.orblen[: len(self.base)])

    def verify(self):
        """Deterministic Schreier-generator pass; repairs the chain in place."""
        i = len(self.base) - 1
        while i >= 0:
            base, trans, tinv, inorb, orbit, orblen = self.views()
            ok, residue, stop = K.schreier_check(i, base, trans, tinv, inorb, orbit,
                                                 orblen, self.level_gens(i))
            if ok:
                i -= 1
            else:
                self.add_generator(residue, int(stop))
                i = int(stop)

    def freeze(self, verified: str) -> StabilizerChain:
        base, trans, tinv, inorb, orbit, orblen = self.views()
        return StabilizerChain(self.n, base.copy(), self.gens.copy(), trans.copy(),
                               tinv.copy(), inorb.copy(), orbit.copy(), orblen.copy(),
                               verified)


def _product_replacement(gens: Sequence[np.ndarray], rng: np.random.Generator,
                         slots: int = 10, warmup: int = 40) -> Callable[[], np.ndarray]:
    """Random-element source from product replacement (with accumulator)."""
    n = gens[0].shape[0]
    state = [np.asarray(gens[i % len(gens)], dtype=np.int32).copy() for i in range(max(slots, len(gens)))]
    acc = [np.arange(n, dtype=np.int32)]

    def step() -> np.ndarray:
        s = len(state)
        i = int(rng.integers(s))
        j = int(rng.integers(s - 1))
        if j >= i:
            j += 1
        rhs = state[j] if rng.integers(2) else K.invert(state[j])
        if rng.integers(2):
            state[i] = K.compose(state[i], rhs)
        else:
            state[i] = K.compose(rhs, state[i])
        acc[0] = K.compose(acc[0], state[i])
        return acc[0]

    for _ in range(warmup):
        step()
    return step


def _seed_builder(degree: int, gens: Sequence[np.ndarray], base_prefix: Sequence[int]) -> _Builder:
    b = _Builder(degree, base_prefix)
    ident = np.arange(degree)
    for g in gens:
        if np.array_equal(g, ident):
            continue
        if all(g[p] == p for p in b.base):
            moved = np.nonzero(g != ident)[0]
            b.base.append(int(moved[0]))
            if len(b.base) > b.trans.shape[0]:
                b._grow()
    for g in gens:
        if np.array_equal(g, ident):
            continue
        r, stop = b.sift(g)
        if not K.is_identity(r):
            b.add_generator(r, int(stop))
    return b


def build_chain(g: PermGroup, seed: int | None = None, base_prefix: Sequence[int] = (),
                quiet_rounds: int = 12) -> StabilizerChain:
    """Randomized Schreier-Sims followed by a deterministic verification pass.

    The random phase sifts product-replacement elements until
    ``quiet_rounds`` consecutive ones sift to the identity; the verification
    pass then sifts every Schreier generator at every level and repairs the
    chain until none fails, so the result is exact whatever the seed.
    """
    rng = make_rng(seed)
    gens = [p.array for p in g.generators]
    b = _seed_builder(g.degree, gens, base_prefix)
    if b.gens.shape[0] > 0:
        draw = _product_replacement(gens, rng)
        quiet = 0
        while quiet < quiet_rounds:
            r, stop = b.sift(draw())
            if K.is_identity(r):
                quiet += 1
            else:
                b.add_generator(r, int(stop))
                quiet = 0
        b.verify()
    return b.freeze("schreier")


def chain_with_base(chain: StabilizerChain, base_prefix: Sequence[int],
                    rng: np.random.Generator | None = None) -> StabilizerChain:
    """Chain of the same group whose base starts with ``base_prefix``.

    Uniform random elements of the old chain are sifted into the new one
    until the orbit lengths multiply to the known order, which certifies
    the new chain.
    """
    if rng is None:
        rng = make_rng(0)
    b = _Builder(chain.degree, base_prefix)
    target = chain.order
    for row in chain.strong_array:
        r, stop = b.sift(row)
        if not K.is_identity(r):
            b.add_generator(r, int(stop))
    while b.order() < target:
        r, stop = b.sift(chain.random_array(rng))
        if not K.is_identity(r):
            b.add_generator(r, int(stop))
    if b.order() != target:  # pragma: no cover - impossible for a valid source
        raise RuntimeError("base change overshot the group order")
    return b.freeze("order")


def chain_from_levels(degree: int, base: Sequence[int], gens: Sequence[np.ndarray]) -> StabilizerChain:
    """Chain for generators already known to form a strong generating set
    relative to ``base`` (e.g. the output of a Sims-style search)."""
    b = _Builder(degree, base)
    if gens:
        b.gens = np.vstack([np.asarray(x, dtype=np.int32).reshape(1, -1) for x in gens])
        for lev in range(len(b.base)):
            b._recompute(lev)
    return b.freeze("levels")


def group_order(chain: StabilizerChain) -> int:
    return chain.order


def contains(chain: StabilizerChain, p: Permutation) -> bool:
    return chain.contains(p)


def uniform_random(chain: StabilizerChain, rng: np.random.Generator) -> Permutation:
    """Exactly uniform: one uniformly chosen transversal element per level."""
    return chain.random_element(rng)


def subgroup_of(sub: PermGroup, chain: StabilizerChain) -> bool:
    if sub.degree != chain.degree:
        raise ValueError(f"degree mismatch: {sub.degree} != {chain.degree}")
    return all(chain.contains(p) for p in sub.generators)


def same_group(a: PermGroup, b: PermGroup) -> bool:
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} != {b.degree}")
    return (a.order() == b.order() and subgroup_of(a, b.chain) and subgroup_of(b, a.chain))
