"""Brute-force reference computations for small groups.

Everything here works on the full list of group elements and applies the
definitions directly; it is the ground truth the chain-based engine is
tested against.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

import numpy as np

from ._jit import njit
from .bsgs import PermGroup
from .groupops import CentralQuotientGroup, central_quotient
from .perm import Permutation

__all__ = [
    "CapExceeded",
    "ElementTable",
    "enumerate_elements",
    "brute_commutator_set",
    "brute_classes",
    "brute_center",
    "brute_derived",
    "brute_noncommutators",
    "brute_conjugate",
    "random_small_group",
    "quotient_commutator_identity",
]


class CapExceeded(ValueError):
    pass


@njit
def _row_key(row):
    h1 = 0
    h2 = 0
    for x in row:
        v = int(x)
        h1 = (h1 * 1000003 + v + 1) % 2147483647
        h2 = (h2 * 998244353 + v + 7) % 2147483629
    return h1 * 2147483648 + h2


@njit
def _keys(elems):
    out = np.empty(elems.shape[0], dtype=np.int64)
    for i in range(elems.shape[0]):
        out[i] = _row_key(elems[i])
    return out


@njit
def _lookup(row, skeys, order, elems):
    """Index of ``row`` in ``elems`` (via sorted keys), or -1."""
    key = _row_key(row)
    lo = 0
    hi = skeys.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if skeys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    n = row.shape[0]
    while lo < skeys.shape[0] and skeys[lo] == key:
        e = elems[order[lo]]
        same = True
        for i in range(n):
            if e[i] != row[i]:
                same = False
                break
        if same:
            return order[lo]
        lo += 1
    return -1


@njit
def _commutator_mask(elems, skeys, order):
    m = elems.shape[0]
    n = elems.shape[1]
    mask = np.zeros(m, dtype=np.bool_)
    inv = np.empty((m, n), dtype=np.int32)
    for a in range(m):
        for i in range(n):
            inv[a, elems[a, i]] = i
    c = np.empty(n, dtype=np.int32)
    hit = 0
    for a in range(m):
        for b in range(m):
            ea = elems[a]
            eb = elems[b]
            ia = inv[a]
            ib = inv[b]
            for i in range(n):
                c[i] = eb[ea[ib[ia[i]]]]
            j = _lookup(c, skeys, order, elems)
            if not mask[j]:
                mask[j] = True
                hit += 1
        if hit == m:
            break
    return mask


@njit
def _center_mask(elems):
    m = elems.shape[0]
    n = elems.shape[1]
    mask = np.ones(m, dtype=np.bool_)
    for a in range(m):
        for b in range(m):
            same = True
            for i in range(n):
                if elems[b, elems[a, i]] != elems[a, elems[b, i]]:
                    same = False
                    break
            if not same:
                mask[a] = False
                break
    return mask


@njit
def _conjugation_classes(elems, gens, skeys, order):
    m = elems.shape[0]
    n = elems.shape[1]
    label = np.full(m, -1, dtype=np.int64)
    queue = np.empty(m, dtype=np.int64)
    y = np.empty(n, dtype=np.int32)
    ncls = 0
    for start in range(m):
        if label[start] >= 0:
            continue
        label[start] = ncls
        queue[0] = start
        head = 0
        tail = 1
        while head < tail:
            x = elems[queue[head]]
            head += 1
            for s in range(gens.shape[0]):
                g = gens[s]
                # s^-1 x s maps g[i] to g[x[i]]
                for i in range(n):
                    y[g[i]] = g[x[i]]
                j = _lookup(y, skeys, order, elems)
                if label[j] < 0:
                    label[j] = ncls
                    queue[tail] = j
                    tail += 1
        ncls += 1
    return label


@njit
def _closure_mask(elems, seed_mask, skeys, order):
    """Subgroup generated by the elements flagged in ``seed_mask``."""
    m = elems.shape[0]
    n = elems.shape[1]
    seeds = np.nonzero(seed_mask)[0]
    mask = np.zeros(m, dtype=np.bool_)
    queue = np.empty(m, dtype=np.int64)
    ident = -1
    for i in range(m):
        ok = True
        for p in range(n):
            if elems[i, p] != p:
                ok = False
                break
        if ok:
            ident = i
            break
    mask[ident] = True
    queue[0] = ident
    head = 0
    tail = 1
    y = np.empty(n, dtype=np.int32)
    while head < tail:
        x = elems[queue[head]]
        head += 1
        for s in seeds:
            e = elems[s]
            for p in range(n):
                y[p] = e[x[p]]
            j = _lookup(y, skeys, order, elems)
            if not mask[j]:
                mask[j] = True
                queue[tail] = j
                tail += 1
    return mask


class ElementTable:
    """All elements of a finite permutation group, indexed by image table."""

    def __init__(self, elements: np.ndarray, generators: Iterable[Permutation]):
        self.elements = np.ascontiguousarray(elements, dtype=np.int32)
        self.degree = self.elements.shape[1]
        self.generators = tuple(generators)
        keys = _keys(self.elements)
        self._order = np.argsort(keys, kind="stable")
        self._skeys = keys[self._order]

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        for row in self.elements:
            yield Permutation._wrap(row.copy())

    def __getitem__(self, i: int) -> Permutation:
        return Permutation._wrap(self.elements[i].copy())

    def index(self, p: Permutation) -> int:
        if p.degree != self.degree:
            return -1
        return int(_lookup(p.array, self._skeys, self._order, self.elements))

    def __contains__(self, p: Permutation) -> bool:
        return self.index(p) >= 0

    def subset(self, mask: np.ndarray) -> set[Permutation]:
        return {self[i] for i in np.nonzero(mask)[0]}

    def gen_array(self) -> np.ndarray:
        rows = [s.array for s in self.generators] or [np.arange(self.degree, dtype=np.int32)]
        return np.ascontiguousarray(np.vstack(rows), dtype=np.int32)


def enumerate_elements(g: PermGroup, cap: int = 10**5) -> ElementTable:
    """Breadth-first closure of the generators; the chain order is checked
    against ``cap`` first."""
    if g.order() > cap:
        raise CapExceeded(f"group order {g.order()} exceeds cap {cap}")
    n = g.degree
    ident = Permutation.identity(n)
    seen = {ident}
    queue = deque([ident])
    out = [ident.array]
    while queue:
        x = queue.popleft()
        for s in g.generators:
            y = x * s
            if y not in seen:
                seen.add(y)
                queue.append(y)
                out.append(y.array)
    if len(out) != g.order():  # pragma: no cover - would mean a broken chain
        raise AssertionError(f"closure found {len(out)} elements, chain says {g.order()}")
    return ElementTable(np.vstack(out), g.generators)


def brute_commutator_set(t: ElementTable) -> set[Permutation]:
    return t.subset(_commutator_mask(t.elements, t._skeys, t._order))


def commutator_mask(t: ElementTable) -> np.ndarray:
    return _commutator_mask(t.elements, t._skeys, t._order)


def brute_noncommutators(t: ElementTable) -> set[Permutation]:
    return t.subset(~_commutator_mask(t.elements, t._skeys, t._order))


def class_labels(t: ElementTable) -> np.ndarray:
    """Class number of every element, classes numbered by first element."""
    return _conjugation_classes(t.elements, t.gen_array(), t._skeys, t._order)


def brute_classes(t: ElementTable) -> list[set[Permutation]]:
    labels = class_labels(t)
    out: list[set[Permutation]] = [set() for _ in range(int(labels.max()) + 1)]
    for i, c in enumerate(labels):
        out[c].add(t[i])
    return out


def brute_center(t: ElementTable) -> set[Permutation]:
    return t.subset(_center_mask(t.elements))


def brute_derived(t: ElementTable) -> set[Permutation]:
    comm = _commutator_mask(t.elements, t._skeys, t._order)
    return t.subset(_closure_mask(t.elements, comm, t._skeys, t._order))


def brute_conjugate(t: ElementTable, g: Permutation, h: Permutation, labels: np.ndarray | None = None) -> bool:
    labels = class_labels(t) if labels is None else labels
    return bool(labels[t.index(g)] == labels[t.index(h)])


def _support_perm(rng: np.random.Generator, n: int) -> np.ndarray:
    img = np.arange(n)
    if n > 1:
        k = int(rng.integers(2, n + 1))
        support = rng.choice(n, size=k, replace=False)
        while np.array_equal(img[support], support):
            img[support] = support[rng.permutation(k)]
    return img


def _split_perm(rng: np.random.Generator, parts: list[np.ndarray], n: int) -> np.ndarray:
    img = np.arange(n)
    for part in parts:
        img[part] = part[rng.permutation(len(part))]
    return img


def _block_perm(rng: np.random.Generator, n: int, b: int) -> np.ndarray:
    blocks = np.arange(n).reshape(n // b, b)
    dest = blocks[rng.permutation(n // b)]
    img = np.empty(n, dtype=np.int64)
    for src, dst in zip(blocks, dest):
        img[src] = dst[rng.permutation(b)]
    return img


def random_small_group(rng: np.random.Generator, max_degree: int = 10,
                       max_order: int = 5000, tries: int = 1000) -> PermGroup:
    """A random permutation group of degree <= max_degree and order <= max_order.

    Three generator shapes are mixed: random permutations of random supports,
    permutations preserving a random two-part split of the points
    (intransitive groups), and permutations preserving a block system of
    consecutive blocks (imprimitive groups).
    """
    for _ in range(tries):
        n = int(rng.integers(1, max_degree + 1))
        shape = int(rng.integers(3))
        divisors = [b for b in range(2, n) if n % b == 0]
        if shape == 2 and not divisors:
            shape = 0
        if shape == 1 and n < 4:
            shape = 0
        if shape == 1:
            points = rng.permutation(n)
            cut = int(rng.integers(2, n - 1))
            parts = [points[:cut], points[cut:]]
        b = int(rng.choice(divisors)) if shape == 2 else 0
        gens = []
        for _ in range(int(rng.integers(1, 4))):
            if shape == 0:
                img = _support_perm(rng, n)
            elif shape == 1:
                img = _split_perm(rng, parts, n)
            else:
                img = _block_perm(rng, n, b)
            gens.append(Permutation(img))
        g = PermGroup(gens, n)
        if g.order() <= max_order:
            return g
    raise RuntimeError("no small group found")  # pragma: no cover


def quotient_commutator_identity(g: PermGroup, t: Permutation, cap: int = 200) -> dict:
    """Exhaustive check of the quotient commutator identity for small G.

    With K = (G x G)/<(t, t)>: |K| = |G|^2 / 2, the commutator set of K is
    the image of pairs of commutators of G, and (t, 1) is a commutator of K
    exactly when t is a commutator of G.
    """
    k = central_quotient(g, t)
    table = enumerate_elements(g, cap)
    elems = list(table)
    canon = {k.element(x, y) for x in elems for y in elems}
    kt = ElementTable(np.vstack([p.array for p in sorted(canon)]), ())
    comm_k = {kt[i] for i in np.nonzero(_commutator_mask_canonical(kt, k))[0]}
    comm_g = brute_commutator_set(table)
    image = {k.element(c1, c2) for c1 in comm_g for c2 in comm_g}
    designated = k.designated()
    return {
        "order": len(canon),
        "expected_order": k.order,
        "identity_holds": comm_k == image,
        "designated_commutator": designated in comm_k,
        "t_commutator": t in comm_g,
        "commutators": len(comm_k),
    }


def _commutator_mask_canonical(kt: ElementTable, k: CentralQuotientGroup) -> np.ndarray:
    """Commutators of K: computed on pair representatives, then reduced."""
    mask = np.zeros(len(kt), dtype=bool)
    for row in np.unique(_commutator_rows(kt.elements), axis=0):
        p = Permutation._wrap(row)
        mask[kt.index(k.canonical(p))] = True
    return mask


@njit
def _commutator_rows(elems):
    m = elems.shape[0]
    n = elems.shape[1]
    inv = np.empty((m, n), dtype=np.int32)
    for a in range(m):
        for i in range(n):
            inv[a, elems[a, i]] = i
    out = np.empty((m * m, n), dtype=np.int32)
    r = 0
    for a in range(m):
        for b in range(m):
            for i in range(n):
                out[r, i] = elems[b, elems[a, inv[b, inv[a, i]]]]
            r += 1
    return out
