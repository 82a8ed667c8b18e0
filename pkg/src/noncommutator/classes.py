"""Conjugacy-class inventories built by seeded random search.

Classes are discovered by sampling (uniform elements of the group, uniform
elements of known centralizers and their products with the class
representative) and by closing the inventory under power maps and
multiplication by central elements.  Every class carries its exact
centralizer order, so the search stops exactly when the class sizes add up
to the group order.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .backtrack import SearchBudget, centralizer, conjugating_element
from .bsgs import PermGroup, StabilizerChain
from .perm import Permutation, cycle_type, parse_cycles, print_cycles

__all__ = [
    "ClassFingerprint",
    "ConjugacyClass",
    "ClassInventory",
    "IncompleteInventory",
    "fingerprint",
    "enumerate_classes",
    "assign_class",
    "class_multiplication_by_central",
    "inventory_to_text",
    "inventory_from_text",
]

log = logging.getLogger(__name__)

# buckets up to this size are tested directly, larger ones are first cut
# down by the centralizer signature
_DIRECT_TESTS = 2
_BATCH = 8


class IncompleteInventory(RuntimeError):
    pass


def _type_text(ct: Sequence[int]) -> str:
    c = Counter(ct)
    return ".".join(f"{length}^{c[length]}" for length in sorted(c, reverse=True))


def _parse_type(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split("."):
        length, mult = part.split("^")
        out.extend([int(length)] * int(mult))
    return tuple(out)


@dataclass(frozen=True)
class ClassFingerprint:
    """Element order and cycle types of p, p^2, p^3."""

    order: int
    cycle_type: tuple[int, ...]
    square_type: tuple[int, ...]
    cube_type: tuple[int, ...]

    def text(self) -> str:
        return "\t".join([str(self.order), _type_text(self.cycle_type),
                          _type_text(self.square_type), _type_text(self.cube_type)])

    @classmethod
    def from_text(cls, fields: Sequence[str]) -> "ClassFingerprint":
        return cls(int(fields[0]), _parse_type(fields[1]), _parse_type(fields[2]), _parse_type(fields[3]))


def _power_type(ct: tuple[int, ...], k: int) -> tuple[int, ...]:
    out: list[int] = []
    for length in ct:
        d = math.gcd(length, k)
        out.extend([length // d] * d)
    return tuple(sorted(out, reverse=True))


def fingerprint(p: Permutation) -> ClassFingerprint:
    ct = cycle_type(p)
    return ClassFingerprint(math.lcm(*ct), ct, _power_type(ct, 2), _power_type(ct, 3))


def class_signature(p: Permutation, cent: StabilizerChain) -> tuple:
    """Conjugation invariant read off the centralizer: its order and the
    multiset of (cycle length, centralizer-orbit length) over all points."""
    n = p.degree
    rep = K.orbit_partition(np.ascontiguousarray(cent.strong_array), n)
    osize = Counter(int(r) for r in rep)
    cyc = K.cycle_lengths(p.array)
    prof = Counter((int(cyc[i]), osize[int(rep[i])]) for i in range(n))
    return (cent.order, tuple(sorted(prof.items())))


@dataclass
class ConjugacyClass:
    representative: Permutation
    centralizer_order: int
    size: int
    fingerprint: ClassFingerprint
    centralizer: PermGroup | None = field(default=None, repr=False, compare=False)
    signature: tuple | None = field(default=None, repr=False, compare=False)


class ClassInventory:
    """Classes found so far, indexed by fingerprint."""

    def __init__(self, chain: StabilizerChain, budget: SearchBudget | None = None):
        self.chain = chain
        self.group_order = chain.order
        self.budget = budget
        self.classes: list[ConjugacyClass] = []
        self.covered_mass = 0
        self._buckets: dict[ClassFingerprint, list[int]] = defaultdict(list)
        # how pairs of classes with equal fingerprints were told apart
        self.certificates: Counter = Counter()
        self.draws = 0
        self.stalls = 0

    @property
    def complete(self) -> bool:
        return self.covered_mass == self.group_order

    def __len__(self):
        return len(self.classes)

    def bucket(self, fp: ClassFingerprint) -> list[int]:
        return list(self._buckets.get(fp, ()))

    def centralizer_of(self, j: int) -> PermGroup:
        c = self.classes[j]
        if c.centralizer is None:
            cent = centralizer(self.chain, c.representative, self.budget)
            if cent.order() != c.centralizer_order:
                raise IncompleteInventory(
                    f"class {j}: recorded centralizer order {c.centralizer_order}, "
                    f"computed {cent.order()}")
            c.centralizer = cent
            c.signature = class_signature(c.representative, cent.chain)
        return c.centralizer

    def signature_of(self, j: int) -> tuple:
        self.centralizer_of(j)
        return self.classes[j].signature

    def match(self, p: Permutation, cent: PermGroup | None = None, since: int = 0):
        """Find the class of ``p`` among classes ``since..``.

        Returns ``(index or None, centralizer of p or None, tested)`` where
        ``tested`` lists the classes a backtrack search proved ``p`` is not
        conjugate to.
        """
        fp = fingerprint(p)
        bucket = [j for j in self._buckets.get(fp, ()) if j >= since]
        if not bucket:
            return None, cent, []
        for j in bucket:
            if self.classes[j].representative == p:
                return j, cent, []
        if cent is None and len(bucket) > _DIRECT_TESTS:
            cent = centralizer(self.chain, p, self.budget)
        if cent is not None:
            sig = class_signature(p, cent.chain)
            cands = [j for j in bucket if self.signature_of(j) == sig]
        else:
            cands = bucket
        tested = []
        for j in cands:
            rep = self.classes[j].representative
            x = conjugating_element(self.chain, p, rep, self.budget,
                                    h_centralizer=self.centralizer_of(j).chain)
            if x is not None:
                return j, cent, tested
            tested.append(j)
        return None, cent, tested

    def add(self, p: Permutation, cent: PermGroup | None = None, tested: Iterable[int] = ()) -> int:
        """Record ``p`` as the representative of a new class.

        The caller must already have established that ``p`` matches no
        existing class; ``tested`` names the classes ruled out by backtrack.
        """
        if cent is None:
            cent = centralizer(self.chain, p, self.budget)
        order = cent.order()
        size, rem = divmod(self.group_order, order)
        if rem:
            raise AssertionError("centralizer order does not divide the group order")
        fp = fingerprint(p)
        tested = set(tested)
        for j in self._buckets.get(fp, ()):
            self.certificates["backtrack" if j in tested else "invariant"] += 1
        cls = ConjugacyClass(p, order, size, fp, cent, class_signature(p, cent.chain))
        self.classes.append(cls)
        idx = len(self.classes) - 1
        self._buckets[fp].append(idx)
        self.covered_mass += size
        if self.covered_mass > self.group_order:
            raise AssertionError("class sizes exceed the group order: duplicate class")
        return idx

    def locate(self, p: Permutation) -> int:
        """Index of the class of ``p``; the inventory must be complete."""
        j, _, _ = self.match(p)
        if j is None:
            raise IncompleteInventory(f"{p} lies in no recorded class")
        return j

    def census(self) -> Counter:
        return Counter(c.fingerprint for c in self.classes)

    def certify_distinct(self) -> Counter:
        """Re-prove pairwise non-conjugacy of all classes sharing a fingerprint."""
        certs: Counter = Counter()
        for fp, members in self._buckets.items():
            for a in range(len(members)):
                for b in range(a):
                    i, j = members[a], members[b]
                    if self.signature_of(i) != self.signature_of(j):
                        certs["invariant"] += 1
                        continue
                    x = conjugating_element(self.chain, self.classes[i].representative,
                                            self.classes[j].representative, self.budget,
                                            h_centralizer=self.centralizer_of(j).chain)
                    if x is not None:
                        raise AssertionError(f"classes {i} and {j} are conjugate")
                    certs["backtrack"] += 1
        return certs


def assign_class(inv: ClassInventory, chain: StabilizerChain, p: Permutation) -> int | None:
    """Index of the class containing ``p``, or None for a new class."""
    if chain is not inv.chain and chain.order != inv.chain.order:
        raise ValueError("inventory belongs to a different group")
    j, _, _ = inv.match(p)
    return j


def _divisor_powers(order: int) -> list[int]:
    return [k for k in range(2, order) if order % k == 0]


def enumerate_classes(chain: StabilizerChain, central_elements: Sequence[Permutation],
                      rng: np.random.Generator, *, stall_draws: int | None = None,
                      threads: int = 1, budget: SearchBudget | None = None,
                      progress_every: int = 500) -> ClassInventory:
    """Complete class inventory of the group of ``chain``.

    ``central_elements`` should be the elements of the center; each is its
    own class and random sampling would essentially never reach them.
    Random elements come in rotation from the whole group, from the
    centralizer of a randomly chosen known class, and as a known
    representative times an element of its centralizer.  Each new class
    queues its powers p^k (k dividing the order) and its central multiples.
    After ``stall_draws`` consecutive draws without a new class the residual
    mass and fingerprint census are logged and all powers p^k, 1 < k < order,
    join the closure.
    """
    n = chain.degree
    inv = ClassInventory(chain, budget)
    whole = chain.group()
    ident = Permutation.identity(n)
    central = []
    for z in central_elements:
        if not z.is_identity() and z not in central:
            central.append(z)
    inv.add(ident, whole)
    for z in central:
        inv.add(z, whole)
    if stall_draws is None:
        stall_draws = max(1000, 10**6 // n)
    boosted = False
    pending: deque[Permutation] = deque()

    def close(idx: int):
        r = inv.classes[idx].representative
        for z in central:
            pending.append(z * r)
        order = inv.classes[idx].fingerprint.order
        for k in (range(2, order) if boosted else _divisor_powers(order)):
            pending.append(r ** k)

    for i in range(len(inv.classes)):
        close(i)

    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    draws = 0
    quiet = 0
    stalls = 0
    rotation = 0

    def draw() -> Permutation:
        nonlocal rotation
        rotation = (rotation + 1) % 3
        if rotation == 0 or len(inv.classes) == 0:
            return chain.random_element(rng)
        j = int(rng.integers(len(inv.classes)))
        y = inv.centralizer_of(j).chain.random_element(rng)
        return y if rotation == 1 else inv.classes[j].representative * y

    try:
        while not inv.complete:
            if pending:
                batch = [pending.popleft() for _ in range(min(_BATCH, len(pending)))]
                from_draws = False
            else:
                batch = [draw() for _ in range(_BATCH)]
                from_draws = True
                draws += len(batch)
            snapshot = len(inv.classes)
            if pool is None:
                results = [inv.match(p) for p in batch]
            else:
                results = list(pool.map(inv.match, batch))
            found_new = False
            for p, (j, cent, tested) in zip(batch, results):
                if j is None and len(inv.classes) > snapshot:
                    j, cent, more = inv.match(p, cent, since=snapshot)
                    tested = list(tested) + more
                if j is None:
                    idx = inv.add(p, cent, tested)
                    close(idx)
                    found_new = True
                    if inv.complete:
                        break
            if from_draws:
                quiet = 0 if found_new else quiet + len(batch)
                if draws % progress_every < _BATCH:
                    log.info("draws=%d classes=%d covered=%.6f", draws, len(inv.classes),
                             inv.covered_mass / inv.group_order)
                if quiet >= stall_draws and not inv.complete:
                    residual = inv.group_order - inv.covered_mass
                    census = ", ".join(f"{fp.order}:{_type_text(fp.cycle_type)}x{c}"
                                       for fp, c in sorted(inv.census().items(),
                                                           key=lambda kv: kv[0].cycle_type))
                    log.warning("no new class in %d draws; residual mass %d of %d; "
                                "census %s; boosting power-map closure",
                                quiet, residual, inv.group_order, census)
                    boosted = True
                    stalls += 1
                    quiet = 0
                    for i in range(len(inv.classes)):
                        close(i)
    finally:
        if pool is not None:
            pool.shutdown()
    inv.draws = draws
    inv.stalls = stalls
    return inv


def class_multiplication_by_central(inv: ClassInventory, t: Permutation) -> list[int]:
    """Index map sending the class of g to the class of t*g."""
    if not inv.complete:
        raise IncompleteInventory("inventory is incomplete")
    pairing = [inv.locate(t * c.representative) for c in inv.classes]
    return pairing


def inventory_to_text(inv: ClassInventory) -> str:
    lines = [f"inventory order {inv.group_order} classes {len(inv.classes)} degree {inv.chain.degree}",
             "# representative\tcentralizer_order\tsize\telement_order\tcycle_type\tsquare_type\tcube_type"]
    for c in inv.classes:
        lines.append("\t".join([print_cycles(c.representative), str(c.centralizer_order),
                                str(c.size), c.fingerprint.text()]))
    return "\n".join(lines) + "\n"


def inventory_from_text(text: str, chain: StabilizerChain,
                        budget: SearchBudget | None = None) -> ClassInventory:
    """Rebuild an inventory; representatives are checked for membership and
    the recorded sizes against the recorded centralizer orders."""
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    head = rows[0].split()
    if head[0] != "inventory" or head[1] != "order" or head[3] != "classes":
        raise ValueError("not an inventory file")
    order, count, degree = int(head[2]), int(head[4]), int(head[6])
    if order != chain.order or degree != chain.degree:
        raise ValueError("inventory was written for a different group")
    inv = ClassInventory(chain, budget)
    for ln in rows[1:]:
        fields = ln.split("\t")
        rep = parse_cycles(fields[0], degree)
        if not chain.contains(rep):
            raise ValueError(f"representative {fields[0]} is not in the group")
        c_order, size = int(fields[1]), int(fields[2])
        fp = ClassFingerprint.from_text(fields[3:7])
        if fp != fingerprint(rep) or c_order * size != order:
            raise ValueError(f"inconsistent inventory line: {ln}")
        inv.classes.append(ConjugacyClass(rep, c_order, size, fp))
        inv._buckets[fp].append(len(inv.classes) - 1)
        inv.covered_mass += size
    if len(inv.classes) != count:
        raise ValueError(f"header says {count} classes, found {len(inv.classes)}")
    return inv
