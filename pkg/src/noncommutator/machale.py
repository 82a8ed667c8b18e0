"""The one-noncommutator group of degree 44 and its verification pipeline."""

from __future__ import annotations

import hashlib
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .backtrack import BudgetExhausted, SearchBudget, conjugating_element
from .bsgs import DEFAULT_SEED, PermGroup, StabilizerChain, build_chain
from .classes import (ClassInventory, class_multiplication_by_central, enumerate_classes,
                      fingerprint)
from .groupops import CentralQuotientGroup, center, central_quotient, is_perfect
from .perm import Permutation, commutator, parse_cycles, print_cycles

__all__ = [
    "MACHALE_GENERATORS",
    "MACHALE_ORDER",
    "EXPECTED_CONSTANTS",
    "WitnessPair",
    "WitnessList",
    "CoverageCheck",
    "VerificationReport",
    "build_machale_group",
    "locate_t",
    "generate_witnesses",
    "check_commutators",
    "check_central_noncommutator",
    "fixed_classes",
    "corollary_step",
    "run_pipeline",
    "witnesses_to_text",
    "witnesses_from_text",
]

MACHALE_DEGREE = 44
MACHALE_GENERATORS = (
    "(1,2)(43,44)",
    "(1,2)(21,22)",
    "(1,39,13,43,25)(2,40,14,44,26)(3,37,15,41,27)(4,38,16,42,28)"
    "(5,35,23,17,31)(6,36,24,18,32)(7,33,21,19,29)(8,34,22,20,30)",
    "(1,23,27,11,41)(2,24,28,12,42)(3,22, 26,10,44,4,21,25,9,43)"
    "(5,16,20,40,32,6,15,19,39,31)(7,13,17,37,29)(8,14,18,38,30)",
)
MACHALE_ORDER = 16609443840
EXPECTED_CONSTANTS = {"order": MACHALE_ORDER, "centerOrder": 2, "classCount": 1280, "witnessed": 1279}

# classes this small (times the number of classes) are searched exhaustively
# for a witness, so a miss there is a proof rather than a budget verdict
_EXHAUSTIVE_WORK = 250_000
_BATCH = 8


class NotACentralInvolution(ValueError):
    pass


def build_machale_group() -> PermGroup:
    gens = [parse_cycles(s, MACHALE_DEGREE) for s in MACHALE_GENERATORS]
    return PermGroup(gens, MACHALE_DEGREE, name="machale")


def locate_t(g: PermGroup, budget: SearchBudget | None = None, z: PermGroup | None = None) -> Permutation:
    """The nonidentity element of a center of order 2."""
    z = center(g, budget) if z is None else z
    if z.order() != 2:
        raise NotACentralInvolution(f"center has order {z.order()}, expected 2")
    t = next(s for s in z.chain.strong_generators if not s.is_identity())
    assert (t * t).is_identity()
    return t


@dataclass(frozen=True)
class WitnessPair:
    a: Permutation
    b: Permutation

    def commutator(self) -> Permutation:
        return commutator(self.a, self.b)


@dataclass
class WitnessList:
    """Witness pairs, one per covered class, in class order.

    ``uncovered`` lists target classes for which no commutator was found;
    ``proven`` is the subset shown commutator-free by exhaustive search
    (the rest are budget verdicts).
    """

    pairs: list[WitnessPair]
    classes: list[int]
    uncovered: list[int] = field(default_factory=list)
    proven: list[int] = field(default_factory=list)
    random_draws: int = 0
    targeted_trials: int = 0

    def __len__(self):
        return len(self.pairs)


def witnesses_to_text(wl: WitnessList | Sequence[WitnessPair], degree: int, seed: int) -> str:
    pairs = wl.pairs if isinstance(wl, WitnessList) else list(wl)
    lines = [f"witnesses {len(pairs)} degree {degree} seed {seed}"]
    lines += [f"{print_cycles(p.a)}\t{print_cycles(p.b)}" for p in pairs]
    return "\n".join(lines) + "\n"


def witnesses_from_text(text: str) -> tuple[list[WitnessPair], int, int]:
    """Parse a witness file; returns (pairs, degree, seed)."""
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty witness file")
    head = rows[0].split()
    if len(head) != 6 or head[0] != "witnesses" or head[2] != "degree" or head[4] != "seed":
        raise ValueError(f"bad witness header: {rows[0]!r}")
    count, degree, seed = int(head[1]), int(head[3]), int(head[5])
    pairs = []
    for lineno, ln in enumerate(rows[1:], start=2):
        parts = ln.split("\t")
        if len(parts) != 2:
            raise ValueError(f"witness line {lineno}: expected two tab-separated permutations")
        pairs.append(WitnessPair(parse_cycles(parts[0], degree), parse_cycles(parts[1], degree)))
    if len(pairs) != count:
        raise ValueError(f"header announces {count} pairs, file has {len(pairs)}")
    return pairs, degree, seed


def _class_elements(chain: StabilizerChain, rep: Permutation, gens: Sequence[Permutation]) -> list[Permutation]:
    seen = {rep}
    queue = deque([rep])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = x.conjugate(s)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


def _witness_via(inv: ClassInventory, j: int, target: Permutation) -> WitnessPair | None:
    """Try a = rep_j: [a, b] = target for some b iff a*target ~ a."""
    r = inv.classes[j].representative
    h = r * target
    if fingerprint(h) != inv.classes[j].fingerprint:
        return None
    x = conjugating_element(inv.chain, h, r, inv.budget, h_centralizer=inv.centralizer_of(j).chain)
    if x is None:
        return None
    pair = WitnessPair(r, ~x)
    assert pair.commutator() == target
    return pair


def generate_witnesses(chain: StabilizerChain, inventory: ClassInventory, t: Permutation | None,
                       rng: np.random.Generator, *, threads: int = 1, quiet_draws: int = 256,
                       trials_per_class: int = 100_000) -> WitnessList:
    """One commutator witness per class other than the class of ``t``.

    Random commutators [a, b] of uniform a, b come first; once
    ``quiet_draws`` of them in a row bring nothing new, each remaining class
    g^G is targeted directly: for a representative r (chosen with
    probability proportional to its class size) and a random conjugate g' of
    g, an element b with b^-1 r b = r g' gives [r, b] = g'.  Classes small
    enough are searched exhaustively, otherwise ``trials_per_class`` random
    attempts are made.  With ``t`` None every class is a target.
    """
    inv = inventory
    if not inv.complete:
        raise ValueError("witness generation needs a complete inventory")
    n = chain.degree
    ident = Permutation.identity(n)
    skip = inv.locate(t) if t is not None else None
    targets = [i for i in range(len(inv)) if i != skip]
    found: dict[int, WitnessPair] = {inv.locate(ident): WitnessPair(ident, ident)}
    remaining = set(targets) - set(found)

    def locate(c: Permutation) -> int:
        return inv.locate(c)

    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    draws = 0
    misses = 0
    try:
        while remaining and misses < quiet_draws:
            pairs = [WitnessPair(chain.random_element(rng), chain.random_element(rng)) for _ in range(_BATCH)]
            comms = [p.commutator() for p in pairs]
            idx = list(pool.map(locate, comms)) if pool else [locate(c) for c in comms]
            draws += _BATCH
            for p, j in zip(pairs, idx):
                if j in remaining:
                    found[j] = p
                    remaining.discard(j)
                    misses = 0
                else:
                    misses += 1
    finally:
        if pool is not None:
            pool.shutdown()

    gens = chain.group().generators
    sizes = np.array([float(c.size) for c in inv.classes])
    weights = sizes / sizes.sum()
    uncovered, proven = [], []
    trials = 0
    for g_idx in sorted(remaining):
        rep = inv.classes[g_idx].representative
        hit = None
        if len(inv) * inv.classes[g_idx].size <= _EXHAUSTIVE_WORK:
            for target in _class_elements(chain, rep, gens):
                for j in range(len(inv)):
                    trials += 1
                    hit = _witness_via(inv, j, target)
                    if hit is not None:
                        break
                if hit is not None:
                    break
            if hit is None:
                proven.append(g_idx)
        else:
            for _ in range(trials_per_class):
                trials += 1
                j = int(rng.choice(len(inv), p=weights))
                hit = _witness_via(inv, j, rep.conjugate(chain.random_element(rng)))
                if hit is not None:
                    break
        if hit is None:
            uncovered.append(g_idx)
        else:
            found[g_idx] = hit
    order = sorted(found)
    return WitnessList([found[i] for i in order], order, uncovered, proven, draws, trials)


@dataclass
class CoverageCheck:
    passed: bool
    covered: int
    expected: int
    duplicates: list[int]
    hits_t: bool
    message: str

    def __bool__(self):
        return self.passed


def check_commutators(chain: StabilizerChain, inventory: ClassInventory,
                      witnesses: Sequence[WitnessPair] | WitnessList, t: Permutation | None,
                      expected: int | None = None) -> CoverageCheck:
    """Recompute every [a, b] and confirm they hit ``expected`` distinct
    classes (default: all classes but t's), none of them t's class."""
    pairs = witnesses.pairs if isinstance(witnesses, WitnessList) else list(witnesses)
    inv = inventory
    if not inv.complete:
        raise ValueError("coverage check needs a complete inventory")
    n = chain.degree
    for k, p in enumerate(pairs):
        for x in (p.a, p.b):
            if x.degree != n:
                raise ValueError(f"witness {k + 1}: degree {x.degree}, group degree {n}")
            if not chain.contains(x):
                raise ValueError(f"witness {k + 1}: {x} is not in the group")
    t_class = inv.locate(t) if t is not None else None
    if expected is None:
        expected = len(inv) - (1 if t is not None else 0)
    seen: dict[int, int] = {}
    duplicates = []
    for k, p in enumerate(pairs):
        j = inv.locate(p.commutator())
        if j in seen:
            duplicates.append(j)
        seen.setdefault(j, k)
    hits_t = t_class is not None and t_class in seen
    if duplicates:
        msg = f"FAIL: class {duplicates[0]} witnessed twice"
    elif hits_t:
        msg = f"FAIL: witness {seen[t_class] + 1} lands in the class of t"
    elif len(seen) != expected:
        missing = sorted(set(range(len(inv))) - set(seen) - {t_class})
        msg = f"FAIL: {len(seen)} classes covered, {expected} required; {len(missing)} missing (first: class {missing[0] if missing else '?'})"
    else:
        msg = f"PASS: {len(seen)} classes covered"
    passed = msg.startswith("PASS")
    return CoverageCheck(passed, len(seen), expected, duplicates, hits_t, msg)


def fixed_classes(inventory: ClassInventory, t: Permutation) -> list[int]:
    """Classes C with t*C == C; t is a commutator iff this is nonempty."""
    pairing = class_multiplication_by_central(inventory, t)
    return [i for i, j in enumerate(pairing) if i == j]


def check_central_noncommutator(chain: StabilizerChain, inventory: ClassInventory, t: Permutation) -> bool:
    """True when t is not a commutator: no class is fixed by multiplication by t."""
    if t.is_identity() or not (t * t).is_identity():
        raise NotACentralInvolution("t must be an involution")
    if not chain.contains(t) or any(s * t != t * s for s in chain.strong_generators):
        raise NotACentralInvolution("t must be central")
    return not fixed_classes(inventory, t)


def corollary_step(g: PermGroup, t: Permutation) -> tuple[CentralQuotientGroup, Permutation]:
    """(G x G)/<(t, t)> and its element (t, 1), which is not a commutator
    whenever t is the only noncommutator of G."""
    k = central_quotient(g, t)
    return k, k.designated()


@dataclass
class VerificationReport:
    seed: int
    group: str
    degree: int
    order: int | None = None
    centerOrder: int | None = None
    t: str | None = None
    perfect: bool | None = None
    classCount: int | None = None
    witnessed: int | None = None
    uncoveredClasses: int | None = None
    commutatorCheck: bool | None = None
    tNonCommutator: bool | None = None
    witnessDigest: str | None = None
    failedStage: str | None = None
    failure: str | None = None
    timings: dict[str, float] = field(default_factory=dict, compare=False)
    inventory: ClassInventory | None = field(default=None, repr=False, compare=False)
    witnesses: WitnessList | None = field(default=None, repr=False, compare=False)
    witness_text: str | None = field(default=None, repr=False, compare=False)
    budget_exhausted: bool = field(default=False, compare=False)

    _KEYS = ("group", "degree", "seed", "order", "centerOrder", "t", "perfect", "classCount",
             "witnessed", "uncoveredClasses", "commutatorCheck", "tNonCommutator",
             "witnessDigest", "failedStage", "failure")

    @property
    def theorem_reproduced(self) -> bool:
        return (self.failedStage is None and self.perfect is True
                and self.commutatorCheck is True and self.tNonCommutator is True
                and all(getattr(self, k) == v for k, v in EXPECTED_CONSTANTS.items()))

    @property
    def summary(self) -> str:
        if self.theorem_reproduced:
            return "THEOREM REPRODUCED"
        return f"FAILED at stage {self.failedStage}" + (f": {self.failure}" if self.failure else "")

    def to_text(self) -> str:
        """Flat key=value text; timings are kept out so reruns compare equal."""
        def fmt(v):
            if v is None:
                return "none"
            if isinstance(v, bool):
                return "true" if v else "false"
            return str(v)
        lines = [f"{k}={fmt(getattr(self, k))}" for k in self._KEYS]
        lines.append(f"theoremReproduced={fmt(self.theorem_reproduced)}")
        return "\n".join(lines) + "\n"

    def timings_text(self) -> str:
        return "".join(f"{k}.seconds={v:.3f}\n" for k, v in self.timings.items())

    @classmethod
    def parse(cls, text: str) -> dict[str, str]:
        return dict(ln.split("=", 1) for ln in text.splitlines() if "=" in ln)


def stage_rng(seed: int, stage: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stage])))


class _StageFailed(Exception):
    def __init__(self, stage: str, reason: str):
        super().__init__(reason)
        self.stage = stage
        self.reason = reason


def run_pipeline(seed: int = DEFAULT_SEED, group: PermGroup | None = None, *, threads: int = 1,
                 budget: SearchBudget | None = None) -> VerificationReport:
    """build, order, center and t, perfectness, classes, witnesses, both
    checks, then comparison with the expected constants."""
    g = build_machale_group() if group is None else group
    rep = VerificationReport(seed=seed, group=g.name or "custom", degree=g.degree)
    stage = "build"
    clock = time.perf_counter()

    def lap(name):
        nonlocal clock
        now = time.perf_counter()
        rep.timings[name] = now - clock
        clock = now

    try:
        stage = "order"
        chain = build_chain(g, seed)
        g = PermGroup(g.generators, g.degree, chain=chain, name=g.name)
        rep.order = chain.order
        lap(stage)

        stage = "center"
        z = center(g, budget)
        rep.centerOrder = z.order()
        t = locate_t(g, z=z) if z.order() == 2 else None
        rep.t = print_cycles(t) if t is not None else None
        lap(stage)

        stage = "perfectness"
        rep.perfect = is_perfect(g)
        lap(stage)
        if not rep.perfect:
            raise _StageFailed(stage, "group is not perfect")
        if t is None:
            raise _StageFailed("center", f"center has order {rep.centerOrder}, not 2")

        stage = "classes"
        z_elems = [Permutation.identity(g.degree), t]
        inv = enumerate_classes(chain, z_elems, stage_rng(seed, 1), threads=threads, budget=budget)
        rep.classCount = len(inv)
        rep.inventory = inv
        lap(stage)

        stage = "witnesses"
        wl = generate_witnesses(chain, inv, t, stage_rng(seed, 2), threads=threads)
        rep.witnesses = wl
        rep.witnessed = len(wl)
        rep.uncoveredClasses = len(wl.uncovered)
        rep.witness_text = witnesses_to_text(wl, g.degree, seed)
        rep.witnessDigest = hashlib.sha256(rep.witness_text.encode()).hexdigest()[:16]
        lap(stage)
        if wl.uncovered:
            raise _StageFailed(stage, f"class {wl.uncovered[0]} appears commutator-free "
                                      f"({len(wl.uncovered)} such classes)")

        stage = "commutators"
        cov = check_commutators(chain, inv, wl, t)
        rep.commutatorCheck = cov.passed
        lap(stage)
        if not cov.passed:
            raise _StageFailed(stage, cov.message)

        stage = "noncommutator"
        rep.tNonCommutator = check_central_noncommutator(chain, inv, t)
        lap(stage)
        if not rep.tNonCommutator:
            raise _StageFailed(stage, f"t fixes class {fixed_classes(inv, t)[0]}, so t is a commutator")

        stage = "constants"
        wrong = [k for k, v in EXPECTED_CONSTANTS.items() if getattr(rep, k) != v]
        if wrong:
            raise _StageFailed(stage, "differs in " + ", ".join(wrong))
    except _StageFailed as e:
        rep.failedStage, rep.failure = e.stage, e.reason
    except BudgetExhausted as e:
        rep.failedStage, rep.failure = stage, f"budget exhausted: {e}"
        rep.budget_exhausted = True
    return rep
