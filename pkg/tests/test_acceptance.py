"""End-to-end acceptance checks on the embedded degree-44 group.

Each test prints one ``criterion N PASS/FAIL`` line; the lines are repeated
in the terminal summary.  Criteria 5, 6, 7 and 10 share two full
``verify --seed 1`` runs, each in its own subprocess.
"""

import subprocess
import sys
import time
from collections import Counter
from pathlib import Path

import pytest

from acceptance_log import criterion
from noncommutator.backtrack import conjugating_element
from noncommutator.bsgs import make_rng, same_group
from noncommutator.classes import enumerate_classes, inventory_from_text
from noncommutator.cli import _demo_groups, main
from noncommutator.groupops import (block_action, center, central_quotient, consecutive_blocks,
                                    derived_subgroup, is_perfect, wreath_imprimitive)
from noncommutator.machale import (MACHALE_ORDER, VerificationReport, build_machale_group,
                                   check_central_noncommutator, check_commutators, generate_witnesses,
                                   locate_t, witnesses_from_text)
from noncommutator.oracle import (brute_center, brute_commutator_set, brute_derived, class_labels,
                                  quotient_commutator_identity, enumerate_elements, random_small_group)
from noncommutator.perm import Permutation, parse_cycles

pytestmark = pytest.mark.slow

ORDER = 16609443840
WREATH_ORDER = 33218887680


@pytest.fixture(scope="module")
def machale():
    return build_machale_group()


@pytest.fixture(scope="session")
def verify_runs(tmp_path_factory):
    """Two independent ``verify --seed 1`` runs.

    They run one after the other: each holds over a gigabyte of centralizer
    chains, and parallel runs gain nothing on a single core.
    """
    root = tmp_path_factory.mktemp("verify")
    results = []
    for name in ("run1", "run2"):
        (root / name).mkdir()
        out = root / name / "report.txt"
        cmd = [sys.executable, "-m", "noncommutator", "verify", "--seed", "1", "--out", str(out)]
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=4 * 3600)
        results.append({"path": out, "code": proc.returncode, "stdout": proc.stdout, "stderr": proc.stderr})
    return results


def _timings(path: Path) -> dict[str, float]:
    text = Path(f"{path}.timings").read_text()
    return {k.removesuffix(".seconds"): float(v) for k, v in VerificationReport.parse(text).items()}


@pytest.fixture(scope="module")
def loaded_run(verify_runs, machale):
    run = verify_runs[0]
    assert run["code"] == 0, run["stderr"][-2000:]
    path = run["path"]
    inv = inventory_from_text(Path(f"{path}.inventory").read_text(), machale.chain)
    pairs, degree, seed = witnesses_from_text(Path(f"{path}.witnesses").read_text())
    report = VerificationReport.parse(path.read_text())
    t = parse_cycles(report["t"], 44)
    return {"run": run, "inv": inv, "pairs": pairs, "degree": degree, "seed": seed, "report": report,
            "t": t, "timings": _timings(path)}


def test_criterion_01_order(capsys):
    with criterion(1, "order of the embedded group") as note:
        t0 = time.perf_counter()
        assert main(["order"]) == 0
        elapsed = time.perf_counter() - t0
        assert capsys.readouterr().out.strip() == str(ORDER)
        assert build_machale_group().order() == MACHALE_ORDER == ORDER
        note.append(f"order {ORDER}")
        assert elapsed < 10


def test_criterion_02_center(machale):
    with criterion(2, "center of order 2 with an involution t"):
        t0 = time.perf_counter()
        z = center(machale)
        t = locate_t(machale, z=z)
        elapsed = time.perf_counter() - t0
        assert z.order() == 2
        assert not t.is_identity() and (t * t).is_identity()
        assert all(s * t == t * s for s in machale.generators)
        assert elapsed < 60


def test_criterion_03_perfect(machale):
    with criterion(3, "derived subgroup equals the group"):
        t0 = time.perf_counter()
        d = derived_subgroup(machale)
        assert d.order() == ORDER and same_group(d, machale)
        assert is_perfect(machale)
        assert time.perf_counter() - t0 < 300


def test_criterion_04_wreath(machale):
    with criterion(4, "wreath product order and its derived subgroup") as note:
        t0 = time.perf_counter()
        top = block_action(machale, consecutive_blocks(44, 2))
        assert top.order() == 7920 and top.degree == 22
        h, _ = wreath_imprimitive(2, top)
        assert h.order() == WREATH_ORDER == 2**22 * 7920
        assert same_group(derived_subgroup(h), machale)
        note.append(f"|H| = {h.order()}")
        assert time.perf_counter() - t0 < 600


def test_criterion_05_class_count(loaded_run):
    with criterion(5, "1280 conjugacy classes summing to the group order") as note:
        inv = loaded_run["inv"]
        assert len(inv) == 1280 and inv.complete
        assert sum(c.size for c in inv.classes) == ORDER
        assert all(c.size * c.centralizer_order == ORDER for c in inv.classes)
        certs = inv.certify_distinct()
        same_fp = Counter(c.fingerprint for c in inv.classes)
        assert sum(certs.values()) == sum(n * (n - 1) // 2 for n in same_fp.values())
        assert loaded_run["report"]["classCount"] == "1280"
        secs = loaded_run["timings"]["classes"]
        note.append(f"enumeration {secs:.0f}s, {sum(certs.values())} pairs certified by search")
        assert secs < 7200


def test_criterion_06_witnesses(loaded_run, machale):
    with criterion(6, "1279 witness pairs in distinct classes avoiding t") as note:
        inv, pairs, t = loaded_run["inv"], loaded_run["pairs"], loaded_run["t"]
        assert len(pairs) == 1279 and loaded_run["degree"] == 44 and loaded_run["seed"] == 1
        res = check_commutators(machale.chain, inv, pairs, t)
        assert res.passed and res.covered == 1279 and not res.hits_t and not res.duplicates
        assert res.message.startswith("PASS")
        classes = {inv.locate(p.commutator()) for p in pairs}
        assert len(classes) == 1279 and inv.locate(t) not in classes
        assert loaded_run["report"]["commutatorCheck"] == "true"
        assert loaded_run["report"]["uncoveredClasses"] == "0"
        secs = loaded_run["timings"]["witnesses"] + loaded_run["timings"]["commutators"]
        note.append(f"generation and check {secs:.0f}s")
        assert secs < 7200


def test_criterion_07_noncommutator(loaded_run, machale):
    with criterion(7, "t fixes no class, so it is not a commutator"):
        inv, t = loaded_run["inv"], loaded_run["t"]
        assert check_central_noncommutator(machale.chain, inv, t)
        report = loaded_run["report"]
        assert report["tNonCommutator"] == "true" and report["perfect"] == "true"
        assert report["theoremReproduced"] == "true"
        assert loaded_run["run"]["stdout"].strip().splitlines()[-1] == "THEOREM REPRODUCED"


def _compare_with_oracle(g, seed):
    table = enumerate_elements(g)
    elems = list(table)
    rng = make_rng(seed)
    assert g.order() == len(table)
    for _ in range(20):
        x = Permutation(rng.permutation(g.degree))
        assert g.chain.contains(x) == (x in table)
    assert all(g.chain.contains(x) for x in elems[:: max(1, len(elems) // 50)])
    assert set(enumerate_elements(center(g))) == brute_center(table)
    assert set(enumerate_elements(derived_subgroup(g))) == brute_derived(table)

    labels = class_labels(table)
    z = sorted(brute_center(table))
    inv = enumerate_classes(g.chain, z, rng)
    assert inv.complete and len(inv) == len(set(labels.tolist()))
    rep_labels = [int(labels[table.index(c.representative)]) for c in inv.classes]
    assert len(set(rep_labels)) == len(inv)
    sizes = Counter(labels.tolist())
    assert all(sizes[lab] == c.size for lab, c in zip(rep_labels, inv.classes))
    sample = [elems[int(i)] for i in rng.integers(0, len(elems), size=min(16, len(elems)))]
    for a in sample:
        assert rep_labels[inv.locate(a)] == labels[table.index(a)]
        for b in sample[:6]:
            x = conjugating_element(g.chain, a, b)
            assert (x is not None) == (labels[table.index(a)] == labels[table.index(b)])
            if x is not None:
                assert a.conjugate(x) == b

    comms = brute_commutator_set(table)
    wl = generate_witnesses(g.chain, inv, None, rng)
    commutator_classes = {rep_labels[j] for j in wl.classes}
    assert commutator_classes == {int(labels[table.index(c)]) for c in comms}
    assert sorted(wl.uncovered) == sorted(wl.proven)
    assert all(inv.locate(p.commutator()) == j for p, j in zip(wl.pairs, wl.classes))


def test_criterion_08_oracle_equivalence():
    with criterion(8, "engine agrees with brute force on random small groups") as note:
        t0 = time.perf_counter()
        orders = []
        for seed in range(220):
            g = random_small_group(make_rng(seed), max_degree=10, max_order=5000)
            assert g.degree <= 10 and g.order() <= 5000
            _compare_with_oracle(g, seed)
            orders.append(g.order())
        note.append(f"{len(orders)} groups, orders 1..{max(orders)}, {len(set(orders))} distinct")
        assert len(orders) >= 200
        assert time.perf_counter() - t0 < 600


def test_criterion_09_quotient():
    with criterion(9, "quotient (G x G)/<(t,t)> commutator identity") as note:
        t0 = time.perf_counter()
        seen = []
        for g in _demo_groups():
            table = enumerate_elements(g)
            invol = [z for z in sorted(brute_center(table)) if not z.is_identity() and (z * z).is_identity()]
            t = invol[0]
            k = central_quotient(g, t)
            assert k.order == len(table) ** 2 // 2
            r = quotient_commutator_identity(g, t)
            assert r["order"] == r["expected_order"] == k.order
            assert r["identity_holds"]
            assert r["designated_commutator"] == r["t_commutator"]
            seen.append(len(table))
        assert len(seen) >= 5 and 8 in seen and 16 in seen
        note.append("orders " + ",".join(map(str, seen)))
        assert time.perf_counter() - t0 < 60


def test_criterion_10_determinism(verify_runs):
    with criterion(10, "two verify runs with seed 1 are byte-identical"):
        a, b = verify_runs
        assert a["code"] == b["code"] == 0
        for suffix in ("", ".witnesses", ".inventory"):
            pa, pb = Path(f"{a['path']}{suffix}"), Path(f"{b['path']}{suffix}")
            assert pa.read_bytes() == pb.read_bytes(), suffix
        assert a["path"].stat().st_size > 0
