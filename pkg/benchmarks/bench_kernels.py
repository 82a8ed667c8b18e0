"""Compare the numba kernels with the interpreted fallback.

Each backend runs in its own interpreter, because the choice is made once at
import time from NONCOMMUTATOR_PURE_PYTHON.  Workloads run once untimed to
absorb compilation, then ``--repeat`` times; the best time is kept.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeat 5 --only sift,centralizer
    python3 benchmarks/bench_kernels.py --scale full --numba-only
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads(scale: str):
    from noncommutator.backtrack import centralizer, conjugating_element
    from noncommutator.bsgs import PermGroup, build_chain, make_rng
    from noncommutator.classes import enumerate_classes
    from noncommutator.groupops import wreath_imprimitive
    from noncommutator.machale import build_machale_group
    from noncommutator.oracle import brute_commutator_set, enumerate_elements
    from noncommutator.perm import Permutation, parse_cycles

    def sym(n):
        cycle = "(" + ",".join(str(i) for i in range(1, n + 1)) + ")"
        return PermGroup([parse_cycles("(1,2)", n), parse_cycles(cycle, n)], n)

    if scale == "full":
        g, cls_group, oracle_group = build_machale_group(), sym(8), sym(7)
    else:
        g, _ = wreath_imprimitive(2, sym(8))
        cls_group, oracle_group = sym(7), sym(6)
    chain = g.chain
    rng = make_rng(0)
    sample = [chain.random_element(rng) for _ in range(200)]

    def schreier_sims():
        build_chain(g, seed=1)

    def sift():
        for x in sample:
            chain.contains(x)

    def random_elements():
        r = make_rng(1)
        for _ in range(2000):
            chain.random_element(r)

    def centralizers():
        for x in sample[:10]:
            centralizer(chain, x)

    def conjugacy():
        for x, y in zip(sample[:10], sample[10:20]):
            conjugating_element(chain, x, x.conjugate(y))

    def classes():
        enumerate_classes(cls_group.chain, [Permutation.identity(cls_group.degree)], make_rng(2))

    def oracle():
        brute_commutator_set(enumerate_elements(oracle_group))

    return {
        "schreier_sims": schreier_sims,
        "sift": sift,
        "random_elements": random_elements,
        "centralizer": centralizers,
        "conjugacy": conjugacy,
        "classes": classes,
        "oracle": oracle,
    }


def worker(only: list[str] | None, repeat: int, scale: str) -> dict:
    from noncommutator import _jit

    work = _workloads(scale)
    out = {"backend": _jit.BACKEND, "times": {}}
    for name, fn in work.items():
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        fn()
        first = time.perf_counter() - t0
        best = first
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out["times"][name] = {"first": first, "best": best}
    return out


def run_backend(pure: bool, args) -> dict:
    env = dict(os.environ)
    env.pop("NONCOMMUTATOR_PURE_PYTHON", None)
    if pure:
        env["NONCOMMUTATOR_PURE_PYTHON"] = "1"
    cmd = [sys.executable, __file__, "--worker", "--repeat", str(args.repeat), "--scale", args.scale]
    if args.only:
        cmd += ["--only", args.only]
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--only", help="comma-separated workload names")
    p.add_argument("--scale", choices=("small", "full"), default="small",
                   help="small: C2 wr S8, S7 and S6 (default); full: the degree-44 group, S8 and S7 "
                        "(the interpreted backend is very slow there)")
    p.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", help="print raw results as JSON")
    p.add_argument("--numba-only", action="store_true", help="skip the interpreted backend")
    args = p.parse_args(argv)
    only = args.only.split(",") if args.only else None
    if args.worker:
        print(json.dumps(worker(only, args.repeat, args.scale)))
        return 0

    fast = run_backend(False, args)
    slow = run_backend(True, args) if not args.numba_only else None
    if args.json:
        print(json.dumps({"numba": fast, "python": slow}, indent=2))
        return 0
    print(f"{'workload':<16} {'numba first':>12} {'numba best':>11} {'python best':>12} {'speedup':>8}")
    for name, t in fast["times"].items():
        if slow is None:
            print(f"{name:<16} {t['first']:>11.3f}s {t['best']:>10.4f}s {'-':>12} {'-':>8}")
            continue
        py = slow["times"][name]["best"]
        print(f"{name:<16} {t['first']:>11.3f}s {t['best']:>10.4f}s {py:>11.4f}s {py / max(t['best'], 1e-9):>7.1f}x")
    if fast["backend"] != "numba":
        print("note: numba is unavailable, both columns use the interpreted kernels")
    return 0


if __name__ == "__main__":
    sys.exit(main())
