"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 search budget exhausted,
4 verification failed, 1 any other hard failure.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .backtrack import BudgetExhausted, SearchBudget
from .bsgs import DEFAULT_SEED, PermGroup, make_rng, same_group
from .classes import enumerate_classes, inventory_from_text, inventory_to_text
from .groupops import (block_action, center, consecutive_blocks, derived_subgroup, is_perfect,
                       wreath_imprimitive)
from .machale import (MACHALE_DEGREE, MACHALE_GENERATORS, build_machale_group, check_commutators,
                      generate_witnesses, run_pipeline, witnesses_from_text, witnesses_to_text)
from .perm import CycleNotationError, Permutation, parse_cycles, print_cycles

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4

log = logging.getLogger("noncommutator")


class GroupFileError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class GroupFile:
    degree: int
    generators: list[Permutation]
    name: str = "custom"

    def group(self) -> PermGroup:
        return PermGroup(self.generators, self.degree, name=self.name)

    def text(self) -> str:
        return f"degree {self.degree}\n" + "".join(print_cycles(g) + "\n" for g in self.generators)


_DEGREE = re.compile(r"^degree\s+(\d+)$")


def parse_group_file(text: str, name: str = "custom") -> GroupFile:
    """``degree <n>`` first, then one generator per line; ``#`` comments."""
    degree = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if degree is None:
            m = _DEGREE.match(line)
            if not m or int(m.group(1)) < 1:
                raise GroupFileError(lineno, f"expected 'degree <n>', got {line!r}")
            degree = int(m.group(1))
            continue
        try:
            gens.append(parse_cycles(line, degree))
        except CycleNotationError as e:
            raise GroupFileError(lineno, str(e)) from None
    if degree is None:
        raise GroupFileError(1, "missing 'degree <n>' line")
    return GroupFile(degree, gens, name)


def embedded_group_file() -> GroupFile:
    return GroupFile(MACHALE_DEGREE, [parse_cycles(s, MACHALE_DEGREE) for s in MACHALE_GENERATORS], "machale")


def _load_group(args) -> PermGroup:
    if args.group is None:
        return build_machale_group()
    path = Path(args.group)
    return parse_group_file(path.read_text(), path.stem).group()


def _budget(args) -> SearchBudget | None:
    if args.budget_nodes is None and args.budget_secs is None:
        return None
    return SearchBudget(args.budget_nodes, args.budget_secs)


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _oracle_table(g: PermGroup):
    from .oracle import enumerate_elements
    return enumerate_elements(g)


def _center_t(g: PermGroup, budget) -> Permutation | None:
    z = center(g, budget)
    if z.order() != 2:
        return None
    return next(s for s in z.chain.strong_generators if not s.is_identity())


def cmd_order(args) -> int:
    g = _load_group(args)
    print(len(_oracle_table(g)) if args.oracle else g.order())
    return EXIT_OK


def cmd_center(args) -> int:
    g = _load_group(args)
    if args.oracle:
        from .oracle import brute_center
        elems = sorted(brute_center(_oracle_table(g)))
    else:
        z = center(g, _budget(args))
        if z.order() > 10**4:
            print(z.order())
            for s in z.generators:
                print(print_cycles(s))
            return EXIT_OK
        from .oracle import enumerate_elements
        elems = list(enumerate_elements(z))
    print(len(elems))
    for s in sorted(elems):
        if not s.is_identity():
            print(print_cycles(s))
    return EXIT_OK


def cmd_derived(args) -> int:
    g = _load_group(args)
    if args.oracle:
        from .oracle import brute_derived
        d = len(brute_derived(_oracle_table(g)))
    else:
        d = derived_subgroup(g).order()
    print(d)
    return EXIT_OK


def cmd_perfect(args) -> int:
    g = _load_group(args)
    if args.oracle:
        from .oracle import brute_derived
        t = _oracle_table(g)
        perfect = len(brute_derived(t)) == len(t)
    else:
        perfect = is_perfect(g)
    print("true" if perfect else "false")
    return EXIT_OK


def cmd_blocks(args) -> int:
    g = _load_group(args)
    blocks = consecutive_blocks(g.degree, args.block_size)
    top = block_action(g, blocks)
    orbit = top.chain.fundamental_orbit(0) if top.chain.base else [0]
    stab = top.order() // len(orbit)
    print(f"blocks {len(blocks.blocks)} size {args.block_size}")
    print(f"image order {top.order()}")
    print(f"transitive {'true' if len(orbit) == len(blocks.blocks) else 'false'}")
    print(f"point stabilizer order {stab}")
    if args.wreath:
        h, _ = wreath_imprimitive(args.block_size, top)
        print(f"wreath order {h.order()}")
        d = derived_subgroup(h)
        print(f"wreath derived order {d.order()}")
        print(f"wreath derived equals group {'true' if same_group(d, g) else 'false'}")
    return EXIT_OK


def _center_elements(g: PermGroup, budget) -> list[Permutation]:
    from .oracle import enumerate_elements
    z = center(g, budget)
    if z.order() > 10**4:
        raise ValueError(f"center of order {z.order()} is too large to seed the class search")
    return list(enumerate_elements(z))


def _inventory(args, g: PermGroup, budget):
    if getattr(args, "inventory", None):
        return inventory_from_text(Path(args.inventory).read_text(), g.chain, budget)
    return enumerate_classes(g.chain, _center_elements(g, budget), make_rng(args.seed),
                             threads=args.threads, budget=budget)


def cmd_classes(args) -> int:
    g = _load_group(args)
    budget = _budget(args)
    if args.oracle:
        from .oracle import brute_classes
        cls = brute_classes(_oracle_table(g))
        print(len(cls))
        print(" ".join(str(len(c)) for c in cls))
        return EXIT_OK
    inv = _inventory(args, g, budget)
    if args.out:
        Path(args.out).write_text(inventory_to_text(inv))
    print(len(inv))
    return EXIT_OK


def cmd_witnesses(args) -> int:
    g = _load_group(args)
    budget = _budget(args)
    t = _center_t(g, budget)
    inv = _inventory(args, g, budget)
    wl = generate_witnesses(g.chain, inv, t, make_rng(args.seed), threads=args.threads)
    _emit(args, witnesses_to_text(wl, g.degree, args.seed))
    for j in wl.uncovered:
        kind = "commutator-free" if j in wl.proven else "appears commutator-free under budget"
        print(f"class {j} ({print_cycles(inv.classes[j].representative)}) {kind}", file=sys.stderr)
    if args.out:
        print(len(wl))
    return EXIT_OK


def cmd_check(args) -> int:
    g = _load_group(args)
    budget = _budget(args)
    if not args.witnesses:
        print("check needs --witnesses FILE", file=sys.stderr)
        return EXIT_PARSE
    pairs, degree, _ = witnesses_from_text(Path(args.witnesses).read_text())
    if degree != g.degree:
        raise ValueError(f"witness file has degree {degree}, group has degree {g.degree}")
    t = _center_t(g, budget)
    inv = _inventory(args, g, budget)
    if args.inventory:
        inv.certify_distinct()
    expected = args.expect if args.expect is not None else None
    res = check_commutators(g.chain, inv, pairs, t, expected)
    print(f"classes {len(inv)}")
    print(f"witness pairs {len(pairs)}")
    print(f"covered {res.covered} of {res.expected}")
    if t is not None:
        print(f"t class excluded {'false' if res.hits_t else 'true'}")
    print(res.message)
    return EXIT_OK if res.passed else EXIT_VERIFY


def cmd_verify(args) -> int:
    g = _load_group(args) if args.group else None
    rep = run_pipeline(args.seed, g, threads=args.threads, budget=_budget(args))
    text = rep.to_text()
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        Path(f"{out}.timings").write_text(rep.timings_text())
        if rep.witness_text is not None:
            Path(f"{out}.witnesses").write_text(rep.witness_text)
        if rep.inventory is not None:
            Path(f"{out}.inventory").write_text(inventory_to_text(rep.inventory))
    else:
        sys.stdout.write(text)
    print(rep.summary)
    if rep.theorem_reproduced:
        return EXIT_OK
    return EXIT_BUDGET if rep.budget_exhausted else EXIT_VERIFY


def _demo_groups():
    from .groupops import direct_product
    n8 = PermGroup([parse_cycles("(1,2,4,8)(3,6,7,5)", 8), parse_cycles("(1,3,4,7)(2,5,8,6)", 8)], 8, name="Q8")
    d8 = PermGroup([parse_cycles("(1,2,3,4)", 4), parse_cycles("(1,3)", 4)], 4, name="D8")
    c2 = PermGroup([parse_cycles("(1,2)", 2)], 2, name="C2")
    c4 = PermGroup([parse_cycles("(1,2,3,4)", 4)], 4, name="C4")
    q8xc2 = direct_product(n8, c2)
    q8xc2.name = "Q8xC2"
    d16 = PermGroup([parse_cycles("(1,2,3,4,5,6,7,8)", 8), parse_cycles("(2,8)(3,7)(4,6)", 8)], 8, name="D16")
    return [c2, c4, d8, n8, q8xc2, d16]


def cmd_quotient_demo(args) -> int:
    from .oracle import quotient_commutator_identity
    groups = [_load_group(args)] if args.group else _demo_groups()
    ok = True
    from .oracle import brute_center
    for g in groups:
        invol = [z for z in sorted(brute_center(_oracle_table(g)))
                 if not z.is_identity() and (z * z).is_identity()]
        if not invol:
            print(f"{g.name}: no central involution, skipped")
            continue
        t = invol[0]
        r = quotient_commutator_identity(g, t)
        good = r["order"] == r["expected_order"] and r["identity_holds"] \
            and r["designated_commutator"] == r["t_commutator"]
        ok &= good
        print(f"{g.name}: |G|={g.order()} t={print_cycles(t)} |K|={r['order']} "
              f"commutators(K)={r['commutators']} identity={'holds' if r['identity_holds'] else 'FAILS'} "
              f"(t,1)T commutator={'yes' if r['designated_commutator'] else 'no'}")
    if not args.group:
        order = build_machale_group().order()
        print(f"machale: |K| = {order}^2/2 = {order * order // 2} (not searched)")
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "order": cmd_order,
    "center": cmd_center,
    "derived": cmd_derived,
    "perfect": cmd_perfect,
    "blocks": cmd_blocks,
    "classes": cmd_classes,
    "witnesses": cmd_witnesses,
    "check": cmd_check,
    "verify": cmd_verify,
    "quotient-demo": cmd_quotient_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", metavar="FILE", help="group file (default: the embedded degree-44 group)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--threads", type=int, default=1, metavar="N")
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--oracle", action="store_true", help="brute-force path (small groups only)")
    common.add_argument("--budget-nodes", type=int, metavar="N")
    common.add_argument("--budget-secs", type=float, metavar="S")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="noncommutator", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "blocks":
            sp.add_argument("--block-size", type=int, default=2)
            sp.add_argument("--wreath", action="store_true",
                            help="also build the wreath product and compare its derived subgroup")
        if name in ("witnesses", "check"):
            sp.add_argument("--inventory", metavar="FILE")
        if name == "check":
            sp.add_argument("--witnesses", metavar="FILE")
            sp.add_argument("--expect", type=int, help="number of classes the witnesses must cover")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (GroupFileError, CycleNotationError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExhausted as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE if isinstance(e, ValueError) else EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
