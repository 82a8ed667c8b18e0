import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _groups import alternating, cyclic, group, symmetric, trivial
from noncommutator import _kernels as K
from noncommutator.bsgs import (PermGroup, build_chain, chain_with_base, contains, group_order,
                                make_rng, same_group, subgroup_of, uniform_random)
from noncommutator.oracle import enumerate_elements, random_small_group
from noncommutator.perm import Permutation, parse_cycles

small_groups = st.integers(0, 2**32 - 1).map(lambda s: random_small_group(make_rng(s)))


def chi2_critical(df, z=3.09):
    # Wilson-Hilferty approximation of the upper 0.001 quantile
    return df * (1 - 2 / (9 * df) + z * math.sqrt(2 / (9 * df))) ** 3


def test_s4_order():
    assert group_order(build_chain(group(4, "(1,2)", "(1,2,3,4)"), seed=3)) == 24


def test_trivial_order():
    assert build_chain(trivial(5)).order == 1
    assert build_chain(PermGroup([], 3)).order == 1


def test_machale_order():
    from noncommutator.machale import build_machale_group
    chain = build_chain(build_machale_group(), seed=11)
    assert chain.order == 16609443840
    assert chain.verified == "schreier"


def test_order_independent_of_seed():
    g = group(9, "(1,2,3)(4,5,6)", "(1,4,7)(2,5,8)(3,6,9)", "(1,2)")
    orders = {build_chain(g, seed=s).order for s in range(6)}
    assert orders == {enumerate_elements(g).__len__()}


def test_contains_examples():
    a4 = alternating(4)
    chain = a4.chain
    assert all(contains(chain, s) for s in a4.generators)
    assert contains(chain, Permutation.identity(4))
    assert not contains(chain, parse_cycles("(1,2)", 4))
    with pytest.raises(ValueError):
        contains(chain, Permutation.identity(5))


def test_uniform_trivial():
    chain = trivial(3).chain
    rng = make_rng(1)
    assert all(uniform_random(chain, rng).is_identity() for _ in range(20))


def test_uniform_c2():
    chain = cyclic(2).chain
    rng = make_rng(2)
    n = 10_000
    hits = sum(not uniform_random(chain, rng).is_identity() for _ in range(n))
    assert abs(hits - n / 2) < 3 * math.sqrt(n / 4)


@pytest.mark.parametrize("g", [symmetric(3), symmetric(5), group(6, "(1,2,3)", "(4,5)", "(5,6)")],
                         ids=["S3", "S5", "C3xS3"])
def test_uniform_chi2(g):
    rng = make_rng(5)
    n = 10_000 if g.order() < 20 else 100_000
    counts = Counter(g.chain.random_element(rng) for _ in range(n))
    table = enumerate_elements(g)
    assert set(counts) <= set(table)
    m = len(table)
    chi2 = sum((counts.get(x, 0) - n / m) ** 2 / (n / m) for x in table)
    assert chi2 < chi2_critical(m - 1)


def test_subgroup_and_same_group():
    a4, s4 = alternating(4), symmetric(4)
    assert same_group(s4, s4)
    assert subgroup_of(a4, s4.chain)
    assert not subgroup_of(s4, a4.chain)
    assert not same_group(a4, s4)
    with pytest.raises(ValueError):
        same_group(a4, symmetric(5))


def test_chain_with_base_same_group():
    g = symmetric(6)
    c = chain_with_base(g.chain, [5, 3, 1], make_rng(0))
    assert c.base[:3] == (5, 3, 1)
    assert c.order == 720
    assert all(c.contains(s) for s in g.generators)


def test_chain_arrays_read_only():
    c = symmetric(4).chain
    with pytest.raises(ValueError):
        c.trans[0, 0, 0] = 1


def _check_chain(g: PermGroup, chain):
    # every generator sifts, transversals map base points correctly,
    # and strong generator x transversal products sift at their level
    for s in g.generators:
        assert chain.contains(s)
    for lev, beta in enumerate(chain.base):
        for d in chain.fundamental_orbit(lev):
            assert chain.transversal_element(lev, d)(beta) == d
        for s in chain.level_generators(lev):
            for d in chain.fundamental_orbit(lev):
                u = chain.trans[lev, d]
                su = K.compose(u, s)
                back = chain.tinv[lev, s[d]]
                r, stop = K.sift(K.compose(su, back), lev + 1, chain.base_array, chain.tinv, chain.inorb)
                assert K.is_identity(r)
    assert math.prod(chain.orbit_sizes) == chain.order


@given(small_groups)
@settings(max_examples=40)
def test_order_and_membership_match_oracle(g):
    chain = build_chain(g, seed=7)
    table = enumerate_elements(g)
    assert chain.order == len(table)
    _check_chain(g, chain)
    assert all(chain.contains(x) for x in list(table)[:200])
    rng = np.random.default_rng(0)
    for _ in range(30):
        x = Permutation(rng.permutation(g.degree))
        assert chain.contains(x) == (x in table)
