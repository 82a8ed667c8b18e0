import pytest
from hypothesis import given, strategies as st

from noncommutator.perm import (CycleNotationError, Permutation, commutator, compose, cycle_type,
                                cycles, element_order, from_cycles, inverse, parse_cycles,
                                print_cycles)


@st.composite
def perms(draw, max_degree=64, degree=None):
    n = degree if degree is not None else draw(st.integers(1, max_degree))
    return Permutation(draw(st.permutations(range(n))))


@st.composite
def perm_pairs(draw, k=2):
    n = draw(st.integers(1, 24))
    return tuple(draw(perms(degree=n)) for _ in range(k))


def test_compose_left_to_right():
    p = parse_cycles("(1,2)", 3)
    q = parse_cycles("(1,3)", 3)
    assert compose(p, q) == parse_cycles("(1,2,3)", 3)
    assert compose(p, q).images == tuple(q.images[p.images[i]] for i in range(3))


def test_compose_identity_and_inverse():
    p = parse_cycles("(1,4,2)(3,5)", 5)
    e = Permutation.identity(5)
    assert compose(p, e) == p
    assert compose(p, inverse(p)) == e


def test_compose_degree_mismatch():
    with pytest.raises(ValueError):
        compose(Permutation.identity(3), Permutation.identity(4))
    with pytest.raises(ValueError):
        commutator(Permutation.identity(3), Permutation.identity(4))


def test_inverse_examples():
    assert inverse(Permutation.identity(4)).is_identity()
    assert inverse(parse_cycles("(1,2,3)", 3)) == parse_cycles("(1,3,2)", 3)


def test_commutator_examples():
    a = parse_cycles("(1,2)", 3)
    b = parse_cycles("(1,3)", 3)
    assert commutator(a, b) == parse_cycles("(1,3,2)", 3)
    assert commutator(Permutation.identity(3), b).is_identity()
    assert commutator(a, a).is_identity()
    assert commutator(a, b) == ~a * ~b * a * b


def test_parse_first_generator():
    p = parse_cycles("(1,2)(43,44)", 44)
    assert p(0) == 1 and p(1) == 0 and p(42) == 43 and p(43) == 42
    assert sum(1 for i in range(44) if p(i) != i) == 4


@pytest.mark.parametrize("text", ["", "()", "  ( ) "])
def test_parse_identity(text):
    assert parse_cycles(text, 5).is_identity()


@pytest.mark.parametrize("text", ["(1,2)(2,3)", "(1,2,1)", "(1,6)", "(0,1)", "(1,2", "1,2)", "(1)", "(1,,2)",
                                  "(a,b)", "(1,2))"])
def test_parse_errors(text):
    with pytest.raises(CycleNotationError):
        parse_cycles(text, 5)


def test_parse_whitespace_and_split_cycles():
    assert parse_cycles("(3,22, 26,10,44,4)", 44) == parse_cycles("(3,22,26,10,44,4)", 44)
    assert parse_cycles(" ( 1 , 2 ) ( 3 ,4)", 4) == from_cycles([[0, 1], [2, 3]], 4)


def test_print_canonical():
    assert print_cycles(Permutation.identity(3)) == "()"
    assert print_cycles(Permutation([1, 0, 2])) == "(1,2)"
    assert print_cycles(parse_cycles("(5,3,4)(2,1)", 5)) == "(1,2)(3,4,5)"


def test_cycle_type_and_order():
    assert cycle_type(Permutation.identity(4)) == (1, 1, 1, 1)
    assert element_order(Permutation.identity(4)) == 1
    p = parse_cycles("(1,2,3)(4,5)", 5)
    assert sorted(cycle_type(p)) == [2, 3]
    assert element_order(p) == 6


def test_permutation_validation():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])
    with pytest.raises(ValueError):
        Permutation([0, 3])


@given(perms())
def test_roundtrip(p):
    assert parse_cycles(print_cycles(p), p.degree) == p


@given(perm_pairs(3))
def test_associative(t):
    p, q, r = t
    assert compose(compose(p, q), r) == compose(p, compose(q, r))


@given(perm_pairs(2))
def test_conjugation_invariance(t):
    p, x = t
    assert cycle_type(p.conjugate(x)) == cycle_type(p)
    assert sum(cycle_type(p)) == p.degree


@given(perm_pairs(2))
def test_commutator_trivial_iff_commute(t):
    a, b = t
    assert commutator(a, b).is_identity() == (compose(a, b) == compose(b, a))


@given(perms(max_degree=20))
def test_order_is_minimal(p):
    k = element_order(p)
    assert (p ** k).is_identity()
    assert all(not (p ** j).is_identity() for j in range(1, k))


@given(perms(max_degree=30))
def test_inverse_laws(p):
    assert inverse(inverse(p)) == p
    assert all(inverse(p).images[p.images[i]] == i for i in range(p.degree))
    assert sorted(x for c in cycles(p) for x in c) == sorted(i for i in range(p.degree) if p(i) != i)
