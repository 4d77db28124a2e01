"""Randomised properties over small abelian p-groups and restricted matrices."""
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centralaut.abelian import elem_add, elem_order, make_group
from centralaut.endomat import (
    apply,
    canonicalize,
    class_count,
    compose,
    count_abc,
    in_Rp,
    is_automorphism,
    random_abc,
    satisfies_abc,
)
from centralaut.errors import NotInRp

groups = st.builds(
    lambda p, exps: make_group(p, exps),
    st.sampled_from([2, 3, 5]),
    st.lists(st.integers(1, 4), min_size=1, max_size=3),
)


@st.composite
def group_and_matrix(draw, g=None):
    g = g or draw(groups)
    raw = [[draw(st.integers(0, g.moduli[i] - 1)) * (g.p ** max(g.exponents[i] - g.exponents[j], 0) if j < i else 1)
            for j in range(g.n)] for i in range(g.n)]
    return g, canonicalize(g, raw)


@st.composite
def element(draw, g):
    return tuple(draw(st.integers(0, m - 1)) for m in g.moduli)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_apply_is_additive(data):
    g, M = data.draw(group_and_matrix())
    a, b = data.draw(element(g)), data.draw(element(g))
    assert apply(M, elem_add(g, a, b)) == elem_add(g, apply(M, a), apply(M, b))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_compose_is_function_composition(data):
    g, A = data.draw(group_and_matrix())
    _, B = data.draw(group_and_matrix(g))
    a = data.draw(element(g))
    assert apply(compose(A, B), a) == apply(A, apply(B, a))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_kernel_shift_is_invisible(data):
    g, M = data.draw(group_and_matrix())
    shift = [[data.draw(st.integers(-3, 3)) * g.moduli[i] for _ in range(g.n)] for i in range(g.n)]
    raw = [[M[i, j] + shift[i][j] for j in range(g.n)] for i in range(g.n)]
    assert canonicalize(g, raw) == M


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_automorphisms_preserve_orders(data):
    g, M = data.draw(group_and_matrix())
    a = data.draw(element(g))
    if is_automorphism(M):
        assert elem_order(g, apply(M, a)) == elem_order(g, a)
    else:
        assert elem_order(g, apply(M, a)) <= elem_order(g, a)


@settings(max_examples=100, deadline=None)
@given(groups, st.integers(0, 10 ** 6))
def test_restricted_products_stay_restricted(g, seed):
    rng = random.Random(seed)
    A, B = random_abc(g, rng), random_abc(g, rng)
    assert satisfies_abc(A) and satisfies_abc(B)
    C = A @ B
    assert satisfies_abc(C) and is_automorphism(C)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5]), st.lists(st.integers(2, 6), min_size=1, max_size=5))
def test_count_abc_is_a_p_power_inside_the_identity_slice(p, exps):
    g = make_group(p, exps)
    c = count_abc(g)
    # every restricted matrix reduces to I mod p
    assert c <= class_count(g) // p ** (g.n * g.n)
    while c % p == 0:
        c //= p
    assert c == 1


@settings(max_examples=100, deadline=None)
@given(groups, st.integers(0, 10 ** 6))
def test_entries_outside_Rp_are_rejected(g, seed):
    rng = random.Random(seed)
    lower = [(i, j) for i in range(g.n) for j in range(i) if g.exponents[i] > g.exponents[j]]
    if not lower:
        return
    i, j = rng.choice(lower)
    raw = [[1 if r == c else 0 for c in range(g.n)] for r in range(g.n)]
    raw[i][j] = 1
    assert not in_Rp(g, raw)
    with pytest.raises(NotInRp):
        canonicalize(g, raw)
