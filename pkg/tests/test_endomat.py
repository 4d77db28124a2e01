from itertools import product

import pytest

from centralaut.abelian import elem_add, elem_scale, make_group
from centralaut.endomat import (
    EndoMatrix,
    apply,
    aut_order,
    canonicalize,
    class_count,
    compose,
    count_abc,
    decompose_diagonal,
    enumerate_abc,
    enumerate_autos,
    enumerate_endos,
    identity,
    in_Rp,
    is_automorphism,
    lower_bound_chain,
    matrix_order,
    satisfies_abc,
    theorem_lower_bound,
)
from centralaut.errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    ExponentTooSmall,
    HypothesisViolation,
    NotInRp,
    NotRestricted,
)


def test_in_Rp_examples():
    g = make_group(3, [1, 2])
    assert in_Rp(g, [[1, 0], [0, 1]])
    assert not in_Rp(g, [[1, 0], [1, 1]])
    assert in_Rp(g, [[1, 0], [3, 1]])
    with pytest.raises(DimensionMismatch):
        in_Rp(g, [[1]])


def test_canonicalize_examples():
    assert canonicalize(make_group(3, [2]), [[10]]).entries == ((1,),)
    assert canonicalize(make_group(3, [1, 2]), [[1, 0], [9, 1]]).entries == ((1, 0), (0, 1))
    assert canonicalize(make_group(3, [1, 1]), [[4, 3], [3, 4]]).is_identity()
    with pytest.raises(NotInRp):
        canonicalize(make_group(3, [1, 2]), [[1, 0], [1, 1]])


def test_canonical_classes_are_kernel_cosets():
    g = make_group(3, [1, 2])
    M = canonicalize(g, [[2, 5], [6, 4]])
    K = [[3, 3], [9, 18]]                           # p^{e_i} divides row i
    shifted = canonicalize(g, [[a + k for a, k in zip(r, kr)] for r, kr in zip(M.entries, K)])
    assert shifted == M
    assert all(apply(shifted, a) == apply(M, a) for a in g.elements())


def test_apply_examples():
    g = make_group(3, [1, 2])
    assert apply(canonicalize(g, [[1, 0], [3, 1]]), (1, 0)) == (1, 3)
    z9 = make_group(3, [2])
    M = canonicalize(z9, [[10]])
    # z -> z^10 evaluated by repeated addition
    for a in z9.elements():
        acc = z9.zero
        for _ in range(10):
            acc = elem_add(z9, acc, a)
        assert apply(M, a) == acc
    assert apply(M, (4,)) == (4,)


def test_compose_examples():
    g = make_group(3, [1, 1])
    swap = canonicalize(g, [[0, 1], [1, 0]])
    assert compose(swap, swap).is_identity()
    assert compose(swap, identity(g)) == swap


def test_compose_matches_function_composition():
    g = make_group(2, [1, 2])
    mats = list(enumerate_endos(g))
    els = list(g.elements())
    for A, B in product(mats[::3], mats[::5]):
        C = A @ B
        assert all(C(a) == A(B(a)) for a in els)


def test_is_automorphism_matches_bijectivity():
    g = make_group(2, [1, 2])
    M = canonicalize(g, [[1, 1], [0, 1]])
    assert is_automorphism(M)
    assert len({apply(M, a) for a in g.elements()}) == 8
    assert not is_automorphism(canonicalize(make_group(3, [1, 1]), [[1, 1], [1, 1]]))
    els = list(g.elements())
    for M in enumerate_endos(g):
        assert is_automorphism(M) == (len({apply(M, a) for a in els}) == len(els))


@pytest.mark.parametrize("p, exps, want", [((5), [2], 20), (3, [1, 1], 48), (2, [1, 2], 8), (3, [1, 2], 108)])
def test_aut_order_examples(p, exps, want):
    assert aut_order(make_group(p, exps)) == want


def test_aut_order_unit_counts():
    from math import gcd
    assert aut_order(make_group(5, [2])) == sum(gcd(a, 25) == 1 for a in range(25))


@pytest.mark.parametrize("p, exps, endos, autos", [
    (3, [1], 3, 2),
    (2, [1, 1], 16, 6),
    (3, [1, 2], None, 108),
    (2, [1, 1, 2], None, None),
    (2, [2, 3], None, None),
])
def test_enumeration_counts(p, exps, endos, autos):
    g = make_group(p, exps)
    E = list(enumerate_endos(g))
    assert len(E) == len(set(E)) == class_count(g)
    if endos is not None:
        assert len(E) == endos
    A = list(enumerate_autos(g))
    assert len(A) == aut_order(g)
    if autos is not None:
        assert len(A) == autos


def test_enumeration_bound():
    with pytest.raises(EnumerationTooLarge):
        list(enumerate_endos(make_group(3, [2, 2, 2]), bound=1000))


def _brute_endomorphisms(g):
    """Every homomorphism H -> H, found from the images of the basis elements."""
    els = list(g.elements())
    found = set()
    for images in product(els, repeat=g.n):
        # z_i has order p^{e_i}, so its image must be killed by p^{e_i}
        if any(elem_scale(g, m, im) != g.zero for m, im in zip(g.moduli, images)):
            continue
        f = {}
        for a in els:
            v = g.zero
            for c, im in zip(a, images):
                v = elem_add(g, v, elem_scale(g, c, im))
            f[a] = v
        found.add(tuple(f[a] for a in els))
    return found


@pytest.mark.parametrize("p, exps", [(2, [1, 2]), (3, [1, 2]), (2, [1, 1, 2]), (2, [2, 3]), (3, [1, 1])])
def test_matrix_model_is_bijective_onto_End(p, exps):
    g = make_group(p, exps)
    els = list(g.elements())
    via_matrices = {}
    for M in enumerate_endos(g):
        key = tuple(apply(M, a) for a in els)
        assert key not in via_matrices, "two canonical matrices give one endomorphism"
        via_matrices[key] = M
    assert set(via_matrices) == _brute_endomorphisms(g)


def test_satisfies_abc_examples():
    assert satisfies_abc(identity(make_group(3, [2, 3])))
    assert satisfies_abc(canonicalize(make_group(3, [3]), [[10]]))
    g = make_group(3, [2, 2])
    assert not satisfies_abc(canonicalize(g, [[1, 3], [0, 1]]))
    assert not satisfies_abc(canonicalize(make_group(3, [3]), [[4]]))


@pytest.mark.parametrize("exps, want", [([2, 2], 1), ([3], 3), ([3, 3, 3], 3 ** 9), ([2], 1)])
def test_count_abc_examples(exps, want):
    g = make_group(3, exps)
    assert count_abc(g) == want
    if want <= 10 ** 5:
        assert sum(1 for _ in enumerate_abc(g)) == want


def test_count_abc_requires_e1_at_least_2():
    with pytest.raises(ExponentTooSmall):
        count_abc(make_group(3, [1, 2]))


def test_theorem_lower_bound_examples():
    assert theorem_lower_bound(make_group(3, [3, 3, 3])) == 3 ** 9
    assert theorem_lower_bound(make_group(3, [3, 3, 3, 3])) == 3 ** 16
    with pytest.raises(HypothesisViolation) as exc:
        theorem_lower_bound(make_group(3, [2, 2, 2]))
    assert len(exc.value.failed) == 1
    with pytest.raises(HypothesisViolation) as exc:
        theorem_lower_bound(make_group(3, [2, 2]))
    assert len(exc.value.failed) == 2


def test_lower_bound_chain_shape():
    for exps in ([3, 3, 3], [3, 4, 5, 6], [3, 3, 6, 6, 6]):
        s = lower_bound_chain(make_group(5, exps))
        assert s[0] >= s[1] == s[2] >= s[3] == s[4]
        assert s[0] == count_abc(make_group(5, exps))
        assert s[4] == theorem_lower_bound(make_group(5, exps))


def test_decompose_diagonal():
    rp = decompose_diagonal(canonicalize(make_group(3, [3]), [[10]]))
    assert (rp.s, rp.r) == ((1,), (2,))
    rp = decompose_diagonal(canonicalize(make_group(3, [4]), [[28]]))
    assert (rp.s, rp.r) == ((1,), (3,))
    rp = decompose_diagonal(identity(make_group(3, [3, 4])))
    assert rp.s == (0, 0)
    g = make_group(5, [4, 4])
    for M in list(enumerate_abc(g))[:200]:
        rp = decompose_diagonal(M)
        for i, e in enumerate(g.exponents):
            assert rp.r[i] >= 2
            assert (1 + rp.s[i] * 5 ** rp.r[i] - M[i, i]) % 5 ** e == 0
    with pytest.raises(NotRestricted):
        decompose_diagonal(canonicalize(make_group(3, [3]), [[4]]))


def test_restricted_elements_have_p_power_order():
    g = make_group(3, [2, 3])
    for M in enumerate_abc(g):
        o = matrix_order(M)
        while o % 3 == 0:
            o //= 3
        assert o == 1


def test_endomatrix_json_roundtrip():
    M = canonicalize(make_group(3, [1, 2]), [[2, 1], [3, 4]])
    assert EndoMatrix.from_json(M.to_json()) == M


def test_endomatrix_rejects_unreduced():
    with pytest.raises(ValueError):
        EndoMatrix(make_group(3, [1]), ((4,),))
