import random

import numpy as np
import pytest

from centralaut import corpus
from centralaut.abelian import make_group
from centralaut.endomat import canonicalize, count_abc, identity, random_abc
from centralaut.errors import (
    CocycleIdentityFailed,
    DimensionMismatch,
    HypothesisViolation,
    NotNormalized,
    NotPCentral,
    NotRestricted,
)
from centralaut.extension import (
    GAutomorphism,
    beta_table,
    bilinear_cocycle,
    build_extension,
    center_of,
    check_homomorphism,
    construct_chi,
    dagger_check,
    elementary_group,
    extend_automorphism,
    extension_family,
    extension_from_json,
    family_closure,
    hypotheses,
    is_p2_abelian,
    is_p_central,
    star_coefficients,
    trivial_group,
    verify_star,
)
from centralaut.oracle import (
    brute_aut,
    center_and_inn,
    table_from_extension,
    table_is_p2_abelian,
    table_is_p_central,
)


@pytest.fixture(scope="module")
def E1():
    return corpus.extension("E1")


@pytest.fixture(scope="module")
def E1_table(E1):
    return table_from_extension(E1)


def test_trivial_quotient_is_Z():
    Z = make_group(3, [2])
    G = build_extension(trivial_group(), Z, np.zeros((1, 1, 1), dtype=object))
    assert G.order == 9
    assert center_of(G).order == 9
    T = table_from_extension(G)
    assert T.is_cyclic() and T.order == 9


def test_zero_cocycle_is_direct_product():
    Q, Z = elementary_group(3, 2), make_group(3, [1])
    G = build_extension(Q, Z, np.zeros((9, 9, 1), dtype=object))
    T = table_from_extension(G)
    assert T.is_abelian() and T.exponent == 3
    assert center_of(G).order == 27


def test_E1_is_nonabelian(E1):
    a, b = E1.t(E1.Q.labels.index((1, 0))), E1.t(E1.Q.labels.index((0, 1)))
    assert E1.mul(a, b) != E1.mul(b, a)
    assert E1.order == 243


def test_group_law(E1):
    rng = random.Random(3)
    for _ in range(300):
        g, h, k = (E1.random_element(rng) for _ in range(3))
        assert E1.mul(E1.mul(g, h), k) == E1.mul(g, E1.mul(h, k))
        assert E1.mul(g, E1.inv(g)) == E1.identity
    z = (E1.Q.identity, (5,))
    assert all(E1.mul(z, g) == E1.mul(g, z) for g in E1.elements())


def test_every_single_entry_corruption_is_caught(E1):
    mu = E1.mu
    caught = 0
    for x in range(1, 9):
        for y in range(1, 9):
            bad = mu.copy()
            bad.setflags(write=True)
            bad[x, y, 0] = (bad[x, y, 0] + 1) % 27
            with pytest.raises(CocycleIdentityFailed):
                build_extension(E1.Q, E1.Z, bad)
            caught += 1
    assert caught == 64


def test_normalisation_and_shape_checked(E1):
    bad = E1.mu.copy()
    bad.setflags(write=True)
    bad[0, 3, 0] = 1
    with pytest.raises(NotNormalized):
        build_extension(E1.Q, E1.Z, bad)
    with pytest.raises(DimensionMismatch):
        build_extension(E1.Q, E1.Z, np.zeros((9, 9, 2), dtype=object))


def test_center_E1_matches_oracle(E1, E1_table):
    c = center_of(E1)
    assert c.order == 27 and c.equals_z_factor and c.mode == "exhaustive"
    assert len(E1_table.center) == 27
    reduced = center_of(E1, bound=0)
    assert reduced.mode == "reduced" and reduced.q_part == c.q_part


@pytest.mark.parametrize("name", list(corpus.EXTENSIONS))
def test_predicates_exact_vs_reduced_vs_table(name):
    G = corpus.extension(name)
    reduced = (is_p_central(G, bound=0), is_p2_abelian(G, bound=0), center_of(G, bound=0).q_part)
    if G.order <= 729:
        exhaustive = (is_p_central(G), is_p2_abelian(G), center_of(G).q_part)
        assert exhaustive == reduced
        T = table_from_extension(G)
        assert table_is_p_central(T, G.p) == reduced[0]
        assert table_is_p2_abelian(T, G.p) == reduced[1]
    assert reduced[0] and reduced[1] and reduced[2] == (G.Q.identity,)


def test_predicates_detect_failures():
    d16 = corpus.table("dihedral16")
    assert not table_is_p_central(d16, 2) and not table_is_p2_abelian(d16, 2)
    # Q = C2 x C2, Z = C2, mu = x_2 y_1 is a nonabelian group of order 8
    Q, Z = elementary_group(2, 2), make_group(2, [1])
    D8 = build_extension(Q, Z, bilinear_cocycle(Q, Z, [[0, 0], [1, 0]]))
    assert is_p_central(D8) == table_is_p_central(table_from_extension(D8), 2)
    h = hypotheses(D8)
    assert not h["p_odd"]
    with pytest.raises(HypothesisViolation) as exc:
        extend_automorphism(D8, identity(Z))
    assert "p_odd" in exc.value.failed


def test_predicates_false_above_bound():
    Q, Z = elementary_group(3, 3), make_group(3, [1])
    mu = bilinear_cocycle(Q, Z, [[0, 0, 0], [1, 0, 0], [0, 0, 0]])
    G = build_extension(Q, Z, mu)
    # e_3 is central in G but outside the Z-factor
    assert not center_of(G).equals_z_factor
    assert not center_of(G, bound=0).equals_z_factor
    with pytest.raises(HypothesisViolation) as exc:
        extension_family(G)
    assert exc.value.failed == ["center_is_z"]


def test_dagger(E1):
    assert dagger_check(E1)
    for name in corpus.EXTENSIONS:
        assert dagger_check(corpus.extension(name))


def test_star_coefficients(E1):
    s = star_coefficients(E1, 0, 0)
    assert s.alpha == s.beta == s.gamma == s.delta == s.k == (0,)
    x, y = E1.Q.labels.index((1, 0)), E1.Q.labels.index((0, 1))
    s = star_coefficients(E1, x, y)
    assert s.alpha == (0,)
    E2 = corpus.extension("E2")
    p = 3
    for x in range(9):
        for y in range(9):
            s = star_coefficients(E2, x, y)
            assert s.alpha[0] * p * p == (s.beta[0] + s.gamma[0] + s.delta[0]) * p + s.k[0] * 27


def test_star_coefficients_requires_p_central():
    Q = corpus.metacyclic(9, 3, 4, 0)         # modular group of order 27 as a bare Q
    G = build_extension(Q, make_group(3, [1]), np.zeros((27, 27, 1), dtype=object))
    a = Q.labels.index((1, 0))                  # order 9: t(a)^3 is not in the Z-factor
    with pytest.raises(NotPCentral):
        star_coefficients(G, a, 0)


def test_chi_identity_is_zero(E1):
    chi = construct_chi(E1, identity(E1.Z))
    assert all(c == (0,) for c in chi)


def test_chi_on_cyclic_center_is_p_squared_power():
    G = corpus.extension("E2")
    theta = canonicalize(G.Z, [[10]])
    chi = construct_chi(G, theta)
    beta = beta_table(G)
    assert [c[0] for c in chi] == [3 * b[0] % 27 for b in beta]
    # chi(x) = t(x)^{p^2}, computed inside G
    for x in range(9):
        assert G.power(G.t(x), 9) == (G.Q.identity, chi[x])
    assert any(c != (0,) for c in chi)
    assert verify_star(G, theta, chi)


def test_chi_on_E1(E1):
    theta = canonicalize(E1.Z, [[10]])
    chi = construct_chi(E1, theta)
    assert [c[0] for c in chi] == [3 * b[0] % 27 for b in beta_table(E1)]
    assert verify_star(E1, theta, chi)


def test_chi_rejects_unrestricted(E1):
    with pytest.raises(NotRestricted):
        construct_chi(E1, canonicalize(E1.Z, [[4]]))
    with pytest.raises(NotRestricted):
        extend_automorphism(E1, canonicalize(E1.Z, [[4]]))


def test_zero_chi_fails_star_when_needed():
    G = corpus.extension("E2")
    zero = tuple(G.Z.zero for _ in range(9))
    assert not verify_star(G, canonicalize(G.Z, [[10]]), zero)
    assert verify_star(G, identity(G.Z), zero)


def test_extend_identity_is_identity(E1):
    gamma = extend_automorphism(E1, identity(E1.Z))
    assert gamma.is_identity()
    assert all(gamma(g) == g for g in E1.elements())


def test_extend_E1(E1, E1_table):
    theta = canonicalize(E1.Z, [[10]])
    gamma = extend_automorphism(E1, theta, homomorphism="exhaustive")
    assert gamma.verified["homomorphism"] == "exhaustive"
    assert gamma.verified["identity_on_quotient"] and gamma.verified["non_inner"]
    for n in E1.Z.elements():
        assert gamma((E1.Q.identity, n)) == (E1.Q.identity, tuple(10 * v % 27 for v in n))
    _, inner = center_and_inn(E1_table)
    assert tuple(int(i) for i in gamma.permutation()) not in set(inner)


def test_broken_lift_is_detected(E1):
    E2 = corpus.extension("E2")
    theta = canonicalize(E2.Z, [[10]])
    wrong = GAutomorphism(E2, theta, tuple(E2.Z.zero for _ in range(9)))
    from centralaut.errors import HomomorphismCheckFailed
    with pytest.raises(HomomorphismCheckFailed):
        check_homomorphism(wrong, "exhaustive")
    with pytest.raises(HomomorphismCheckFailed):
        check_homomorphism(wrong, "sampled", samples=2000)


def test_family_E1(E1, E1_table):
    fam = extension_family(E1)
    assert len(fam) == 3
    assert len({g.key() for g in fam}) == 3
    assert sorted(g.order() for g in fam) == [1, 3, 3]
    auts = set(brute_aut(E1_table))
    assert all(tuple(int(i) for i in g.permutation()) in auts for g in fam)
    c = family_closure(fam)
    assert c.restricted and c.trivial_on_quotient and c.exact and c.mode == "exhaustive"


def test_family_closure_is_up_to_P_on_E2():
    fam = extension_family(corpus.extension("E2"))
    c = family_closure(fam)
    assert c.restricted and c.trivial_on_quotient
    # composites agree with a member on Z and on G/Z, but chi may differ
    assert not c.exact
    keys = {g.theta for g in fam}
    for i, j in c.non_members:
        assert fam[i].compose(fam[j]).theta in keys


def test_family_abelian_z333():
    G = corpus.extension("abelian_z333")
    fam = extension_family(G, homomorphism="none")
    assert len(fam) == count_abc(G.Z) == 19683
    c = family_closure(fam, max_pairs=300)
    assert c.mode == "sampled" and c.restricted and c.exact


def test_family_trivial_when_e1_is_2():
    d = {"p": 3, "q": {"type": "trivial"}, "z": {"p": 3, "exponents": [2]}}
    fam = extension_family(extension_from_json(d))
    assert len(fam) == 1 and fam[0].is_identity()


def test_family_orders_are_p_powers():
    G = corpus.extension("modular125")
    fam = extension_family(G)
    for g in fam:
        o = g.order()
        while o % 5 == 0:
            o //= 5
        assert o == 1


def test_theorem_group_E3_sampled():
    G = corpus.extension("E3")
    assert G.order == 3 ** 11
    h = hypotheses(G)
    assert h["mode"] == "reduced" and all(h[k] for k in ("p_odd", "p_central", "p2_abelian", "center_is_z"))
    rng = random.Random(7)
    for _ in range(5):
        theta = random_abc(G.Z, rng)
        gamma = extend_automorphism(G, theta, samples=2000)
        assert gamma.verified["homomorphism"] == "sampled"
        assert verify_star(G, theta, gamma.chi)


def test_json_roundtrip(E1):
    G = extension_from_json(E1.to_json())
    assert np.array_equal(G.flat_table, E1.flat_table)
    gamma = extend_automorphism(E1, canonicalize(E1.Z, [[10]]))
    d = gamma.to_json()
    assert d["theta"] == [[10]] and set(d["verified"]) >= {"homomorphism", "identity_on_quotient", "non_inner"}


def test_bad_descriptors():
    from centralaut.errors import InputError
    with pytest.raises(InputError):
        extension_from_json({"p": 3, "q": {"type": "weird"}, "z": {"p": 3, "exponents": [1]}})
    with pytest.raises(InputError):
        extension_from_json({"p": 5, "q": {"type": "trivial"}, "z": {"p": 3, "exponents": [1]}})
    with pytest.raises(InputError):
        extension_from_json({"p": 3, "q": {"type": "trivial"}})
