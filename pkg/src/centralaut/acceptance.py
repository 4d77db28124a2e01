"""Acceptance checks, shared by the test suite and ``centralaut selftest``.

Each ``criterion_*`` function returns a CheckResult.  Ground truth always
comes from a computation that does not share code with the quantity being
checked: brute-force automorphism search, unit counting with gcd,
determinants mod p over every matrix, literal predicates over raw residue
matrices.

``scale="small"`` trims the sweeps so the whole suite runs in about a
minute; ``scale="full"`` runs them at their stated extent.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import permutations, product
from math import gcd, prod

import numpy as np
from sympy.utilities.iterables import partitions

from . import corpus
from .abelian import make_group
from .endomat import (
    aut_order,
    canonicalize,
    count_abc,
    enumerate_abc,
    lower_bound_chain,
    random_abc,
    theorem_lower_bound,
)
from .errors import CocycleIdentityFailed, NotRestricted
from .extension import (
    CentralExtensionGroup,
    center_of,
    construct_chi,
    dagger_check,
    extend_automorphism,
    extension_family,
    hypotheses,
    star_coefficients,
    verify_star,
)
from .oracle import brute_aut, brute_aut_count, center_and_inn, check_conjecture_A, abelian_table, table_from_extension

SCALES = ("small", "full")


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    limit: float | None = None
    failures: list = field(default_factory=list)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        budget = f" / limit {self.limit:.0f}s" if self.limit else ""
        return f"[{verdict}] criterion {self.number}: {self.title} ({self.detail}; {self.seconds:.1f}s{budget})"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "status": "pass" if self.passed else "fail",
                "detail": self.detail, "seconds": round(self.seconds, 3), "limit": self.limit,
                "failures": [str(f) for f in self.failures[:20]]}


def _timed(number, title, limit=None):
    def wrap(fn):
        def run(scale: str = "full") -> CheckResult:
            if scale not in SCALES:
                raise ValueError(f"unknown scale {scale!r}")
            t0 = time.perf_counter()
            passed, detail, failures = fn(scale)
            dt = time.perf_counter() - t0
            if limit is not None and dt > limit:
                passed = False
                detail += f"; exceeded time limit {limit}s"
            return CheckResult(number, title, passed, detail, dt, limit, failures)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def exponent_tuples(total: int, min_part: int = 1):
    """Ascending exponent lists with the given sum and every part >= min_part."""
    for part in partitions(total):
        if min(part) >= min_part:
            yield sorted(e for e, c in part.items() for _ in range(c))


# -- 1 -------------------------------------------------------------------------------

@_timed(1, "aut_order equals brute force for every abelian p-group of order <= 729", limit=300)
def criterion_1(scale):
    cap = 729 if scale == "full" else 243
    failures, n = [], 0
    for p in (2, 3, 5):
        k = 1
        while p ** k <= cap:
            for ex in exponent_tuples(k):
                g = make_group(p, ex)
                brute = brute_aut_count(abelian_table(g), bound=cap)
                n += 1
                if brute != aut_order(g):
                    failures.append((p, ex, brute, aut_order(g)))
            k += 1
    return not failures, f"{n} groups, {len(failures)} mismatches, order cap {cap}", failures


# -- 2 -------------------------------------------------------------------------------

def unit_count(m: int) -> int:
    return sum(1 for a in range(m) if gcd(a, m) == 1)


def gl_count(p: int, n: int) -> int:
    """Count n x n matrices over F_p with nonzero determinant, by enumeration."""
    entries = np.array(list(product(range(p), repeat=n * n)), dtype=np.int64).reshape(-1, n, n)
    det = np.zeros(len(entries), dtype=np.int64)
    for perm in permutations(range(n)):
        sign = (-1) ** sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = np.ones(len(entries), dtype=np.int64)
        for i in range(n):
            term = term * entries[:, i, perm[i]] % p
        det += sign * term
    return int(np.count_nonzero(det % p))


@_timed(2, "cyclic and elementary abelian anchors")
def criterion_2(scale):
    failures, n = [], 0
    for p in (2, 3, 5):
        for e in range(1, 6):
            got, want = aut_order(make_group(p, [e])), unit_count(p ** e)
            n += 1
            if not got == want == (p - 1) * p ** (e - 1):
                failures.append(("cyclic", p, e, got, want))
        for r in range(1, 4):
            got, want = aut_order(make_group(p, [1] * r)), gl_count(p, r)
            n += 1
            if not got == want == prod(p ** r - p ** k for k in range(r)):
                failures.append(("elementary", p, r, got, want))
    return not failures, f"{n} anchors, {len(failures)} mismatches", failures


# -- 3 -------------------------------------------------------------------------------

def literal_restricted_count(p: int, exps) -> int:
    """Count canonical matrices satisfying the restricted congruences, straight from the definitions.

    Only matrices congruent to I mod p can qualify, so row i ranges over
    residues mod p^{e_i} that are 1 (diagonal) or 0 (elsewhere) mod p.
    """
    n = len(exps)
    choices = []
    for i in range(n):
        for j in range(n):
            m = p ** exps[i]
            choices.append([a for a in range(m) if a % p == (1 if i == j else 0)])
    count = 0
    for flat in product(*choices):
        ok = True
        for i in range(n):
            for j in range(n):
                a, ei, ej = flat[i * n + j], exps[i], exps[j]
                if j < i and a % p ** (ei - ej):
                    ok = False                                # not in R_p
                elif i == j and (a - 1) % p ** 2:
                    ok = False
                elif i != j and ei >= ej and a % p ** (ei - ej + 2):
                    ok = False
                if not ok:
                    break
            if not ok:
                break
        count += ok
    return count


@_timed(3, "count_abc equals exhaustive enumeration (p=3, e_1>=2, sum e_i<=6)", limit=120)
def criterion_3(scale):
    failures, n = [], 0
    for total in range(2, 7):
        for ex in exponent_tuples(total, 2):
            got, want = count_abc(make_group(3, ex)), literal_restricted_count(3, ex)
            n += 1
            if got != want:
                failures.append((ex, got, want))
    return not failures, f"{n} exponent lists, {len(failures)} mismatches", failures


# -- 4 -------------------------------------------------------------------------------

def _stack(mats) -> np.ndarray:
    return np.array([m.entries for m in mats], dtype=np.int64)


def _abc_mask(C: np.ndarray, p: int, exps) -> np.ndarray:
    """Vectorised literal restricted-congruence test on a stack of integer matrices."""
    n = len(exps)
    ok = np.ones(len(C), dtype=bool)
    for i in range(n):
        for j in range(n):
            a = C[:, i, j] % p ** exps[i]
            if j < i:
                ok &= a % p ** (exps[i] - exps[j]) == 0
            if i == j:
                ok &= (a - 1) % p ** 2 == 0 if exps[i] >= 2 else a == 1
            elif exps[i] >= exps[j]:
                mod = p ** (exps[i] - exps[j] + 2)
                ok &= a % mod == 0 if mod <= p ** exps[i] else a == 0
            else:
                ok &= a % p == 0
    return ok


def closure_points(scale):
    n_max, e_max = (4, 5) if scale == "full" else (3, 4)
    for p in (3, 5):
        for n in range(1, n_max + 1):
            for ex in product(range(1, e_max + 1), repeat=n):
                if list(ex) == sorted(ex):
                    yield p, list(ex)


@_timed(4, "restricted matrices are closed under products")
def criterion_4(scale, exhaustive_cap: int = 10_000, random_pairs: int = 1000):
    failures, points, pairs, exhaustive = [], 0, 0, 0
    for p, ex in closure_points(scale):
        g = make_group(p, ex)
        size = count_abc(g) if ex[0] >= 2 else None
        points += 1
        if size is not None and size <= exhaustive_cap:
            A = _stack(enumerate_abc(g))
            exhaustive += 1
            for start in range(0, len(A), max(1, 2_000_000 // len(A))):
                block = A[start:start + max(1, 2_000_000 // len(A))]
                C = np.einsum("aij,bjk->abik", block, A).reshape(-1, g.n, g.n)
                bad = ~_abc_mask(C, p, ex)
                pairs += len(C)
                if bad.any():
                    failures.append((p, ex, int(bad.sum())))
                    break
        else:
            rng = random.Random(f"{p}:{ex}")
            A = _stack(random_abc(g, rng) for _ in range(random_pairs))
            B = _stack(random_abc(g, rng) for _ in range(random_pairs))
            bad = ~_abc_mask(np.einsum("aij,ajk->aik", A, B), p, ex)
            pairs += random_pairs
            if bad.any():
                failures.append((p, ex, int(bad.sum())))
    return (not failures,
            f"{points} parameter points ({exhaustive} exhaustive), {pairs} products, {len(failures)} failing points",
            failures)


# -- 5 -------------------------------------------------------------------------------

@_timed(5, "lifting on E1: hypotheses, family of 3, homomorphisms, non-inner, in brute-force Aut", limit=180)
def criterion_5(scale):
    G = corpus.extension("E1")
    problems = []
    h = hypotheses(G)
    for key in ("p_central", "p2_abelian", "center_is_z"):
        if not h[key]:
            problems.append(f"hypothesis {key} fails")
    if h["mode"] != "exhaustive":
        problems.append("hypotheses not checked exhaustively")
    family = extension_family(G, homomorphism="exhaustive")
    if len(family) != 3:
        problems.append(f"family has {len(family)} members")
    T = table_from_extension(G)
    center, inner = center_and_inn(T)
    inner = set(inner)
    auts = set(brute_aut(T))
    if len(center) != 27 or len(inner) != 9:
        problems.append(f"|centre| = {len(center)}, |Inn| = {len(inner)}")
    perms = []
    for k, gamma in enumerate(family):
        v = gamma.verified
        if v["homomorphism"] != "exhaustive" or not v["identity_on_quotient"]:
            problems.append(f"member {k}: {v}")
        perm = tuple(int(i) for i in gamma.permutation())
        perms.append(perm)
        if perm not in auts:
            problems.append(f"member {k} missing from brute-force Aut")
        if gamma.is_identity():
            continue
        # the non-identity members are the non-inner automorphisms of order 3
        if perm in inner:
            problems.append(f"member {k} is inner")
        if gamma.order() != 3:
            problems.append(f"member {k} has order {gamma.order()}")
    if len(set(perms)) != len(perms):
        problems.append("family members coincide")
    if sum(g.is_identity() for g in family) != 1:
        problems.append("family does not contain exactly one identity")
    return (not problems,
            f"|G| = {G.order}, {len(family)} lifts, |Aut| = {len(auts)}, |Inn| = {len(inner)}",
            problems)


# -- 6 -------------------------------------------------------------------------------

def _thetas(G: CentralExtensionGroup, cap: int, samples: int):
    n_abc = count_abc(G.Z) if G.Z.exponents[0] >= 2 else 1
    if n_abc <= cap:
        return list(enumerate_abc(G.Z))
    rng = random.Random(0)
    return [random_abc(G.Z, rng) for _ in range(samples)]


@_timed(6, "coboundary, p^2-power and integer power identities on every bundled p-central p^2-abelian extension")
def criterion_6(scale):
    failures, checked, thetas = [], [], 0
    cap, samples = (729, 200) if scale == "full" else (81, 20)
    for name in corpus.EXTENSIONS:
        G = corpus.extension(name)
        h = hypotheses(G)
        if not (h["p_central"] and h["p2_abelian"]):
            continue
        checked.append(name)
        if not dagger_check(G):
            failures.append((name, "p^2-power"))
        q = G.Q.order
        for x in range(q):
            for y in range(q):
                s = star_coefficients(G, x, y)
                p = G.p
                for i, m in enumerate(G.Z.moduli):
                    if s.alpha[i] * p * p != (s.beta[i] + s.gamma[i] + s.delta[i]) * p + s.k[i] * m:
                        failures.append((name, "integer power", x, y))
        for theta in _thetas(G, cap, samples):
            thetas += 1
            if not verify_star(G, theta, construct_chi(G, theta)):
                failures.append((name, "coboundary", theta.entries))
    return not failures, f"{len(checked)} extensions ({', '.join(checked)}), {thetas} thetas", failures


# -- 7 -------------------------------------------------------------------------------

@_timed(7, "count_abc >= |Z| p^(n^2-3n) over n in [3,6], 3 <= e_i <= 6, p in {3,5}")
def criterion_7(scale):
    failures, points = [], 0
    for p in (3, 5):
        for n in range(3, 7):
            for ex in product(range(3, 7), repeat=n):
                if list(ex) != sorted(ex):
                    continue
                g = make_group(p, ex)
                c, b = count_abc(g), theorem_lower_bound(g)
                s = lower_bound_chain(g)
                points += 1
                if not (c >= b and s[0] == c and s[-1] == b and s[0] >= s[1] == s[2] >= s[3] == s[4]):
                    failures.append((p, ex))
    g = make_group(3, [3, 3, 3])
    eq = count_abc(g) == theorem_lower_bound(g) == 19683
    if not eq:
        failures.append("equality at (3, (3,3,3))")
    return not failures, f"{points} parameter points, equality at (3,[3,3,3]): {eq}", failures


# -- 8 -------------------------------------------------------------------------------

def conjecture_corpus() -> list:
    named = ["heisenberg27", "modular27", "q8", "dihedral8", "E1"]
    return named + [n for n in corpus.noncyclic_corpus() if n not in named]


@_timed(8, "divisibility |G| | |Aut(G)| on the bundled non-cyclic corpus")
def criterion_8(scale):
    failures, lines = [], []
    for name in conjecture_corpus():
        v = check_conjecture_A(corpus.table(name), corpus.prime_of(name))
        lines.append(f"{name}:{v.aut_order}")
        if not (v.applicable and v.holds):
            failures.append(v.to_json())
    return not failures, f"{len(lines)} groups, {len(failures)} failures", failures


# -- 9 -------------------------------------------------------------------------------

def corrupted_cocycle_rejected(G: CentralExtensionGroup) -> bool:
    mu = G.mu.copy()
    mu.setflags(write=True)
    x, y = 1, 1 + G.Q.order // 2
    mu[x, y, 0] = (mu[x, y, 0] + 1) % G.Z.moduli[0]
    try:
        CentralExtensionGroup(G.Q, G.Z, mu)
    except CocycleIdentityFailed:
        return True
    return False


def zero_chi_rejected(G: CentralExtensionGroup, theta_entries) -> bool:
    theta = canonicalize(G.Z, theta_entries)
    zero = tuple(G.Z.zero for _ in range(G.Q.order))
    return not verify_star(G, theta, zero)


@_timed(9, "negative controls fail loudly")
def criterion_9(scale):
    E1 = corpus.extension("E1")
    outcomes = {}
    try:
        extend_automorphism(E1, canonicalize(E1.Z, [[4]]))
        outcomes["theta=[4] rejected"] = False
    except NotRestricted:
        outcomes["theta=[4] rejected"] = True
    outcomes["corrupted cocycle rejected"] = corrupted_cocycle_rejected(E1)
    outcomes["E1: chi=0, theta=[10] fails the coboundary identity"] = zero_chi_rejected(E1, [[10]])
    # supplementary control where t(x)^p is not trivial, so chi cannot vanish
    outcomes["E2: chi=0, theta=[10] fails the coboundary identity"] = zero_chi_rejected(corpus.extension("E2"), [[10]])
    failures = [k for k, ok in outcomes.items() if not ok]
    detail = ", ".join(f"{k}: {'yes' if ok else 'NO'}" for k, ok in outcomes.items())
    return not failures, detail, failures


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def run_all(scale: str = "small", stop_on_failure: bool = False) -> list:
    results = []
    for crit in CRITERIA:
        r = crit(scale)
        results.append(r)
        if stop_on_failure and not r.passed:
            break
    return results
