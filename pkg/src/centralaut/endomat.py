"""Integer-matrix model of End(H_p) and Aut(H_p).

A matrix A = (a_ij) acts on column vectors of H_p by
``alpha -> (A alpha) mod p^{e_i}`` rowwise.  The matrices allowed are the
ring R_p (``p^{e_i - e_j} | a_ij`` whenever j <= i); two of them give the
same endomorphism iff they agree entrywise modulo p^{e_i} in row i.  An
:class:`EndoMatrix` always stores that rowwise-reduced representative, so
equality of endomorphisms is equality of the stored tuples.

Also here: the closed-form |Aut(H_p)|, the restricted set of matrices that
are congruent to I modulo p with strengthened p^2-congruences (the ones
that lift to automorphisms of a central extension), its size, and the
resulting lower bound |Z| p^{n^2 - 3n}.
"""
from __future__ import annotations

import os
import random
from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Iterator, Sequence

from .abelian import AbelianPGroup, _check, index_profile
from .errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    ExponentTooSmall,
    HypothesisViolation,
    NotInRp,
    NotRestricted,
)

ENUM_BOUND = int(os.environ.get("CENTRALAUT_ENUM_BOUND", 2 ** 20))


@dataclass(frozen=True)
class EndoMatrix:
    group: AbelianPGroup
    entries: tuple

    def __post_init__(self):
        g = self.group
        if len(self.entries) != g.n or any(len(r) != g.n for r in self.entries):
            raise DimensionMismatch(f"matrix must be {g.n}x{g.n}")
        for i, (row, m) in enumerate(zip(self.entries, g.moduli)):
            if any(not 0 <= a < m for a in row):
                raise ValueError(f"row {i} is not reduced mod {m}; use canonicalize()")
        if not in_Rp(g, self.entries):
            raise NotInRp("matrix is not in R_p")

    @property
    def n(self) -> int:
        return self.group.n

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "EndoMatrix") -> "EndoMatrix":
        return compose(self, other)

    def __call__(self, a):
        return apply(self, a)

    def is_identity(self) -> bool:
        return self == identity(self.group)

    def to_json(self) -> dict:
        return {"group": self.group.descriptor(), "entries": [list(r) for r in self.entries]}

    @classmethod
    def from_json(cls, d: dict) -> "EndoMatrix":
        return canonicalize(AbelianPGroup.from_descriptor(d["group"]), d["entries"])


def _check_square(g: AbelianPGroup, raw):
    if len(raw) != g.n or any(len(r) != g.n for r in raw):
        raise DimensionMismatch(f"matrix must be {g.n}x{g.n}")


def in_Rp(g: AbelianPGroup, raw: Sequence[Sequence[int]]) -> bool:
    _check_square(g, raw)
    p, e = g.p, g.exponents
    return all(
        raw[i][j] % p ** (e[i] - e[j]) == 0
        for i in range(g.n) for j in range(i + 1)
    )


def canonicalize(g: AbelianPGroup, raw: Sequence[Sequence[int]]) -> EndoMatrix:
    """Reduce row i modulo p^{e_i}; the result represents raw's class mod K."""
    if not in_Rp(g, raw):
        raise NotInRp("matrix is not in R_p")
    rows = tuple(tuple(int(a) % m for a in row) for row, m in zip(raw, g.moduli))
    return EndoMatrix(g, rows)


def identity(g: AbelianPGroup) -> EndoMatrix:
    return EndoMatrix(g, tuple(g.basis(i) for i in range(g.n)))


def apply(M: EndoMatrix, a) -> tuple:
    g = M.group
    _check(g, a)
    return tuple(
        sum(x * y for x, y in zip(row, a)) % m
        for row, m in zip(M.entries, g.moduli)
    )


def apply_raw(g: AbelianPGroup, raw, a) -> tuple:
    """Action of an uncanonicalized R_p matrix (entries may exceed p^{e_i})."""
    _check(g, a)
    return tuple(
        sum(x * y for x, y in zip(row, a)) % m
        for row, m in zip(raw, g.moduli)
    )


def compose(M1: EndoMatrix, M2: EndoMatrix) -> EndoMatrix:
    """The endomorphism M1 after M2, i.e. the matrix product M1 M2."""
    if M1.group != M2.group:
        raise DimensionMismatch("matrices belong to different groups")
    n = M1.n
    A, B = M1.entries, M2.entries
    raw = [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return canonicalize(M1.group, raw)


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def is_automorphism(M: EndoMatrix) -> bool:
    """Bijective iff A mod p is invertible over F_p."""
    return rank_mod_p(M.entries, M.group.p) == M.n


def matrix_order(M: EndoMatrix, limit: int | None = None) -> int:
    """Multiplicative order of an automorphism, by repeated composition."""
    if limit is None:
        limit = M.group.order ** 2
    I = identity(M.group)
    P, k = M, 1
    while P != I:
        P = compose(P, M)
        k += 1
        if k > limit:
            raise ValueError("order exceeds limit (not an automorphism?)")
    return k


# -- counting ---------------------------------------------------------------

def aut_order(g: AbelianPGroup) -> int:
    p, e, n = g.p, g.exponents, g.n
    prof = index_profile(g)
    d, c = prof.d, prof.c
    first = prod(p ** d[k] - p ** k for k in range(n))          # k is 0-based here
    second = prod((p ** e[j]) ** (n - d[j]) for j in range(n))
    third = prod((p ** (e[i] - 1)) ** (n - c[i] + 1) for i in range(n))
    return first * second * third


def entry_values(g: AbelianPGroup, i: int, j: int) -> range:
    """Canonical residues allowed at (i, j) for an element of R_p/K."""
    p, e = g.p, g.exponents
    m = p ** e[i]
    if i > j and e[i] > e[j]:
        return range(0, m, p ** (e[i] - e[j]))
    return range(m)


def class_count(g: AbelianPGroup) -> int:
    """|R_p / K| = |End(H_p)|."""
    return prod(len(entry_values(g, i, j)) for i in range(g.n) for j in range(g.n))


def _matrices(g: AbelianPGroup, value_sets) -> Iterator[EndoMatrix]:
    n = g.n
    for flat in product(*value_sets):
        yield EndoMatrix(g, tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n)))


def enumerate_endos(g: AbelianPGroup, bound: int = ENUM_BOUND) -> Iterator[EndoMatrix]:
    total = class_count(g)
    if total > bound:
        raise EnumerationTooLarge(f"{total} residue classes exceed the bound {bound}")
    return _matrices(g, [entry_values(g, i, j) for i in range(g.n) for j in range(g.n)])


def enumerate_autos(g: AbelianPGroup, bound: int = ENUM_BOUND) -> Iterator[EndoMatrix]:
    return (M for M in enumerate_endos(g, bound) if is_automorphism(M))


def identity_slice_values(g: AbelianPGroup, i: int, j: int) -> list:
    target = 1 if i == j else 0
    return [a for a in entry_values(g, i, j) if a % g.p == target]


def enumerate_identity_slice(g: AbelianPGroup, bound: int = ENUM_BOUND) -> Iterator[EndoMatrix]:
    """All classes of R_p/K with A = I mod p (the lifts of I_n)."""
    sets = [identity_slice_values(g, i, j) for i in range(g.n) for j in range(g.n)]
    total = prod(len(s) for s in sets)
    if total > bound:
        raise EnumerationTooLarge(f"{total} matrices exceed the bound {bound}")
    return _matrices(g, sets)


# -- the restricted set ----------------------------------------------------

def satisfies_abc(M: EndoMatrix) -> bool:
    """A = I mod p, a_ii = 1 mod p^2, and a_ij = 0 mod p^{e_i - e_j + 2} for i != j, e_i >= e_j.

    Membership in R_p is the type invariant of EndoMatrix.
    """
    g = M.group
    p, e, n = g.p, g.exponents, g.n
    A = M.entries
    for i in range(n):
        for j in range(n):
            a = A[i][j]
            if i == j:
                if (a - 1) % p ** 2:
                    return False
            elif e[i] >= e[j]:
                if a % p ** (e[i] - e[j] + 2):
                    return False
            elif a % p:
                return False
    return True


def abc_entry_values(g: AbelianPGroup, i: int, j: int) -> range:
    """Residues mod p^{e_i} allowed at (i, j) in the restricted set."""
    p, e = g.p, g.exponents
    m = p ** e[i]
    if i == j:
        return range(1, m + 1, p ** 2) if e[i] >= 2 else range(1, 2)
    if e[i] < e[j]:
        return range(0, m, p)
    step = p ** (e[i] - e[j] + 2)
    return range(0, m, step) if step <= m else range(0, 1)


def enumerate_abc(g: AbelianPGroup, bound: int = ENUM_BOUND) -> Iterator[EndoMatrix]:
    sets = [abc_entry_values(g, i, j) for i in range(g.n) for j in range(g.n)]
    total = prod(len(s) for s in sets)
    if total > bound:
        raise EnumerationTooLarge(f"{total} restricted matrices exceed the bound {bound}")
    return _matrices(g, sets)


def random_abc(g: AbelianPGroup, rng: random.Random) -> EndoMatrix:
    n = g.n
    return EndoMatrix(g, tuple(
        tuple(rng.choice(abc_entry_values(g, i, j)) for j in range(n)) for i in range(n)
    ))


def count_abc(g: AbelianPGroup) -> int:
    """Closed-form size of the restricted set; requires e_1 >= 2."""
    p, n = g.p, g.n
    if g.exponents[0] < 2:
        raise ExponentTooSmall(f"e_1 = {g.exponents[0]} < 2")
    prof = index_profile(g)
    C, ep = prof.C, prof.e_prime
    k = sum(g.exponents) - 2 * n
    for i in range(prof.l):
        width = C[i + 1] - C[i]
        k += (ep[i] - 1) * (n - C[i + 1] + 1) * width
        k += (ep[i] - 2) * (n - C[i]) * width
    return p ** k


def _theorem_hypotheses(g: AbelianPGroup):
    failed = []
    if g.n < 3:
        failed.append(f"n >= 3 (n = {g.n})")
    if g.exponents[0] < 3:
        failed.append(f"e_1 >= 3 (e_1 = {g.exponents[0]})")
    if failed:
        raise HypothesisViolation(failed)


def theorem_lower_bound(g: AbelianPGroup) -> int:
    """|Z| p^{n^2 - 3n}, valid when n >= 3 and e_1 >= 3."""
    _theorem_hypotheses(g)
    return g.order * g.p ** (g.n ** 2 - 3 * g.n)


def lower_bound_chain(g: AbelianPGroup) -> list:
    """Successive stages of the estimate from count_abc(g) down to |Z| p^{n^2-3n}.

    Stage values satisfy s0 >= s1 == s2 >= s3 == s4; all are exact integers
    (returned as p-exponents to keep the arithmetic honest).
    """
    _theorem_hypotheses(g)
    p, n = g.p, g.n
    prof = index_profile(g)
    C = prof.C
    base = sum(g.exponents) - 2 * n
    blocks = [(C[i], C[i + 1]) for i in range(prof.l)]
    s0 = count_abc(g)
    # e'_i - 1 >= 2 and e'_i - 2 >= 1
    k1 = base + sum(2 * (n - b + 1) * (b - a) + (n - a) * (b - a) for a, b in blocks)
    k2 = base + sum((n - b + 1) * (b - a) + (b - a) * (2 * n + 1 - (b + a)) for a, b in blocks)
    k3 = base + sum((b - a) * (2 * n + 1) - (b * b - a * a) for a, b in blocks)
    k4 = sum(g.exponents) + n * n - 3 * n
    return [s0, p ** k1, p ** k2, p ** k3, p ** k4]


@dataclass(frozen=True)
class RestrictedParams:
    """Diagonal decomposition a_ii = 1 + s_i p^{r_i}."""
    s: tuple
    r: tuple


def p_valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def decompose_diagonal(M: EndoMatrix) -> RestrictedParams:
    if not satisfies_abc(M):
        raise NotRestricted("matrix does not satisfy the restricted congruences")
    g = M.group
    s, r = [], []
    for i, e in enumerate(g.exponents):
        a = M[i, i]
        if a == 1:
            s.append(0)
            r.append(e)
            continue
        ri = min(max(p_valuation(a - 1, g.p), 2), e)
        s.append((a - 1) // g.p ** ri)
        r.append(ri)
    return RestrictedParams(tuple(s), tuple(r))
