"""Brute-force ground truth over explicit multiplication tables.

The automorphism search fixes a greedy generating set g_1, ..., g_k (largest
element orders first) and backtracks over images c_j of g_j, restricted to
elements with the same invariants (order, centraliser size, number of
q^i-th roots).  After each choice the partial map is extended
to H_j = <g_1, ..., g_j> along a precomputed spanning tree and checked on
every Cayley-graph edge of H_j (so it is a homomorphism there) and for
injectivity.  At depth k the map is an automorphism.

Listing every automorphism is only feasible when |Aut| is modest.  For
counting, the same search runs as a stabiliser chain:

    |Aut(G)| = prod_j |{c : (g_1, ..., g_{j-1}, c) extends to an automorphism}|

where extendability is decided by searching for one completion.
"""
from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from sympy import isprime

from .abelian import AbelianPGroup
from .errors import EnumerationTooLarge, GroupTooLarge, NotAPGroup
from .extension import CentralExtensionGroup
from .tablegroup import TableGroup, direct_product

BRUTE_BOUND = int(os.environ.get("CENTRALAUT_BRUTE_BOUND", 750))
LIST_LIMIT = 200_000

GroupMap = tuple


def brute_bound() -> int:
    return int(os.environ.get("CENTRALAUT_BRUTE_BOUND", BRUTE_BOUND))


def _check_size(T: TableGroup, bound: int | None):
    bound = brute_bound() if bound is None else bound
    if T.order > bound:
        raise GroupTooLarge(f"order {T.order} exceeds the brute-force bound {bound}")


# -- table constructors ------------------------------------------------------

def abelian_table(g: AbelianPGroup) -> TableGroup:
    m = g.order
    coords = np.array([g.from_index(i) for i in range(m)], dtype=np.int64).reshape(m, g.n)
    mod = np.array(g.moduli, dtype=np.int64)
    weights = np.cumprod([1] + list(g.moduli[:-1])).astype(np.int64)
    table = ((coords[:, None, :] + coords[None, :, :]) % mod) @ weights
    return TableGroup(table, [tuple(map(int, c)) for c in coords], name=str(g))


def table_from_extension(G: CentralExtensionGroup, bound: int | None = None) -> TableGroup:
    """Flat table of G; index x*|Z| + index(n) carries the label (Q-label, n)."""
    bound = brute_bound() if bound is None else bound
    if G.order > bound:
        raise GroupTooLarge(f"|G| = {G.order} exceeds the bound {bound}")
    labels = [(G.Q.labels[x], n) for x, n in (G.from_index(i) for i in range(G.order))]
    return TableGroup(G.flat_table, labels, name=G.name)


# -- the search ----------------------------------------------------------------

def element_invariants(T: TableGroup) -> np.ndarray:
    """Per-element automorphism invariants as a class label per element.

    Base invariants are the element order, the centraliser size and the
    number of k-th roots for every prime power k dividing the exponent;
    an element's label also records the base invariants of all its prime
    power powers, so equal labels mean equal height data.
    """
    tab = T.table
    base = [T.element_orders, (tab == tab.T).sum(axis=1)]
    powers = []
    exp = T.exponent
    for q in (d for d in range(2, exp + 1) if exp % d == 0 and isprime(d)):
        k = q
        while exp % k == 0:
            pm = T.power_map(k)
            base.append(np.bincount(pm, minlength=T.order))
            powers.append(pm)
            k *= q
    base = np.stack(base, axis=1)
    cols = [base] + [base[pm] for pm in powers]
    _, label = np.unique(np.concatenate(cols, axis=1), axis=0, return_inverse=True)
    return label.reshape(-1)


class AutSearch:
    """Backtracking over generator images with incremental partial-hom checks."""

    def __init__(self, T: TableGroup):
        self.T = T
        tab = T.table
        self.gens = gens = list(T.generators)
        k = len(gens)
        m = T.order
        self.label = label = element_invariants(T)
        self.candidates = [np.flatnonzero(label == label[g]) for g in gens]
        in_h = np.zeros(m, dtype=bool)
        in_h[T.identity] = True
        members = [T.identity]
        self.layers, self.edges, self.members = [], [], []
        for j in range(k):
            depth = {x: 0 for x in members}
            parent, via, new = {}, {}, []
            queue = deque(members)
            old = set(members)
            while queue:
                x = queue.popleft()
                for i in ([j] if x in old else range(j + 1)):
                    y = int(tab[x, gens[i]])
                    if not in_h[y]:
                        in_h[y] = True
                        parent[y], via[y] = x, i
                        depth[y] = depth[x] + 1
                        new.append(y)
                        queue.append(y)
            layers = []
            for d in sorted({depth[y] for y in new}):
                ys = [y for y in new if depth[y] == d]
                layers.append((np.array(ys), np.array([parent[y] for y in ys]), np.array([via[y] for y in ys])))
            src, gi = [], []
            for x in new:
                src.extend([x] * (j + 1))
                gi.extend(range(j + 1))
            src.extend(members)
            gi.extend([j] * len(members))
            src = np.array(src, dtype=np.int64)
            gi = np.array(gi, dtype=np.int64)
            dst = tab[src, np.array(gens)[gi]]
            members = members + new
            self.layers.append(layers)
            self.edges.append((src, gi, dst))
            self.members.append(np.array(members))
        self.f = np.full(m, -1, dtype=np.int64)
        self.f[T.identity] = T.identity
        self.c = np.array(gens, dtype=np.int64)

    @property
    def k(self) -> int:
        return len(self.gens)

    def _extend(self, j: int) -> bool:
        """Extend f from H_{j-1} to H_j with g_j -> c[j]; True if still an injective hom."""
        tab, f, c = self.T.table, self.f, self.c
        label = self.label
        for child, par, vi in self.layers[j]:
            f[child] = tab[f[par], c[vi]]
            if not np.array_equal(label[f[child]], label[child]):
                return False
        src, gi, dst = self.edges[j]
        if not np.array_equal(f[dst], tab[f[src], c[gi]]):
            return False
        img = f[self.members[j]]
        return np.unique(img).size == img.size

    def _complete(self, j: int) -> bool:
        if j == self.k:
            return True
        for cand in self.candidates[j]:
            self.c[j] = cand
            if self._extend(j) and self._complete(j + 1):
                return True
        return False

    def _all(self, j: int) -> Iterator[GroupMap]:
        if j == self.k:
            yield tuple(int(v) for v in self.f)
            return
        for cand in self.candidates[j]:
            self.c[j] = cand
            if self._extend(j):
                yield from self._all(j + 1)

    def enumerate(self) -> Iterator[GroupMap]:
        return self._all(0)

    def _reset(self, j: int):
        """Identity images for g_1, ..., g_j (f restored on H_j)."""
        self.c[:] = self.gens
        for i in range(j):
            assert self._extend(i)

    def orbit_size(self, j: int, cands=None) -> int:
        """How many candidates for g_j extend, with g_1..g_{j-1} fixed."""
        self._reset(j)
        hits = 0
        for cand in self.candidates[j] if cands is None else cands:
            self.c[j] = cand
            if self._extend(j) and self._complete(j + 1):
                hits += 1
        return hits

    def count(self) -> int:
        """Stabiliser-chain count; base images are the generators themselves."""
        total = 1
        for j in range(self.k):
            total *= self.orbit_size(j)
        return total


_WORKER: AutSearch | None = None


def _init_worker(table):
    global _WORKER
    _WORKER = AutSearch(TableGroup(table, validate=False))


def _orbit_part(args) -> int:
    j, cands = args
    return _WORKER.orbit_size(j, cands)


def _parallel_count(T: TableGroup, jobs: int) -> int:
    search = AutSearch(T)
    total = 1
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(T.table,)) as pool:
        for j in range(search.k):
            chunks = [(j, part) for part in np.array_split(search.candidates[j], jobs) if len(part)]
            total *= sum(pool.map(_orbit_part, chunks))
    return total


def brute_aut(T: TableGroup, bound: int | None = None, limit: int = LIST_LIMIT) -> list:
    """Every automorphism of T as a tuple of images."""
    _check_size(T, bound)
    out = []
    for phi in AutSearch(T).enumerate():
        out.append(phi)
        if len(out) > limit:
            raise EnumerationTooLarge(f"more than {limit} automorphisms; use brute_aut_count")
    return out


def brute_aut_count(T: TableGroup, bound: int | None = None, jobs: int = 1) -> int:
    """|Aut(T)|; ``jobs`` > 1 splits each level's candidates across processes."""
    _check_size(T, bound)
    if jobs > 1:
        return _parallel_count(T, jobs)
    return AutSearch(T).count()


# -- centre, inner automorphisms, Out --------------------------------------------

def center_and_inn(T: TableGroup, bound: int | None = None) -> tuple:
    """(centre, inner automorphisms), one conjugation per coset of the centre."""
    _check_size(T, bound)
    center = T.center
    cset = set(center)
    seen, inner = set(), []
    for g in range(T.order):
        phi = T.conjugation(g)
        if phi not in seen:
            seen.add(phi)
            inner.append(phi)
    assert len(inner) * len(cset) == T.order
    return center, inner


def p_part(n: int, p: int) -> int:
    r = 1
    while n % p == 0:
        n //= p
        r *= p
    return r


def out_p_part(T: TableGroup, p: int, bound: int | None = None, aut_count: int | None = None) -> int:
    if aut_count is None:
        aut_count = brute_aut_count(T, bound)
    inn = T.order // len(T.center)
    return p_part(aut_count // inn, p)


@dataclass(frozen=True)
class DivisibilityVerdict:
    name: str
    p: int
    n: int                 # |G| = p^n
    order: int
    aut_order: int
    applicable: bool
    holds: bool
    reason: str

    def to_json(self) -> dict:
        return {"name": self.name, "p": self.p, "n": self.n, "order": str(self.order),
                "aut_order": str(self.aut_order), "applicable": self.applicable,
                "holds": self.holds, "reason": self.reason}


def _prime_of(m: int) -> int:
    for p in range(2, m + 1):
        if m % p == 0:
            return p
    raise NotAPGroup("trivial group is not a p-group of order p^n with n >= 1")


def check_conjecture_A(T: TableGroup, p: int | None = None, bound: int | None = None,
                       aut_count: int | None = None) -> DivisibilityVerdict:
    """Does |G| divide |Aut(G)|?  Applicable to non-cyclic p-groups of order p^n, n >= 3."""
    if p is None:
        p = _prime_of(T.order)
    if not T.is_p_group(p):
        raise NotAPGroup(f"order {T.order} is not a power of {p}")
    n = 0
    while p ** n < T.order:
        n += 1
    if aut_count is None:
        aut_count = brute_aut_count(T, bound)
    holds = aut_count % T.order == 0
    reasons = []
    if T.is_cyclic():
        reasons.append("cyclic")
    if n < 3:
        reasons.append(f"n = {n} < 3")
    return DivisibilityVerdict(T.name, p, n, T.order, aut_count, not reasons, holds,
                               "; ".join(reasons) or "non-cyclic, n >= 3")


# -- table-level predicates (cross-checks for the extension module) ---------------

def table_is_p_central(T: TableGroup, p: int) -> bool:
    central = np.zeros(T.order, dtype=bool)
    central[list(T.center)] = True
    return bool(central[T.power_map(p)].all())


def table_is_p2_abelian(T: TableGroup, p: int) -> bool:
    t = T.table
    pw = T.power_map(p * p)
    return bool(np.array_equal(pw[t], t[np.ix_(pw, pw)]))


def compose_maps(a: Sequence[int], b: Sequence[int]) -> GroupMap:
    """a after b."""
    return tuple(a[x] for x in b)


def map_order(a: Sequence[int]) -> int:
    ident = tuple(range(len(a)))
    cur, k = tuple(a), 1
    while cur != ident:
        cur = compose_maps(a, cur)
        k += 1
    return k
