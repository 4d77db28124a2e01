"""Central extensions 1 -> Z -> G -> Q -> 1 and lifting of centre automorphisms.

G is modelled on pairs (x, n) with x an index into the table group Q and n
a coordinate tuple of the abelian p-group Z, written additively:

    (x, n) * (y, m) = (xy, mu(x, y) + n + m)

The transversal is t(x) = (x, 0), so t(xy) + mu(x, y) = t(x) t(y) and the
cocycle is normalised (mu(1, y) = mu(x, 1) = 0).

Multiplicative identities translate as follows (Z additive):

    mu(x,y) theta(mu(x,y))^-1 = chi(x)^-1 chi(y)^-1 chi(xy)
        <=>  mu - theta(mu) = chi(xy) - chi(x) - chi(y)              (coboundary)
    mu(x,y)^{p^2} = t(x)^{p^2} t(y)^{p^2} t(xy)^{-p^2}
        <=>  p^2 mu = p beta(x) + p beta(y) - p beta(xy)             (p^2-power)

where beta(x) is the Z-part of t(x)^p.  An automorphism theta of Z whose
matrix A satisfies the restricted congruences lifts to gamma(x, n) = (x, chi(x) +
theta(n)) with chi(x) = ((A - I)/p) beta(x).
"""
from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .abelian import AbelianPGroup, elem_add, elem_neg, elem_scale
from .endomat import (
    ENUM_BOUND,
    EndoMatrix,
    apply,
    apply_raw,
    canonicalize,
    compose,
    enumerate_abc,
    identity,
    in_Rp,
    is_automorphism,
    satisfies_abc,
)
from .errors import (
    CocycleIdentityFailed,
    DimensionMismatch,
    DivisionImpossible,
    GroupTooLarge,
    HomomorphismCheckFailed,
    HypothesisViolation,
    IdentityFailed,
    InputError,
    NotNormalized,
    NotPCentral,
    NotRestricted,
)
from .tablegroup import TableGroup

EXHAUSTION_BOUND = int(os.environ.get("CENTRALAUT_EXHAUSTION_BOUND", 3 ** 6))
FLAT_TABLE_CAP = 4096
SAMPLES = 10_000

QGroup = TableGroup


# -- quotient groups --------------------------------------------------------

def elementary_group(p: int, rank: int) -> TableGroup:
    """(Z/p)^rank with index sum(x_i p^i) and coordinate-tuple labels."""
    labels = [tuple((i // p ** k) % p for k in range(rank)) for i in range(p ** rank)]
    coords = np.array(labels, dtype=np.int64).reshape(len(labels), rank)
    weights = p ** np.arange(rank, dtype=np.int64)
    s = (coords[:, None, :] + coords[None, :, :]) % p
    return TableGroup(s @ weights, labels, name=f"C{p}^{rank}")


def trivial_group() -> TableGroup:
    return TableGroup([[0]], [()], name="1")


def q_coords(Q: TableGroup, x: int) -> tuple:
    label = Q.labels[x]
    if not isinstance(label, tuple):
        raise InputError("coordinate cocycles need a Q with coordinate-tuple labels")
    return label


# -- cocycle builders ---------------------------------------------------------

def _scale_vector(Z: AbelianPGroup, scale) -> np.ndarray:
    if isinstance(scale, int):
        scale = [scale] + [0] * (Z.n - 1)
    if len(scale) != Z.n:
        raise DimensionMismatch(f"scale must have {Z.n} entries")
    return np.array(scale, dtype=object)


def cocycle_from_function(Q: TableGroup, Z: AbelianPGroup, f: Callable) -> np.ndarray:
    """Tabulate f(x, y) -> Z-coordinates over Q x Q (indices)."""
    q = Q.order
    mu = np.zeros((q, q, Z.n), dtype=object)
    for x in range(q):
        for y in range(q):
            mu[x, y] = Z.element(f(x, y))
    return mu


def bilinear_cocycle(Q: TableGroup, Z: AbelianPGroup, matrix, scale=1) -> np.ndarray:
    """mu(x, y) = (x^T B y) * scale for Q elementary abelian with coordinate labels."""
    B = [list(r) for r in matrix]
    s = _scale_vector(Z, scale)

    def f(x, y):
        a, b = q_coords(Q, x), q_coords(Q, y)
        if len(B) != len(a) or any(len(r) != len(b) for r in B):
            raise DimensionMismatch("bilinear matrix does not match the rank of Q")
        v = sum(a[i] * B[i][j] * b[j] for i in range(len(a)) for j in range(len(b)))
        return [v * c for c in s]

    return cocycle_from_function(Q, Z, f)


def carry_cocycle(Q: TableGroup, Z: AbelianPGroup, p: int, coord: int, scale=1) -> np.ndarray:
    """mu(x, y) = floor((x_k + y_k) / p) * scale: the carry of coordinate k.

    Glues the cyclic factor Z/p in coordinate k of Q onto Z so that t(e_k)^p = scale.
    """
    s = _scale_vector(Z, scale)

    def f(x, y):
        c = (q_coords(Q, x)[coord] + q_coords(Q, y)[coord]) // p
        return [c * v for v in s]

    return cocycle_from_function(Q, Z, f)


def add_cocycles(Z: AbelianPGroup, *mus) -> np.ndarray:
    total = sum(mus[1:], mus[0].copy())
    mod = np.array(Z.moduli, dtype=object)
    return total % mod


# -- the extension -----------------------------------------------------------

class CentralExtensionGroup:
    """G = Q x Z as a set, multiplication twisted by a normalised 2-cocycle."""

    def __init__(self, Q: TableGroup, Z: AbelianPGroup, mu, name: str = ""):
        mu = np.asarray(mu, dtype=object)
        q = Q.order
        if mu.shape != (q, q, Z.n):
            raise DimensionMismatch(f"cocycle must have shape ({q}, {q}, {Z.n}), got {mu.shape}")
        mod = np.array(Z.moduli, dtype=object)
        self.Q = Q
        self.Z = Z
        self.mu = mu % mod
        self.mu.setflags(write=False)
        self.name = name
        e = Q.identity
        if self.mu[e, :].any() or self.mu[:, e].any():
            raise NotNormalized("cocycle is not normalised: mu(1, y) or mu(x, 1) is nonzero")
        self._check_cocycle()

    def _check_cocycle(self):
        """mu(x,y) + mu(xy,z) = mu(y,z) + mu(x,yz) for all triples."""
        Qt = self.Q.table
        mod = np.array(self.Z.moduli, dtype=object)
        mu = self.mu
        for x in range(self.Q.order):
            xy = Qt[x]                                   # xy for all y
            lhs = mu[x][:, None, :] + mu[xy]             # [y, z]
            rhs = mu + mu[x][Qt]                         # mu(y,z) + mu(x, yz)
            bad = ((lhs - rhs) % mod).any(axis=2)
            if bad.any():
                y, z = map(int, np.argwhere(bad)[0])
                L = self.Q.labels
                raise CocycleIdentityFailed((L[x], L[y], L[z]))

    # -- element arithmetic ----------------------------------------------

    @property
    def p(self) -> int:
        return self.Z.p

    @property
    def order(self) -> int:
        return self.Q.order * self.Z.order

    @property
    def identity(self) -> tuple:
        return (self.Q.identity, self.Z.zero)

    def t(self, x: int) -> tuple:
        return (x, self.Z.zero)

    def mu_at(self, x: int, y: int) -> tuple:
        return tuple(int(v) for v in self.mu[x, y])

    def mul(self, g, h) -> tuple:
        (x, n), (y, m) = g, h
        Z = self.Z
        return (self.Q.mul(x, y), elem_add(Z, elem_add(Z, self.mu_at(x, y), n), m))

    def inv(self, g) -> tuple:
        x, n = g
        xi = self.Q.inv(x)
        # (x, n)(x^-1, m) = (1, mu(x, x^-1) + n + m)
        return (xi, elem_neg(self.Z, elem_add(self.Z, self.mu_at(x, xi), n)))

    def power(self, g, k: int) -> tuple:
        if k < 0:
            g, k = self.inv(g), -k
        result, base = self.identity, g
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def power_offset(self, x: int, k: int) -> tuple:
        """c_k(x) with t(x)^k = (x^k, c_k(x)); c_k(x) = sum_{i<k} mu(x^i, x)."""
        Z = self.Z
        acc, xi = Z.zero, self.Q.identity
        for _ in range(k - 1):
            xi = self.Q.mul(xi, x)
            acc = elem_add(Z, acc, self.mu_at(xi, x))
        return acc

    def elements(self):
        for x in range(self.Q.order):
            for n in self.Z.elements():
                yield (x, n)

    def random_element(self, rng: random.Random) -> tuple:
        return (rng.randrange(self.Q.order), tuple(rng.randrange(m) for m in self.Z.moduli))

    # -- flat indexing -----------------------------------------------------

    def index(self, g) -> int:
        x, n = g
        return x * self.Z.order + self.Z.index(n)

    def from_index(self, i: int) -> tuple:
        x, r = divmod(i, self.Z.order)
        return (x, self.Z.from_index(r))

    @cached_property
    def flat_table(self) -> np.ndarray:
        """Multiplication table on flat indices x*|Z| + index(n)."""
        N = self.order
        if N > FLAT_TABLE_CAP:
            raise GroupTooLarge(f"|G| = {N} exceeds the flat-table cap {FLAT_TABLE_CAP}")
        Z = self.Z
        zn = Z.order
        coords = np.array([Z.from_index(i) for i in range(zn)], dtype=np.int64).reshape(zn, Z.n)
        mod = np.array(Z.moduli, dtype=np.int64)
        weights = np.cumprod([1] + list(Z.moduli[:-1])).astype(np.int64)
        zadd = ((coords[:, None, :] + coords[None, :, :]) % mod) @ weights
        mu_idx = (self.mu.astype(np.int64) @ weights)
        a = np.arange(N)
        X, I = a // zn, a % zn
        zpart = zadd[zadd[mu_idx[X[:, None], X[None, :]], I[:, None]], I[None, :]]
        table = self.Q.table[X[:, None], X[None, :]] * zn + zpart
        table.setflags(write=False)
        return table

    # -- serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        d = {
            "p": self.p,
            "q": {"type": "table", "table": self.Q.table.tolist()},
            "z": self.Z.descriptor(),
            "cocycle": {"type": "table", "entries": [[list(map(int, self.mu[x, y])) for y in range(self.Q.order)]
                                                      for x in range(self.Q.order)]},
        }
        if self.name:
            d["name"] = self.name
        return d

    def __repr__(self):
        return f"CentralExtensionGroup({self.name or '?'}: |Q|={self.Q.order}, Z={self.Z})"


def build_extension(Q: TableGroup, Z: AbelianPGroup, mu, name: str = "") -> CentralExtensionGroup:
    return CentralExtensionGroup(Q, Z, mu, name=name)


def _q_from_json(d: dict, p: int) -> TableGroup:
    kind = d.get("type")
    if kind == "elementary":
        return elementary_group(d.get("p", p), d["rank"])
    if kind == "trivial":
        return trivial_group()
    if kind == "table":
        return TableGroup(d["table"])
    raise InputError(f"unknown Q type {kind!r}")


def _cocycle_from_json(d: dict, Q: TableGroup, Z: AbelianPGroup) -> np.ndarray:
    kind = d.get("type")
    if kind == "zero":
        return np.zeros((Q.order, Q.order, Z.n), dtype=object)
    if kind == "bilinear":
        return bilinear_cocycle(Q, Z, d["matrix"], d.get("scale", 1))
    if kind == "carry":
        return carry_cocycle(Q, Z, Z.p, d["coord"], d.get("scale", 1))
    if kind == "sum":
        return add_cocycles(Z, *(_cocycle_from_json(part, Q, Z) for part in d["parts"]))
    if kind == "table":
        mu = np.array(d["entries"], dtype=object)
        if mu.ndim == 2:
            mu = mu.reshape(Q.order, Q.order, 1)
        return mu
    raise InputError(f"unknown cocycle type {kind!r}")


def extension_from_json(d: dict) -> CentralExtensionGroup:
    """Parse the extension descriptor, e.g.

    {"p": 3, "q": {"type": "elementary", "rank": 2}, "z": {"p": 3, "exponents": [3]},
     "cocycle": {"type": "bilinear", "scale": 9, "matrix": [[0, 0], [1, 0]]}}
    """
    try:
        Z = AbelianPGroup.from_descriptor(d["z"])
        p = d.get("p", Z.p)
        if p != Z.p:
            raise InputError(f"p = {p} does not match the prime of Z ({Z.p})")
        Q = _q_from_json(d["q"], p)
        mu = _cocycle_from_json(d.get("cocycle", {"type": "zero"}), Q, Z)
    except KeyError as exc:
        raise InputError(f"extension descriptor is missing {exc}") from None
    return build_extension(Q, Z, mu, name=d.get("name", ""))


# -- centre and predicates -------------------------------------------------------

@dataclass(frozen=True)
class Center:
    """Z(G) = {(x, n) : x in q_part}; the Z-factor is always contained in it."""
    q_part: tuple
    order: int
    mode: str

    @property
    def equals_z_factor(self) -> bool:
        return len(self.q_part) == 1


def _within(G: CentralExtensionGroup, bound: int) -> bool:
    return G.order <= min(bound, FLAT_TABLE_CAP)


def center_of(G: CentralExtensionGroup, bound: int = EXHAUSTION_BOUND) -> Center:
    """Exact centre.  Exhaustive pairwise commutation when |G| <= bound.

    Above the bound the reduction "(x, n) is central iff x is central in Q and
    mu(x, y) = mu(y, x) for every y" is used; it is exact, only cheaper.
    """
    zn = G.Z.order
    if _within(G, bound):
        T = G.flat_table
        central = np.all(T == T.T, axis=1)
        xs = sorted({int(i) // zn for i in np.flatnonzero(central)})
        # sanity: centrality depends only on the Q-coordinate
        assert int(central.sum()) == len(xs) * zn
        return Center(tuple(xs), len(xs) * zn, "exhaustive")
    Qt, mu = G.Q.table, G.mu
    xs = tuple(
        x for x in range(G.Q.order)
        if np.array_equal(Qt[x], Qt[:, x]) and not (mu[x] != mu[:, x]).any()
    )
    return Center(xs, len(xs) * zn, "reduced")


def is_p_central(G: CentralExtensionGroup, bound: int = EXHAUSTION_BOUND) -> bool:
    """Every p-th power lies in Z(G)."""
    p = G.p
    if _within(G, bound):
        T = G.flat_table
        central = np.all(T == T.T, axis=1)
        tg = TableGroup(T, validate=False)
        return bool(central[tg.power_map(p)].all())
    C = set(center_of(G, bound).q_part)
    return all(G.Q.power(x, p) in C for x in range(G.Q.order))


def is_p2_abelian(G: CentralExtensionGroup, bound: int = EXHAUSTION_BOUND) -> bool:
    """(gh)^{p^2} = g^{p^2} h^{p^2} for all g, h."""
    k = G.p ** 2
    if _within(G, bound):
        T = G.flat_table
        pw = TableGroup(T, validate=False).power_map(k)
        return bool(np.array_equal(pw[T], T[np.ix_(pw, pw)]))
    # the Z-coordinates cancel: only a condition on Q x Q remains
    Q, Z = G.Q, G.Z
    off = [G.power_offset(x, k) for x in range(Q.order)]
    xp = [Q.power(x, k) for x in range(Q.order)]
    for x in range(Q.order):
        for y in range(Q.order):
            xy = Q.mul(x, y)
            if Q.power(xy, k) != Q.mul(xp[x], xp[y]):
                return False
            lhs = elem_add(Z, elem_scale(Z, k, G.mu_at(x, y)), off[xy])
            rhs = elem_add(Z, G.mu_at(xp[x], xp[y]), elem_add(Z, off[x], off[y]))
            if lhs != rhs:
                return False
    return True


def hypotheses(G: CentralExtensionGroup, bound: int = EXHAUSTION_BOUND) -> dict:
    """Evaluate the standing hypotheses; values are booleans plus the mode used."""
    c = center_of(G, bound)
    return {
        "p_odd": G.p % 2 == 1,
        "p_central": is_p_central(G, bound),
        "p2_abelian": is_p2_abelian(G, bound),
        "center_is_z": c.equals_z_factor,
        "mode": c.mode,
    }


def _require(G: CentralExtensionGroup, bound: int, *names: str):
    h = hypotheses(G, bound)
    failed = [n for n in names if not h[n]]
    if failed:
        raise HypothesisViolation(failed)
    return h


# -- power identities -----------------------------------------------------------------

def t_power_p(G: CentralExtensionGroup, x: int) -> tuple:
    """beta(x): the Z-part of t(x)^p, which must lie in the Z-factor."""
    xp = G.Q.power(x, G.p)
    if xp != G.Q.identity:
        raise NotPCentral(f"t({G.Q.labels[x]})^p does not lie in the central factor")
    return G.power_offset(x, G.p)


def beta_table(G: CentralExtensionGroup) -> list:
    return [t_power_p(G, x) for x in range(G.Q.order)]


def dagger_check(G: CentralExtensionGroup, bound: int = EXHAUSTION_BOUND) -> bool:
    """mu(x,y)^{p^2} = t(x)^{p^2} t(y)^{p^2} t(xy)^{-p^2} for all x, y, computed in G."""
    _require(G, bound, "p_central", "p2_abelian")
    k = G.p ** 2
    Q = G.Q
    tp = [G.power(G.t(x), k) for x in range(Q.order)]
    tpinv = [G.inv(v) for v in tp]
    for x in range(Q.order):
        for y in range(Q.order):
            lhs = G.power((Q.identity, G.mu_at(x, y)), k)
            rhs = G.mul(G.mul(tp[x], tp[y]), tpinv[Q.mul(x, y)])
            if lhs != rhs:
                return False
    return True


@dataclass(frozen=True)
class StarCoefficients:
    """alpha = mu(x,y); beta, gamma, delta = Z-parts of t(x)^p, t(y)^p, t(xy)^-p.

    Integer identity: alpha_i p^2 = (beta_i + gamma_i + delta_i) p + k_i p^{e_i}.
    """
    alpha: tuple
    beta: tuple
    gamma: tuple
    delta: tuple
    k: tuple


def star_coefficients(G: CentralExtensionGroup, x: int, y: int) -> StarCoefficients:
    p, Z = G.p, G.Z
    alpha = G.mu_at(x, y)
    beta = t_power_p(G, x)
    gamma = t_power_p(G, y)
    delta = elem_neg(Z, t_power_p(G, G.Q.mul(x, y)))
    k = []
    for i, m in enumerate(Z.moduli):
        num = alpha[i] * p * p - (beta[i] + gamma[i] + delta[i]) * p
        q, r = divmod(num, m)
        if r:
            raise IdentityFailed(f"integer power identity has no solution in coordinate {i} at ({x}, {y})")
        k.append(q)
    return StarCoefficients(alpha, beta, gamma, delta, tuple(k))


# -- chi and the coboundary identity ---------------------------------------------------------------

def chi_matrix(theta: EndoMatrix) -> list:
    """(A - I)/p as an integer matrix: diagonal s_i p^{r_i - 1}, off-diagonal a_ij/p."""
    g = theta.group
    p, n = g.p, g.n
    B = []
    for i in range(n):
        row = []
        for j in range(n):
            v = theta[i, j] - (1 if i == j else 0)
            if v % p:
                raise DivisionImpossible(f"entry ({i}, {j}) of A - I is not divisible by p")
            row.append(v // p)
        B.append(row)
    if not in_Rp(g, B):
        raise DivisionImpossible("(A - I)/p is not in R_p")
    return B


def construct_chi(G: CentralExtensionGroup, theta: EndoMatrix) -> tuple:
    """chi(x) = ((A - I)/p) beta(x), with beta(x) the Z-part of t(x)^p."""
    if theta.group != G.Z:
        raise DimensionMismatch("theta does not act on the centre factor of G")
    if not satisfies_abc(theta):
        raise NotRestricted("theta does not satisfy the restricted congruences")
    B = chi_matrix(theta)
    return tuple(apply_raw(G.Z, B, b) for b in beta_table(G))


def verify_star(G: CentralExtensionGroup, theta: EndoMatrix, chi: Sequence) -> bool:
    """mu - theta(mu) = chi(xy) - chi(x) - chi(y) for every (x, y) in Q x Q."""
    Q, Z = G.Q, G.Z
    if theta.group != Z or len(chi) != Q.order:
        raise DimensionMismatch("theta/chi do not match G")
    if tuple(chi[Q.identity]) != Z.zero:
        raise InputError("chi(1) must be 0")
    for x in range(Q.order):
        for y in range(Q.order):
            m = G.mu_at(x, y)
            lhs = elem_add(Z, m, elem_neg(Z, apply(theta, m)))
            rhs = elem_add(Z, chi[Q.mul(x, y)], elem_neg(Z, elem_add(Z, chi[x], chi[y])))
            if lhs != rhs:
                return False
    return True


# -- lifted automorphisms ---------------------------------------------------------------

@dataclass
class GAutomorphism:
    """gamma(x, n) = (x, chi(x) + theta(n)): identity on G/Z, theta on Z."""
    group: CentralExtensionGroup
    theta: EndoMatrix
    chi: tuple
    verified: dict = field(default_factory=dict)

    def __call__(self, g) -> tuple:
        x, n = g
        return (x, elem_add(self.group.Z, self.chi[x], apply(self.theta, n)))

    def compose(self, other: "GAutomorphism") -> "GAutomorphism":
        """self after other."""
        Z = self.group.Z
        chi = tuple(elem_add(Z, c1, apply(self.theta, c2)) for c1, c2 in zip(self.chi, other.chi))
        return GAutomorphism(self.group, compose(self.theta, other.theta), chi)

    def __matmul__(self, other):
        return self.compose(other)

    def key(self) -> tuple:
        return (self.theta.entries, self.chi)

    def __eq__(self, other):
        return isinstance(other, GAutomorphism) and self.group is other.group and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_identity(self) -> bool:
        return self.theta.is_identity() and all(c == self.group.Z.zero for c in self.chi)

    def order(self, limit: int | None = None) -> int:
        if limit is None:
            limit = self.group.Z.exponent ** 2
        P, k = self, 1
        while not P.is_identity():
            P = P.compose(self)
            k += 1
            if k > limit:
                raise HomomorphismCheckFailed("automorphism order exceeds limit")
        return k

    def permutation(self) -> np.ndarray:
        """Images of all flat indices x*|Z| + index(n) (desk-scale only)."""
        G = self.group
        Z = G.Z
        zn = Z.order
        mod = np.array(Z.moduli, dtype=np.int64)
        weights = np.cumprod([1] + list(Z.moduli[:-1])).astype(np.int64)
        zimg = np.array([apply(self.theta, Z.from_index(i)) for i in range(zn)], dtype=np.int64).reshape(zn, Z.n)
        out = np.empty(G.order, dtype=np.int64)
        for x in range(G.Q.order):
            cx = np.array(self.chi[x], dtype=np.int64)
            out[x * zn:(x + 1) * zn] = x * zn + ((zimg + cx) % mod) @ weights
        return out

    def to_json(self) -> dict:
        return {
            "theta": [list(r) for r in self.theta.entries],
            "chi": {str(self.group.Q.labels[x]): list(c) for x, c in enumerate(self.chi)},
            "verified": self.verified,
        }


def check_homomorphism(gamma: GAutomorphism, mode: str = "auto", samples: int = SAMPLES,
                       seed: int = 0, bound: int = EXHAUSTION_BOUND) -> str:
    """Verify gamma is a bijective homomorphism of G; returns the mode that ran.

    ``exhaustive`` checks every pair of the flat table, ``sampled`` checks
    ``samples`` random pairs.  Raises HomomorphismCheckFailed on a violation.
    """
    G = gamma.group
    if mode == "auto":
        mode = "exhaustive" if _within(G, bound) else "sampled"
    if mode == "exhaustive":
        T = G.flat_table
        f = gamma.permutation()
        if len(np.unique(f)) != G.order:
            raise HomomorphismCheckFailed("gamma is not injective")
        if not np.array_equal(f[T], T[np.ix_(f, f)]):
            a, b = map(int, np.argwhere(f[T] != T[np.ix_(f, f)])[0])
            raise HomomorphismCheckFailed(f"gamma(gh) != gamma(g)gamma(h) at {G.from_index(a)}, {G.from_index(b)}")
        return mode
    if mode == "sampled":
        rng = random.Random(seed)
        if not is_automorphism(gamma.theta):
            raise HomomorphismCheckFailed("theta is not bijective on Z")
        for _ in range(samples):
            g, h = G.random_element(rng), G.random_element(rng)
            if gamma(G.mul(g, h)) != G.mul(gamma(g), gamma(h)):
                raise HomomorphismCheckFailed(f"gamma(gh) != gamma(g)gamma(h) at {g}, {h}")
        return mode
    raise ValueError(f"unknown mode {mode!r}")


def _lift(G, theta, homomorphism: str, samples: int, bound: int) -> GAutomorphism:
    chi = construct_chi(G, theta)
    if not verify_star(G, theta, chi):
        raise HomomorphismCheckFailed("constructed chi does not satisfy the coboundary identity")
    gamma = GAutomorphism(G, theta, chi)
    ran = check_homomorphism(gamma, homomorphism, samples, bound=bound) if homomorphism != "none" else "skipped"
    gamma.verified = {
        "coboundary": True,
        "homomorphism": ran,
        "identity_on_quotient": all(gamma(G.t(x))[0] == x for x in range(G.Q.order)),
        "non_inner": not theta.is_identity(),
    }
    return gamma


def extend_automorphism(G: CentralExtensionGroup, theta: EndoMatrix, homomorphism: str = "auto",
                        samples: int = SAMPLES, bound: int = EXHAUSTION_BOUND) -> GAutomorphism:
    """Lift theta in Aut(Z) satisfying the restricted congruences to an automorphism of G trivial on G/Z.

    A non-identity theta moves a central element, and inner automorphisms fix
    the centre pointwise, so the lift is then non-inner.
    """
    _require(G, bound, "p_odd", "p_central", "p2_abelian", "center_is_z")
    if theta.group != G.Z:
        raise DimensionMismatch("theta does not act on the centre factor of G")
    if not satisfies_abc(theta):
        raise NotRestricted("theta does not satisfy the restricted congruences")
    return _lift(G, theta, homomorphism, samples, bound)


def extension_family(G: CentralExtensionGroup, homomorphism: str = "auto", samples: int = 1000,
                     bound: int = EXHAUSTION_BOUND, enum_bound: int = ENUM_BOUND) -> list:
    """One lift per restricted theta, in enumeration order (identity first)."""
    _require(G, bound, "p_odd", "p_central", "p2_abelian", "center_is_z")
    return [_lift(G, theta, homomorphism, samples, bound) for theta in enumerate_abc(G.Z, enum_bound)]


@dataclass(frozen=True)
class ClosureReport:
    pairs: int
    mode: str
    restricted: bool       # every composite has theta in the restricted set
    trivial_on_quotient: bool
    exact: bool            # every composite is literally a member of the family
    non_members: tuple     # (i, j) index pairs whose composite is not a member


def family_closure(family: Sequence[GAutomorphism], max_pairs: int = 10_000, seed: int = 0) -> ClosureReport:
    """Compose pairs of the family and check the composites stay in the set P.

    P consists of automorphisms trivial on G/Z whose restriction to Z satisfies
    the restricted congruences; composites are always in P, but may differ from the family member
    with the same theta by an automorphism that is trivial on Z.
    """
    k = len(family)
    if k * k <= max_pairs:
        pairs = [(i, j) for i in range(k) for j in range(k)]
        mode = "exhaustive"
    else:
        rng = random.Random(seed)
        pairs = [(rng.randrange(k), rng.randrange(k)) for _ in range(max_pairs)]
        mode = "sampled"
    members = set(family)
    restricted = trivial = True
    misses = []
    for i, j in pairs:
        c = family[i].compose(family[j])
        G = c.group
        restricted &= satisfies_abc(c.theta)
        trivial &= all(c(G.t(x))[0] == x for x in range(G.Q.order))
        if c not in members:
            misses.append((i, j))
    return ClosureReport(len(pairs), mode, restricted, trivial, not misses, tuple(misses))
