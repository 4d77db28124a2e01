"""Finite abelian p-groups Z/p^e1 x ... x Z/p^en and their index bookkeeping.

Elements are plain tuples of canonical residues, ``coords[i]`` in
``range(p**e_i)``.  The exponent list is always stored ascending.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

from sympy import isprime

from .errors import DimensionMismatch, EmptyExponents, NonPositiveExponent, NonPrime

AbelianElement = tuple


@dataclass(frozen=True)
class AbelianPGroup:
    p: int
    exponents: tuple
    order: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p, exps = self.p, self.exponents
        if not isinstance(p, int) or p < 2 or not isprime(p):
            raise NonPrime(f"{p} is not prime")
        exps = tuple(int(e) for e in exps)
        if not exps:
            raise EmptyExponents("exponent list is empty")
        if any(e < 1 for e in exps):
            raise NonPositiveExponent(f"exponents must be >= 1, got {list(exps)}")
        exps = tuple(sorted(exps))
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "order", p ** sum(exps))

    @property
    def n(self) -> int:
        return len(self.exponents)

    @cached_property
    def moduli(self) -> tuple:
        return tuple(self.p ** e for e in self.exponents)

    @property
    def exponent(self) -> int:
        """The exponent p^{e_n} of the group."""
        return self.moduli[-1]

    @property
    def zero(self) -> AbelianElement:
        return (0,) * self.n

    def basis(self, i: int) -> AbelianElement:
        """z_i for 0-based ``i``: a 1 in slot i, zeros elsewhere."""
        return tuple(1 if k == i else 0 for k in range(self.n))

    def element(self, coords: Sequence[int]) -> AbelianElement:
        """Reduce arbitrary integers to the canonical residue tuple."""
        if len(coords) != self.n:
            raise DimensionMismatch(f"expected {self.n} coordinates, got {len(coords)}")
        return tuple(int(c) % m for c, m in zip(coords, self.moduli))

    def elements(self) -> Iterator[AbelianElement]:
        return product(*(range(m) for m in self.moduli))

    # Mixed-radix indexing, first coordinate least significant.
    def index(self, a: Sequence[int]) -> int:
        idx, scale = 0, 1
        for c, m in zip(a, self.moduli):
            idx += c * scale
            scale *= m
        return idx

    def from_index(self, idx: int) -> AbelianElement:
        coords = []
        for m in self.moduli:
            idx, c = divmod(idx, m)
            coords.append(c)
        return tuple(coords)

    def descriptor(self) -> dict:
        return {"p": self.p, "exponents": list(self.exponents)}

    @classmethod
    def from_descriptor(cls, d: dict) -> "AbelianPGroup":
        return make_group(d["p"], d["exponents"])

    def __str__(self):
        return " x ".join(f"Z/{m}" for m in self.moduli)


def make_group(p: int, exponents: Sequence[int]) -> AbelianPGroup:
    return AbelianPGroup(int(p), tuple(exponents))


def _check(g: AbelianPGroup, *elems):
    for a in elems:
        if len(a) != g.n:
            raise DimensionMismatch(f"element {a!r} does not have {g.n} coordinates")


def elem_add(g: AbelianPGroup, a, b) -> AbelianElement:
    _check(g, a, b)
    return tuple((x + y) % m for x, y, m in zip(a, b, g.moduli))


def elem_neg(g: AbelianPGroup, a) -> AbelianElement:
    _check(g, a)
    return tuple(-x % m for x, m in zip(a, g.moduli))


def elem_scale(g: AbelianPGroup, k: int, a) -> AbelianElement:
    _check(g, a)
    return tuple(k * x % m for x, m in zip(a, g.moduli))


def elem_order(g: AbelianPGroup, a) -> int:
    """Least m >= 1 with m*a = 0.  A residue x in Z/p^e has order p^(e - v_p(x))."""
    _check(g, a)
    p = g.p
    order = 1
    for x, e in zip(a, g.exponents):
        x %= p ** e
        if x == 0:
            continue
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        order = max(order, p ** (e - v))
    return order


@dataclass(frozen=True)
class IndexProfile:
    """Repeated-exponent bookkeeping, with 1-based values as in the counting formulas.

    ``d[k-1] = d_k``, ``c[k-1] = c_k``; ``C`` has l+1 entries, the last being n+1.
    """
    d: tuple
    c: tuple
    e_prime: tuple
    C: tuple
    D: tuple

    @property
    def l(self) -> int:
        return len(self.e_prime)


def index_profile(g: AbelianPGroup) -> IndexProfile:
    e = g.exponents
    n = len(e)
    d = tuple(max(m for m in range(1, n + 1) if e[m - 1] == e[k]) for k in range(n))
    c = tuple(min(m for m in range(1, n + 1) if e[m - 1] == e[k]) for k in range(n))
    e_prime = tuple(sorted(set(e)))
    C = tuple(min(m for m in range(1, n + 1) if e[m - 1] == ep) for ep in e_prime) + (n + 1,)
    D = tuple(max(m for m in range(1, n + 1) if e[m - 1] == ep) for ep in e_prime)
    return IndexProfile(d, c, e_prime, C, D)
