"""Finite groups given by an explicit multiplication (Cayley) table."""
from __future__ import annotations

from collections import deque
from functools import cached_property
from math import gcd
from typing import Sequence

import numpy as np

from .errors import GroupAxiomError


class TableGroup:
    """A group on ``range(m)`` with ``table[a, b] = a*b``.

    Group axioms are verified on construction: closure, a two-sided
    identity, two-sided inverses, and associativity (all m^3 triples,
    vectorised one left factor at a time).
    """

    def __init__(self, table, labels: Sequence | None = None, name: str = "", validate: bool = True):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise GroupAxiomError("table must be a non-empty square array")
        self.table = t
        self.table.setflags(write=False)
        self.order = t.shape[0]
        self.labels = list(labels) if labels is not None else list(range(self.order))
        if len(self.labels) != self.order:
            raise GroupAxiomError("label count does not match table size")
        self.name = name
        self.identity = self._find_identity()
        if validate:
            self._validate()
        self.inverse = self._inverses()

    # -- construction checks ------------------------------------------------

    def _find_identity(self) -> int:
        m, t = self.order, self.table
        if t.min() < 0 or t.max() >= m:
            raise GroupAxiomError("table entries out of range")
        ar = np.arange(m)
        for e in range(m):
            if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar):
                return e
        raise GroupAxiomError("no two-sided identity")

    def _inverses(self) -> np.ndarray:
        t, e = self.table, self.identity
        inv = np.argmax(t == e, axis=1)
        if not np.all(t[np.arange(self.order), inv] == e) or not np.all(t[inv, np.arange(self.order)] == e):
            raise GroupAxiomError("some element has no two-sided inverse")
        inv.setflags(write=False)
        return inv

    def _validate(self):
        t = self.table
        self._inverses()
        for a in range(self.order):
            # (a*b)*c versus a*(b*c) for all b, c
            lhs = t[t[a]]
            rhs = t[a][t]
            if not np.array_equal(lhs, rhs):
                b, c = map(int, np.argwhere(lhs != rhs)[0])
                raise GroupAxiomError(f"associativity fails at ({self.labels[a]}, {self.labels[b]}, {self.labels[c]})")

    # -- arithmetic ---------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        result, base = self.identity, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def power_map(self, k: int) -> np.ndarray:
        """Vector of g^k over all g."""
        t = self.table
        result = np.full(self.order, self.identity)
        base = np.arange(self.order)
        while k:
            if k & 1:
                result = t[result, base]
            base = t[base, base]
            k >>= 1
        return result

    @cached_property
    def element_orders(self) -> np.ndarray:
        t, e = self.table, self.identity
        orders = np.zeros(self.order, dtype=np.int64)
        cur = np.arange(self.order)
        k = 1
        while (orders == 0).any():
            hit = (cur == e) & (orders == 0)
            orders[hit] = k
            cur = t[cur, np.arange(self.order)]
            k += 1
        orders.setflags(write=False)
        return orders

    @cached_property
    def exponent(self) -> int:
        r = 1
        for o in set(int(x) for x in self.element_orders):
            r = r * o // gcd(r, o)
        return r

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def is_cyclic(self) -> bool:
        return int(self.element_orders.max()) == self.order

    @cached_property
    def center(self) -> tuple:
        t = self.table
        return tuple(int(g) for g in range(self.order) if np.array_equal(t[g], t[:, g]))

    def subgroup_generated(self, gens: Sequence[int]) -> list:
        seen = {self.identity}
        order = [self.identity]
        queue = deque(order)
        while queue:
            x = queue.popleft()
            for s in gens:
                y = int(self.table[x, s])
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    queue.append(y)
        return order

    @cached_property
    def generators(self) -> tuple:
        """Greedy generating set: repeatedly add an element of largest order outside the span."""
        orders = self.element_orders
        by_order = sorted(range(self.order), key=lambda g: (-int(orders[g]), g))
        gens: list = []
        span = {self.identity}
        for g in by_order:
            if len(span) == self.order:
                break
            if g not in span:
                gens.append(g)
                span = set(self.subgroup_generated(gens))
        return tuple(gens)

    def conjugation(self, g: int) -> tuple:
        """The inner automorphism x -> g x g^-1."""
        t = self.table
        return tuple(int(v) for v in t[t[g], self.inverse[g]])

    def is_homomorphism(self, images: Sequence[int]) -> bool:
        f = np.asarray(images)
        t = self.table
        return bool(np.array_equal(f[t], t[np.ix_(f, f)]))

    def is_p_group(self, p: int) -> bool:
        m = self.order
        while m % p == 0:
            m //= p
        return m == 1

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"TableGroup(order={self.order}{', name=' + repr(self.name) if self.name else ''})"

    def to_json(self) -> dict:
        return {"order": self.order, "table": self.table.tolist()}

    @classmethod
    def from_json(cls, d: dict, name: str = "") -> "TableGroup":
        t = d["table"]
        if d.get("order", len(t)) != len(t):
            raise GroupAxiomError("declared order does not match table size")
        return cls(t, name=name)


def direct_product(G: TableGroup, H: TableGroup, name: str = "") -> TableGroup:
    m, k = G.order, H.order
    a = np.arange(m * k)
    g, h = a // k, a % k
    table = G.table[g[:, None], g[None, :]] * k + H.table[h[:, None], h[None, :]]
    labels = [(G.labels[i], H.labels[j]) for i in range(m) for j in range(k)]
    return TableGroup(table, labels, name=name or f"{G.name}x{H.name}")
