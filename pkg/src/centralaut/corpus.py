"""Bundled groups: multiplication tables and central-extension descriptors.

Metacyclic tables use normal forms a^i b^j with relations

    a^m = 1,  b^n = a^s,  b a b^-1 = a^r

which requires r^n = 1 and s(r - 1) = 0 mod m.  Extensions are stored as
JSON descriptors so they can be written to disk and fed to the CLI.
"""
from __future__ import annotations

import copy

import numpy as np

from .abelian import make_group
from .errors import InputError
from .extension import CentralExtensionGroup, extension_from_json
from .oracle import abelian_table, table_from_extension
from .tablegroup import TableGroup, direct_product


def metacyclic(m: int, n: int, r: int, s: int, name: str = "") -> TableGroup:
    r %= m
    if pow(r, n, m) != 1 or (s * (r - 1)) % m:
        raise InputError(f"inconsistent metacyclic relations (m={m}, n={n}, r={r}, s={s})")
    N = m * n
    idx = np.arange(N)
    i, j = idx // n, idx % n
    rpow = np.array([pow(r, k, m) for k in range(n)], dtype=np.int64)
    a = i[:, None] + i[None, :] * rpow[j][:, None]
    b = j[:, None] + j[None, :]
    wrap = b >= n
    a = (a + wrap * s) % m
    b = b % n
    labels = [(int(x), int(y)) for x, y in zip(i, j)]
    return TableGroup(a * n + b, labels, name=name or f"M({m},{n},{r},{s})")


def cyclic(p: int, e: int) -> TableGroup:
    T = abelian_table(make_group(p, [e]))
    T.name = f"C{p ** e}"
    return T


def abelian(p: int, exponents) -> TableGroup:
    g = make_group(p, exponents)
    T = abelian_table(g)
    T.name = "x".join(f"C{m}" for m in g.moduli)
    return T


# -- extension descriptors ------------------------------------------------------------

def _elem(p, rank, z, cocycle, name):
    return {"name": name, "p": p, "q": {"type": "elementary", "rank": rank},
            "z": {"p": p, "exponents": z}, "cocycle": cocycle}


_COMMUTATOR = [[0, 0], [1, 0]]          # mu(x, y) = x_2 y_1


def heisenberg_descriptor(p: int) -> dict:
    return _elem(p, 2, [1], {"type": "bilinear", "matrix": _COMMUTATOR}, f"heisenberg{p ** 3}")


def modular_descriptor(p: int) -> dict:
    """Order p^3, exponent p^2: the carry makes t(e_1) of order p^2."""
    return _elem(p, 2, [1], {"type": "sum", "parts": [
        {"type": "carry", "coord": 0},
        {"type": "bilinear", "matrix": _COMMUTATOR},
    ]}, f"modular{p ** 3}")


EXTENSIONS = {
    # (Z/3)^2 by Z/27 with mu = 9 x_2 y_1; all t(x)^3 are trivial
    "E1": _elem(3, 2, [3], {"type": "bilinear", "scale": 9, "matrix": _COMMUTATOR}, "E1"),
    # same commutator, but t(e_1)^3 generates Z/27: the group is M(3^5)
    "E2": _elem(3, 2, [3], {"type": "sum", "parts": [
        {"type": "carry", "coord": 0},
        {"type": "bilinear", "scale": 9, "matrix": _COMMUTATOR},
    ]}, "E2"),
    # order 3^11 with Z = (Z/27)^3, satisfying every hypothesis of the lower bound
    "E3": _elem(3, 2, [3, 3, 3], {"type": "sum", "parts": [
        {"type": "carry", "coord": 0, "scale": [1, 0, 0]},
        {"type": "bilinear", "scale": [0, 9, 0], "matrix": _COMMUTATOR},
    ]}, "E3"),
    "abelian_z333": {"name": "abelian_z333", "p": 3, "q": {"type": "trivial"},
                     "z": {"p": 3, "exponents": [3, 3, 3]}, "cocycle": {"type": "zero"}},
    "heisenberg27": heisenberg_descriptor(3),
    "heisenberg125": heisenberg_descriptor(5),
    "modular27": modular_descriptor(3),
    "modular125": modular_descriptor(5),
}


def extension_descriptor(name: str) -> dict:
    try:
        return copy.deepcopy(EXTENSIONS[name])
    except KeyError:
        raise InputError(f"unknown extension {name!r}; known: {', '.join(EXTENSIONS)}") from None


def extension(name: str) -> CentralExtensionGroup:
    return extension_from_json(extension_descriptor(name))


def _from_extension(name: str) -> TableGroup:
    T = table_from_extension(extension(name), bound=4096)
    T.name = name
    return T


# -- table registry: name -> (prime, builder) -----------------------------------------------

TABLES = {
    "cyclic8": (2, lambda: cyclic(2, 3)),
    "cyclic9": (3, lambda: cyclic(3, 2)),
    "cyclic27": (3, lambda: cyclic(3, 3)),
    "cyclic125": (5, lambda: cyclic(5, 3)),
    "c2xc4": (2, lambda: abelian(2, [1, 2])),
    "c2^3": (2, lambda: abelian(2, [1, 1, 1])),
    "c3xc9": (3, lambda: abelian(3, [1, 2])),
    "c3^3": (3, lambda: abelian(3, [1, 1, 1])),
    "c5^3": (5, lambda: abelian(5, [1, 1, 1])),
    "c4xc4": (2, lambda: abelian(2, [2, 2])),
    "c9xc9": (3, lambda: abelian(3, [2, 2])),
    "c3xc27": (3, lambda: abelian(3, [1, 3])),
    "q8": (2, lambda: metacyclic(4, 2, -1, 2, "q8")),
    "dihedral8": (2, lambda: metacyclic(4, 2, -1, 0, "dihedral8")),
    "dihedral16": (2, lambda: metacyclic(8, 2, -1, 0, "dihedral16")),
    "q16": (2, lambda: metacyclic(8, 2, -1, 4, "q16")),
    "semidihedral16": (2, lambda: metacyclic(8, 2, 3, 0, "semidihedral16")),
    "modular16": (2, lambda: metacyclic(8, 2, 5, 0, "modular16")),
    "dihedral32": (2, lambda: metacyclic(16, 2, -1, 0, "dihedral32")),
    "q32": (2, lambda: metacyclic(16, 2, -1, 8, "q32")),
    "modular32": (2, lambda: metacyclic(16, 2, 9, 0, "modular32")),
    "q8xc2": (2, lambda: direct_product(metacyclic(4, 2, -1, 2, "q8"), cyclic(2, 1), "q8xc2")),
    "dihedral8xc2": (2, lambda: direct_product(metacyclic(4, 2, -1, 0, "d8"), cyclic(2, 1), "dihedral8xc2")),
    "heisenberg27": (3, lambda: _from_extension("heisenberg27")),
    "modular27": (3, lambda: metacyclic(9, 3, 4, 0, "modular27")),
    "heisenberg125": (5, lambda: _from_extension("heisenberg125")),
    "modular125": (5, lambda: metacyclic(25, 5, 6, 0, "modular125")),
    "heisenberg27xc3": (3, lambda: direct_product(_from_extension("heisenberg27"), cyclic(3, 1), "heisenberg27xc3")),
    "modular81": (3, lambda: metacyclic(27, 3, 10, 0, "modular81")),
    "modular243": (3, lambda: metacyclic(81, 3, 28, 0, "modular243")),
    "E1": (3, lambda: _from_extension("E1")),
    "E2": (3, lambda: _from_extension("E2")),
}


def table(name: str) -> TableGroup:
    try:
        _, build = TABLES[name]
    except KeyError:
        raise InputError(f"unknown group {name!r}; known: {', '.join(TABLES)}") from None
    return build()


def prime_of(name: str) -> int:
    return TABLES[name][0]


def noncyclic_corpus(min_exp: int = 3, max_exp: int = 5, bound: int = 750) -> list:
    """Names of bundled non-cyclic tables of order p^3 .. p^5 within the bound."""
    out = []
    for name, (p, build) in TABLES.items():
        T = build()
        n = 0
        while p ** n < T.order:
            n += 1
        if min_exp <= n <= max_exp and T.order <= bound and not T.is_cyclic():
            out.append(name)
    return out
