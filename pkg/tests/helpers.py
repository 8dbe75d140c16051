"""Independent oracles and example builders shared by the test modules.

Nothing here calls the closed-form paths it is used to check: group tables are
built from permutations/quaternions, exponentials from a Taylor series, and
adjacency from the defining relation element by element.
"""

import itertools
from fractions import Fraction

import numpy as np

from walklab import (
    ConnectionPartition,
    make_abelian_product,
    make_from_table,
    validate_connection_set,
)

# group tables ---------------------------------------------------------------


def compose(p, q):
    """Apply q first, then p."""
    return tuple(p[i] for i in q)


def perm_closure(gens):
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def table_from_perms(perms):
    index = {p: i for i, p in enumerate(perms)}
    return np.array([[index[compose(p, q)] for q in perms] for p in perms])


def s3():
    perms = sorted(itertools.permutations(range(3)))
    return make_from_table(table_from_perms(perms), name="S3"), perms


def d4():
    r = (1, 2, 3, 0)
    s = (0, 3, 2, 1)
    perms = perm_closure([r, s])
    return make_from_table(table_from_perms(perms), name="D4"), perms


def _qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def q8():
    units = []
    for k in range(4):
        for sign in (1, -1):
            v = [0, 0, 0, 0]
            v[k] = sign
            units.append(tuple(v))
    units.sort(key=lambda v: (v != (1, 0, 0, 0), v))
    index = {u: i for i, u in enumerate(units)}
    table = np.array([[index[_qmul(a, b)] for b in units] for a in units])
    return make_from_table(table, name="Q8"), units


def abelian_order_lists(max_order):
    """Non-decreasing cycle-order lists with product <= max_order."""
    out = []

    def rec(prefix, lo, prod):
        if prefix:
            out.append(list(prefix))
        for k in range(lo, max_order + 1):
            if prod * k > max_order:
                break
            rec(prefix + [k], k, prod * k)

    rec([], 2, 1)
    return out


# worked examples ---------------------------------------------------------------


def z2z2z3_partition():
    G = make_abelian_product([2, 2, 3])
    e = G.element
    pieces = [[e((1, 0, 0))], [e((0, 1, 0))], [e((0, 0, 1)), e((0, 0, 2))]]
    C = validate_connection_set(G, [g for p in pieces for g in p])
    return ConnectionPartition(C, pieces)


def z2z4_covering_partition():
    G = make_abelian_product([2, 4])
    e = G.element
    pieces = [
        [e((1, 0))],
        [e((0, 1)), e((0, 2)), e((0, 3))],
        [e((1, 1)), e((0, 2)), e((1, 3))],
    ]
    C = validate_connection_set(G, sorted({g for p in pieces for g in p}))
    return ConnectionPartition(C, pieces, overlap_allowed=True)


def make_partition(orders, pieces, overlap=False):
    G = make_abelian_product(orders)
    idx = [[G.element(x) for x in p] for p in pieces]
    C = validate_connection_set(G, sorted({g for p in idx for g in p}))
    return ConnectionPartition(C, idx, overlap_allowed=overlap)


def cyclic_factor_partition(orders):
    """One piece per cyclic factor: all nonzero multiples of the unit vector."""
    G = make_abelian_product(orders)
    pieces = []
    for j, n in enumerate(orders):
        piece = []
        for a in range(1, n):
            coords = [0] * len(orders)
            coords[j] = a
            piece.append(G.element(coords))
        pieces.append(piece)
    C = validate_connection_set(G, [g for p in pieces for g in p])
    return ConnectionPartition(C, pieces)


# linear algebra oracles --------------------------------------------------------


def brute_adjacency(G, C):
    n = G.order
    A = np.zeros((n, n), dtype=int)
    members = set(C)
    for g in range(n):
        for h in range(n):
            if G.op(g, G.inv(h)) in members:
                A[g, h] = 1
    return A


def series_expm(X, tol=1e-16):
    """exp(X) by scaling and squaring with a truncated Taylor series."""
    X = np.asarray(X, dtype=complex)
    norm = np.max(np.sum(np.abs(X), axis=1))
    s = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    Y = X / 2**s
    result = np.eye(X.shape[0], dtype=complex)
    term = np.eye(X.shape[0], dtype=complex)
    k = 1
    while True:
        term = term @ Y / k
        result = result + term
        if np.max(np.abs(term)) < tol:
            break
        k += 1
    for _ in range(s):
        result = result @ result
    return result


def exact_reflection(cells, n):
    """H = 2 sum |u><u| - I in exact rationals times 1 (entries 2/gamma - delta)."""
    H = [[Fraction(-1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for cell in cells:
        g = len(cell)
        for a in cell:
            for b in cell:
                H[a][b] += Fraction(2, g)
    return H
