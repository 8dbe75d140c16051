"""Finite groups with elements indexed ``0..n-1``.

Two backings are supported: a direct product of cyclic groups (elements are
mixed-radix encoded coordinate tuples, last coordinate fastest) and an
explicit multiplication table. All set-valued results are sorted tuples of
element indices.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .exceptions import GroupError

MAX_ORDER = 4096
EXHAUSTIVE_ASSOCIATIVITY_LIMIT = 64
ASSOCIATIVITY_SAMPLES = 10_000

ElementSet = tuple  # sorted tuple of distinct element indices


def element_set(elements: Iterable[int]) -> ElementSet:
    return tuple(sorted({int(e) for e in elements}))


class FiniteGroup:
    """A finite group whose elements are the integers ``0..order-1``.

    Use :func:`make_abelian_product` or :func:`make_from_table` rather than
    calling the constructor directly.
    """

    def __init__(self, order, identity, inverse, *, table=None, orders=None, name=None):
        self.order = int(order)
        self.identity = int(identity)
        self._inverse = np.asarray(inverse, dtype=np.int64)
        self._inverse.setflags(write=False)
        self._table = None
        if table is not None:
            self._table = np.asarray(table, dtype=np.int64)
            self._table.setflags(write=False)
        self.orders = tuple(orders) if orders is not None else None
        self.name = name or (
            "x".join(f"Z{k}" for k in self.orders) if self.orders else f"G{self.order}"
        )
        self._is_abelian = True if self.orders is not None else None

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    def __len__(self):
        return self.order

    @property
    def is_abelian(self) -> bool:
        if self._is_abelian is None:
            t = self._table
            self._is_abelian = bool(np.array_equal(t, t.T))
        return self._is_abelian

    @property
    def is_product(self) -> bool:
        return self.orders is not None

    def elements(self) -> range:
        return range(self.order)

    # arithmetic

    def op_many(self, g, h) -> np.ndarray:
        """Broadcasting product ``g * h`` over integer arrays."""
        g = np.asarray(g, dtype=np.int64)
        h = np.asarray(h, dtype=np.int64)
        if self._table is not None:
            return self._table[g, h]
        g, h = np.broadcast_arrays(g, h)
        a = np.unravel_index(g, self.orders)
        b = np.unravel_index(h, self.orders)
        summed = tuple((x + y) % k for x, y, k in zip(a, b, self.orders))
        return np.ravel_multi_index(summed, self.orders)

    def op(self, g: int, h: int) -> int:
        self._check_member(g)
        self._check_member(h)
        return int(self.op_many(g, h))

    def inv(self, g: int) -> int:
        self._check_member(g)
        return int(self._inverse[g])

    def inv_many(self, g) -> np.ndarray:
        return self._inverse[np.asarray(g, dtype=np.int64)]

    def ord(self, g: int) -> int:
        self._check_member(g)
        k, x = 1, g
        while x != self.identity:
            x = int(self.op_many(x, g))
            k += 1
        return k

    def power(self, g: int, k: int) -> int:
        x = self.identity
        for _ in range(k % self.ord(g)):
            x = int(self.op_many(x, g))
        return x

    def multiplication_table(self) -> np.ndarray:
        if self._table is not None:
            return self._table
        idx = np.arange(self.order)
        return self.op_many(idx[:, None], idx[None, :])

    # element naming

    def element(self, label) -> int:
        """Index of an element given as an index or a coordinate sequence."""
        if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
            self._check_member(int(label))
            return int(label)
        if self.orders is None:
            raise GroupError(f"table-backed group {self.name} takes integer elements, got {label!r}")
        coords = tuple(label)
        if len(coords) != len(self.orders) or not all(
            isinstance(c, (int, np.integer)) and not isinstance(c, bool) for c in coords
        ):
            raise GroupError(f"element {label!r} does not match cycle orders {list(self.orders)}")
        if any(not 0 <= c < k for c, k in zip(coords, self.orders)):
            raise GroupError(f"element {label!r} out of range for {list(self.orders)}")
        return int(np.ravel_multi_index(coords, self.orders))

    def coords(self, g: int) -> tuple:
        self._check_member(g)
        if self.orders is None:
            return (g,)
        return tuple(int(c) for c in np.unravel_index(g, self.orders))

    def label(self, g: int):
        """JSON-friendly name: coordinate list for products, index otherwise."""
        return list(self.coords(g)) if self.orders is not None else int(g)

    def format(self, g: int) -> str:
        if self.orders is None:
            return str(g)
        return "(" + ",".join(map(str, self.coords(g))) + ")"

    def _check_member(self, g):
        if not isinstance(g, (int, np.integer)) or not 0 <= g < self.order:
            raise GroupError(f"{g!r} is not an element of {self.name}")


def make_abelian_product(orders: Sequence[int], *, cap: int = MAX_ORDER) -> FiniteGroup:
    """Direct product Z_{n1} x ... x Z_{nr} with componentwise addition."""
    orders = [int(k) for k in orders]
    if not orders:
        raise GroupError("abelian product needs at least one cycle order")
    if any(k < 2 for k in orders):
        raise GroupError(f"cycle orders must be >= 2, got {orders}")
    n = int(np.prod(orders))
    if n > cap:
        raise GroupError(f"group order {n} exceeds cap {cap}")
    idx = np.arange(n)
    coords = np.unravel_index(idx, orders)
    inverse = np.ravel_multi_index(tuple((-c) % k for c, k in zip(coords, orders)), orders)
    return FiniteGroup(n, 0, inverse, orders=orders)


def make_from_table(table, *, name=None, cap: int = MAX_ORDER, seed: int = 0) -> FiniteGroup:
    """Validate a multiplication table ``table[a][b] = a*b`` and wrap it.

    Associativity is checked on every triple up to order 64 and on a seeded
    random sample of triples above that.
    """
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise GroupError(f"multiplication table must be a non-empty square array, got shape {t.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        raise GroupError("multiplication table entries must be integers")
    n = t.shape[0]
    if n > cap:
        raise GroupError(f"group order {n} exceeds cap {cap}")
    t = t.astype(np.int64)
    if t.min() < 0 or t.max() >= n:
        raise GroupError(f"table entries must lie in [0, {n})")

    idx = np.arange(n)
    ids = [e for e in range(n) if np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx)]
    if not ids:
        raise GroupError("table has no two-sided identity")
    e = ids[0]

    inverse = np.full(n, -1, dtype=np.int64)
    for a in range(n):
        right = np.flatnonzero(t[a] == e)
        both = [b for b in right if t[b, a] == e]
        if not both:
            raise GroupError(f"element {a} has no two-sided inverse")
        inverse[a] = both[0]

    if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT:
        lhs = t[t[:, :, None], idx[None, None, :]]
        rhs = t[idx[:, None, None], t[None, :, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            a, b, c = (int(x) for x in bad[0])
            raise GroupError(f"associativity fails for triple ({a}, {b}, {c})")
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, ASSOCIATIVITY_SAMPLES))
        bad = np.flatnonzero(t[t[a, b], c] != t[a, t[b, c]])
        if len(bad):
            i = bad[0]
            raise GroupError(f"associativity fails for triple ({a[i]}, {b[i]}, {c[i]})")

    return FiniteGroup(n, e, inverse, table=t, name=name)


def permutation_group_table(perms: Sequence[Sequence[int]]):
    """Multiplication table of a list of permutations closed under composition.

    The product ``p*q`` is "apply q, then p": ``(p*q)[i] = p[q[i]]``.
    """
    perms = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(perms)}
    if len(index) != len(perms):
        raise GroupError("duplicate permutations")
    n = len(perms)
    table = np.empty((n, n), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            r = tuple(p[k] for k in q)
            if r not in index:
                raise GroupError("permutations are not closed under composition")
            table[i, j] = index[r]
    return table


# subgroup machinery


def subgroup_closure(G: FiniteGroup, S: Iterable[int]) -> ElementSet:
    """Smallest subgroup of ``G`` containing ``S``."""
    gens = element_set(S)
    for g in gens:
        G._check_member(g)
    seen = {G.identity}
    frontier = [G.identity]
    gen_arr = np.asarray(gens, dtype=np.int64)
    while frontier and len(gen_arr):
        prods = G.op_many(np.asarray(frontier)[:, None], gen_arr[None, :]).ravel()
        frontier = []
        for x in prods.tolist():
            if x not in seen:
                seen.add(x)
                frontier.append(x)
    return element_set(seen)


def _is_subgroup(G: FiniteGroup, H: ElementSet) -> bool:
    if G.identity not in H:
        return False
    arr = np.asarray(H, dtype=np.int64)
    members = np.zeros(G.order, dtype=bool)
    members[arr] = True
    prods = G.op_many(arr[:, None], arr[None, :])
    return bool(members[prods].all() and members[G.inv_many(arr)].all())


def is_subgroup_with_id(G: FiniteGroup, piece: Iterable[int]) -> bool:
    """True iff ``piece`` together with the identity forms a subgroup."""
    piece = element_set(piece)
    for g in piece:
        G._check_member(g)
    if G.identity in piece:
        raise GroupError(f"connection-set piece contains the identity {G.format(G.identity)}")
    return _is_subgroup(G, element_set(piece + (G.identity,)))


def right_cosets(G: FiniteGroup, H: Iterable[int]) -> list:
    """Right cosets ``H*g``, each sorted, listed by minimal element."""
    H = element_set(H)
    if not _is_subgroup(G, H):
        raise GroupError(f"{[G.format(h) for h in H]} is not a subgroup of {G.name}")
    harr = np.asarray(H, dtype=np.int64)
    covered = np.zeros(G.order, dtype=bool)
    cosets = []
    for g in range(G.order):
        if covered[g]:
            continue
        coset = element_set(G.op_many(harr, g).tolist())
        covered[list(coset)] = True
        cosets.append(coset)
    return cosets


def set_product(G: FiniteGroup, S: Iterable[int], T: Iterable[int]) -> ElementSet:
    """The product set ``{s*t : s in S, t in T}``."""
    s = np.asarray(element_set(S), dtype=np.int64)
    t = np.asarray(element_set(T), dtype=np.int64)
    if not len(s) or not len(t):
        return ()
    return element_set(np.unique(G.op_many(s[:, None], t[None, :])).tolist())


def all_subgroups(G: FiniteGroup) -> list:
    """Every subgroup of ``G``, found as joins of cyclic subgroups.

    Intended for small groups; the number of joins grows quickly.
    """
    cyclic = {subgroup_closure(G, [g]) for g in G.elements()}
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        new = set()
        for H in frontier:
            for C in cyclic:
                if set(C) <= set(H):
                    continue
                J = subgroup_closure(G, H + C)
                if J not in found:
                    new.add(J)
        found |= new
        frontier = new
    return sorted(found, key=lambda H: (len(H), H))
