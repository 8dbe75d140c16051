"""Cayley graphs ``Cay(G, C)``: vertices are group elements, ``g ~ h`` iff ``g*h^-1 in C``."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .exceptions import ConnectionSetError
from .groups import ElementSet, FiniteGroup, element_set, subgroup_closure


@dataclass(frozen=True)
class ConnectionSet:
    group: FiniteGroup
    elements: ElementSet
    generates: bool
    power_closed: bool

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def _power_closed(G: FiniteGroup, elems: ElementSet) -> bool:
    members = set(elems)
    for g in elems:
        x = g
        while x != G.identity:
            if x not in members:
                return False
            x = G.op(x, g)
    return True


def validate_connection_set(G: FiniteGroup, elems: Iterable[int]) -> ConnectionSet:
    """Check that ``elems`` is identity-free and inverse-closed and compute its flags.

    ``generates`` is property (1), the set generates ``G``; ``power_closed`` is
    property (2), every power ``g^k`` with ``0 < k < ord(g)`` lies in the set.
    """
    elems = element_set(elems)
    for g in elems:
        G._check_member(g)
    if G.identity in elems:
        raise ConnectionSetError(f"connection set contains the identity {G.format(G.identity)}")
    members = set(elems)
    for g in elems:
        gi = G.inv(g)
        if gi not in members:
            raise ConnectionSetError(
                f"connection set is not inverse-closed: inverse {G.format(gi)} of {G.format(g)} missing"
            )
    generates = len(subgroup_closure(G, elems)) == G.order
    return ConnectionSet(G, elems, generates, _power_closed(G, elems))


def adjacency_matrix(C: ConnectionSet) -> np.ndarray:
    """Dense 0/1 adjacency matrix in canonical element order."""
    G = C.group
    n = G.order
    A = np.zeros((n, n), dtype=np.int64)
    cols = np.arange(n)
    for c in C.elements:
        # g = c*h  <=>  g*h^-1 = c
        A[G.op_many(c, cols), cols] = 1
    return A


def _bfs_connected(A: np.ndarray) -> bool:
    n = A.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in np.flatnonzero(A[v] & ~seen):
            seen[w] = True
            queue.append(int(w))
    return bool(seen.all())


def is_connected(C: ConnectionSet) -> bool:
    """Connectivity from the generation flag, cross-checked by BFS."""
    by_bfs = _bfs_connected(adjacency_matrix(C))
    if by_bfs != C.generates:
        raise RuntimeError(
            f"BFS connectivity ({by_bfs}) disagrees with subgroup generation ({C.generates})"
        )
    return C.generates
