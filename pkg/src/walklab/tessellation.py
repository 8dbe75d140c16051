"""Coset tessellations of Cayley graphs.

A piece ``C_i`` of the connection set with ``C_i + {id}`` a subgroup yields a
tessellation whose cells are the right cosets of that subgroup. Each cell is a
clique of ``Cay(G, C_i)``, so all cells of one tessellation share a size
``gamma_i = |C_i| + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .cayley import ConnectionSet, adjacency_matrix
from .exceptions import PartitionError
from .groups import ElementSet, FiniteGroup, element_set, is_subgroup_with_id, right_cosets, set_product


@dataclass(frozen=True)
class ConnectionPartition:
    """A connection set split into subgroup pieces.

    With ``overlap_allowed=False`` the pieces must be pairwise disjoint (the
    factorization case); otherwise they only need to cover ``C``.
    """

    connection: ConnectionSet
    pieces: tuple
    overlap_allowed: bool = False

    def __post_init__(self):
        G = self.group
        pieces = tuple(element_set(p) for p in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise PartitionError("partition has no pieces")
        members = set(self.connection.elements)
        for i, p in enumerate(pieces):
            name = self.describe_piece(i)
            if not p:
                raise PartitionError(f"piece {i} is empty")
            if not set(p) <= members:
                extra = [G.format(g) for g in p if g not in members]
                raise PartitionError(f"piece {i} {name} has elements outside the connection set: {extra}")
            if not is_subgroup_with_id(G, p):
                raise PartitionError(f"piece {i} {name} together with the identity is not a subgroup")
        covered = set().union(*map(set, pieces))
        if covered != members:
            missing = [G.format(g) for g in sorted(members - covered)]
            raise PartitionError(f"pieces do not cover the connection set; missing {missing}")
        if not self.overlap_allowed:
            for i, j in combinations(range(len(pieces)), 2):
                shared = set(pieces[i]) & set(pieces[j])
                if shared:
                    raise PartitionError(
                        f"pieces {i} and {j} overlap in {[G.format(g) for g in sorted(shared)]}; "
                        "pass overlap_allowed=True for a covering"
                    )

    @property
    def group(self) -> FiniteGroup:
        return self.connection.group

    @property
    def k(self) -> int:
        return len(self.pieces)

    @property
    def disjoint(self) -> bool:
        return all(not set(a) & set(b) for a, b in combinations(self.pieces, 2))

    def describe_piece(self, i: int) -> str:
        return "{" + ", ".join(self.group.format(g) for g in element_set(self.pieces[i])) + "}"


@dataclass(frozen=True)
class Tessellation:
    index: int
    piece: ElementSet
    cells: tuple
    gamma: int
    adjacency: np.ndarray = field(repr=False, compare=False)
    identity: int = 0

    @property
    def subgroup(self) -> ElementSet:
        return element_set(self.piece + (self.identity,))

    @property
    def n_cells(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class CoveringReport:
    kind: str  # "factorization" or "covering"
    uniform: bool
    k: int
    gamma_total: int
    gammas: tuple
    shared_edges: tuple
    edge_count: int

    def to_dict(self, G: FiniteGroup | None = None) -> dict:
        label = G.label if G is not None else int
        return {
            "kind": self.kind,
            "uniform": self.uniform,
            "k": self.k,
            "gamma_total": self.gamma_total,
            "gammas": list(self.gammas),
            "edge_count": self.edge_count,
            "shared_edges": [[label(a), label(b)] for a, b in self.shared_edges],
        }


def build_tessellations(P: ConnectionPartition) -> list:
    """One uniform coset tessellation per piece of ``P``."""
    G = P.group
    out = []
    for i, piece in enumerate(P.pieces):
        if not is_subgroup_with_id(G, piece):
            raise PartitionError(f"piece {i} {P.describe_piece(i)} together with the identity is not a subgroup")
        H = element_set(piece + (G.identity,))
        cells = tuple(right_cosets(G, H))
        sizes = {len(c) for c in cells}
        if sizes != {len(H)}:
            raise PartitionError(f"piece {i} gives non-uniform cells of sizes {sorted(sizes)}")
        A = adjacency_matrix(ConnectionSet(G, piece, False, True))
        A.setflags(write=False)
        out.append(Tessellation(i, piece, cells, len(H), A, G.identity))
    return out


def classify_covering(P: ConnectionPartition, tessellations: Sequence[Tessellation]) -> CoveringReport:
    """Decide factorization vs covering and list edges lying in several tessellations."""
    A = adjacency_matrix(P.connection)
    count = np.zeros_like(A)
    for t in tessellations:
        count += t.adjacency
    uncovered = np.argwhere((A == 1) & (count == 0))
    if len(uncovered):
        a, b = (int(x) for x in uncovered[0])
        G = P.group
        raise PartitionError(f"edge {G.format(a)}-{G.format(b)} is covered by no tessellation")
    if np.any((A == 0) & (count > 0)):
        raise PartitionError("a tessellation contains an edge outside Cay(G, C)")
    iu = np.triu_indices(A.shape[0], k=1)
    shared = tuple(
        (int(a), int(b)) for a, b in zip(*iu) if count[a, b] >= 2
    )
    uniform = all(len({len(c) for c in t.cells}) == 1 for t in tessellations)
    kind = "factorization" if not shared and P.disjoint else "covering"
    gammas = tuple(t.gamma for t in tessellations)
    return CoveringReport(
        kind=kind,
        uniform=uniform,
        k=len(tessellations),
        gamma_total=sum(gammas),
        gammas=gammas,
        shared_edges=shared,
        edge_count=int(A[iu].sum()),
    )


def commute_settheoretic(G: FiniteGroup, Ci: Iterable[int], Cj: Iterable[int]) -> bool:
    """True iff ``(Ci + id)(Cj + id) == (Cj + id)(Ci + id)`` as sets."""
    Hi = element_set(list(Ci) + [G.identity])
    Hj = element_set(list(Cj) + [G.identity])
    return set_product(G, Hi, Hj) == set_product(G, Hj, Hi)


def commute_matrix(Ai: np.ndarray, Aj: np.ndarray) -> bool:
    """Exact integer commutation test ``Ai @ Aj == Aj @ Ai``."""
    Ai = np.asarray(Ai)
    Aj = np.asarray(Aj)
    if Ai.shape != Aj.shape or Ai.ndim != 2 or Ai.shape[0] != Ai.shape[1]:
        raise ValueError(f"dimension mismatch: {Ai.shape} vs {Aj.shape}")
    Ai = Ai.astype(np.int64)
    Aj = Aj.astype(np.int64)
    return bool(np.array_equal(Ai @ Aj, Aj @ Ai))


def commutation_table(P: ConnectionPartition) -> np.ndarray:
    """Boolean k x k table of pairwise set-theoretic commutation."""
    k = P.k
    out = np.ones((k, k), dtype=bool)
    for i, j in combinations(range(k), 2):
        out[i, j] = out[j, i] = commute_settheoretic(P.group, P.pieces[i], P.pieces[j])
    return out


def subgroup_partitions(C: ConnectionSet, *, max_size: int = 12) -> list:
    """All partitions of ``C`` into pieces ``C_i`` with ``C_i + {id}`` a subgroup.

    Brute force over subsets; only meant for tiny connection sets.
    """
    elems = C.elements
    if len(elems) > max_size:
        raise ValueError(f"connection set of size {len(elems)} exceeds brute-force limit {max_size}")
    G = C.group
    candidates = []
    for r in range(1, len(elems) + 1):
        for subset in combinations(elems, r):
            if is_subgroup_with_id(G, subset):
                candidates.append(frozenset(subset))

    results = []

    def extend(remaining: frozenset, chosen: list):
        if not remaining:
            results.append(tuple(element_set(p) for p in chosen))
            return
        pivot = min(remaining)
        for cand in candidates:
            if pivot in cand and cand <= remaining:
                extend(remaining - cand, chosen + [cand])

    extend(frozenset(elems), [])
    return sorted(results)
