import math

import numpy as np
import pytest

from helpers import (
    abelian_order_lists,
    cyclic_factor_partition,
    z2z2z3_partition,
    z2z4_covering_partition,
    make_partition,
    s3,
)
from walklab import (
    Angle,
    ConnectionPartition,
    HypothesisError,
    build_tessellations,
    certify_ium,
    detect_ium,
    detect_period,
    detect_pst,
    expi_reflection,
    ium_schedule,
    make_abelian_product,
    power,
    pst_schedule,
    reflection_from_tessellation,
    validate_connection_set,
)
from walklab.phenomena import evolve_schedule, transfer_map


def _brute_product(P, thetas):
    """U as a product of dense exponentials built from the cell projectors."""
    n = P.group.order
    U = np.eye(n, dtype=complex)
    for t, th in zip(build_tessellations(P), thetas):
        H = -np.eye(n)
        for cell in t.cells:
            v = np.zeros(n)
            v[list(cell)] = 1 / math.sqrt(len(cell))
            H += 2 * np.outer(v, v)
        w, V = np.linalg.eigh(H)
        U = U @ (V @ np.diag(np.exp(1j * th.radians * w)) @ V.T)
    return U


def _pairs(report):
    return {(p["source"], p["target"]) for p in report.witness["pairs"]}


# PST schedules -------------------------------------------------------------------


def test_pst_schedule_two_targets():
    P = z2z2z3_partition()
    s = pst_schedule(P, 1, [0, 1])
    assert s.thetas == (Angle(1, 2), Angle(1, 2), Angle(3))
    G = P.group
    assert s.target_element == G.element((1, 1, 0))
    U = evolve_schedule(P, s.thetas)
    rep = detect_pst(U, 1)
    expected = {(g, G.op(G.element((1, 1, 0)), g)) for g in G.elements()}
    assert rep.passed and _pairs(rep) == expected
    assert all(p["fidelity"] >= 1 - 1e-9 for p in rep.witness["pairs"])
    assert np.max(np.abs(U.matrix - _brute_product(P, s.thetas))) < 1e-12


def test_pst_schedule_single_target():
    P = z2z2z3_partition()
    G = P.group
    s = pst_schedule(P, 1, [0])
    assert s.thetas[0] == Angle(1, 2)
    U = evolve_schedule(P, s.thetas)
    shift = {(g, G.op(G.element((1, 0, 0)), g)) for g in G.elements()}
    assert _pairs(detect_pst(U, 1)) == shift
    # the hand-picked angle pi for the second matching gives the same transfer
    U2 = evolve_schedule(P, [Angle(1, 2), Angle(1), Angle(2)])
    assert _pairs(detect_pst(U2, 1)) == shift


def test_pst_overlapping_covering():
    P = z2z4_covering_partition()
    G = P.group
    U = evolve_schedule(P, [Angle(1, 2), Angle(2), Angle(2)])
    rep = detect_pst(U, 1)
    assert (G.element((1, 2)), G.element((0, 2))) in _pairs(rep)
    s = pst_schedule(P, 1, [0])
    rep = detect_pst(evolve_schedule(P, s.thetas), 1)
    assert (G.element((1, 2)), G.element((0, 2))) in _pairs(rep)


def test_pst_schedule_errors():
    P = z2z2z3_partition()
    with pytest.raises(HypothesisError, match="singleton"):
        pst_schedule(P, 1, [2])
    with pytest.raises(HypothesisError, match="out of range"):
        pst_schedule(P, 1, [3])
    with pytest.raises(HypothesisError):
        pst_schedule(P, 1, [])
    with pytest.raises(ValueError):
        pst_schedule(P, 0, [0])
    with pytest.raises(HypothesisError, match="singleton"):
        pst_schedule(make_partition([4], [[(1,), (2,), (3,)]]), 1, [0])


def test_pst_rejects_noncommuting_pieces():
    G, perms = s3()
    a, b = perms.index((1, 0, 2)), perms.index((2, 1, 0))
    P = ConnectionPartition(validate_connection_set(G, [a, b]), [[a], [b]])
    with pytest.raises(HypothesisError, match="commute"):
        pst_schedule(P, 1, [0])


def test_detect_pst_examples():
    assert not detect_pst(np.eye(4), 1).passed
    P = z2z2z3_partition()
    U = evolve_schedule(P, [Angle(1, 3), Angle(1, 3), Angle(2)])
    for T in range(1, 7):
        assert not detect_pst(U, T).passed
    with pytest.raises(ValueError):
        detect_pst(U, 0)


def _pst_partition(orders, j):
    """Singleton {n_j/2 e_j} plus the full cyclic piece of every other factor."""
    G = make_abelian_product(orders)
    half = [0] * len(orders)
    half[j] = orders[j] // 2
    pieces = [[G.element(half)]]
    for i, n in enumerate(orders):
        if i == j:
            continue
        piece = []
        for a in range(1, n):
            c = [0] * len(orders)
            c[i] = a
            piece.append(G.element(c))
        pieces.append(piece)
    C = validate_connection_set(G, sorted(g for p in pieces for g in p))
    return ConnectionPartition(C, pieces)


EVEN_CASES = [
    (o, j) for o in abelian_order_lists(16) if math.prod(o) % 2 == 0
    for j, n in enumerate(o) if n % 2 == 0
]


@pytest.mark.parametrize("orders, j", EVEN_CASES, ids=lambda x: str(x))
@pytest.mark.parametrize("T", [1, 2, 3])
def test_pst_end_to_end(orders, j, T):
    P = _pst_partition(orders, j)
    s = pst_schedule(P, T, [0])
    U = evolve_schedule(P, s.thetas)
    rep = detect_pst(U, T)
    assert rep.passed and rep.witness["phase_permutation"]
    assert rep.witness["permutation"] == transfer_map(P, s).tolist()
    assert detect_period(U, 4 * T).witness["period"] == 2 * T


@pytest.mark.parametrize("T", [1, 2, 3])
def test_pst_all_order2_targets(T):
    P = cyclic_factor_partition([2, 2, 2, 2])
    G = P.group
    s = pst_schedule(P, T, [0, 1, 2, 3])
    assert s.target_element == G.element((1, 1, 1, 1))
    rep = detect_pst(evolve_schedule(P, s.thetas), T)
    assert rep.witness["permutation"] == [G.op(s.target_element, g) for g in G.elements()]


# uniform mixing ---------------------------------------------------------------------


def test_ium_schedule_examples():
    P = make_partition([2], [[(1,)]])
    assert ium_schedule(P, 1).thetas == (Angle(1, 4),)
    P = make_partition([2, 3], [[(1, 0)], [(0, 1), (0, 2)]])
    assert ium_schedule(P, 2).thetas == (Angle(1, 8), Angle(1, 6))
    with pytest.raises(HypothesisError, match="sqrt"):
        ium_schedule(make_partition([5], [[(1,), (2,), (3,), (4,)]]), 1)


def test_ium_schedule_errors():
    with pytest.raises(HypothesisError, match="disjoint"):
        ium_schedule(z2z4_covering_partition(), 1)
    with pytest.raises(HypothesisError, match="generate"):
        ium_schedule(make_partition([2, 4], [[(0, 2)]]), 1)
    with pytest.raises(ValueError):
        ium_schedule(make_partition([2], [[(1,)]]), 0)


def test_detect_ium_examples():
    X = np.array([[0, 1], [1, 0]])
    rep = detect_ium((np.eye(2) + 1j * X) / math.sqrt(2))
    assert rep.passed and rep.witness["min_abs"] == pytest.approx(1 / math.sqrt(2))
    assert not detect_ium(np.eye(3)).passed

    P = make_partition([2, 3], [[(1, 0)], [(0, 1), (0, 2)]])
    s = ium_schedule(P, 2)
    rep = detect_ium(power(evolve_schedule(P, s.thetas), 2))
    assert rep.passed
    assert rep.witness["max_abs"] == pytest.approx(1 / math.sqrt(6), abs=1e-9)


IUM_PARTITIONS = [cyclic_factor_partition(o) for o in abelian_order_lists(48) if set(o) <= {2, 3, 4}] + [
    make_partition([2, 2], [[(0, 1), (1, 0), (1, 1)]]),
    make_partition([2, 2, 2], [[(0, 1, 0), (1, 0, 0), (1, 1, 0)], [(0, 0, 1)]]),
    make_partition([2, 2, 3], [[(1, 0, 0)], [(0, 1, 0)], [(0, 0, 1), (0, 0, 2)]]),
    make_partition([4, 2], [[(1, 0), (2, 0), (3, 0)], [(0, 1)]]),
]


@pytest.mark.parametrize("P", IUM_PARTITIONS, ids=lambda P: P.group.name + f"/k{P.k}")
@pytest.mark.parametrize("T", [1, 2])
def test_ium_end_to_end(P, T):
    schedule, rep = certify_ium(P, T)
    assert rep.witness["factors_group"]
    assert rep.passed, rep.witness
    assert rep.witness["max_abs"] - rep.witness["min_abs"] < 2e-9
    assert all(f["factor_flat"] and f["product_flat"] for f in rep.witness["factors"])


def test_ium_requires_factorization_counterexample():
    # Every stated hypothesis holds but the subgroups do not factor Z2^3.
    P = make_partition([2, 2, 2], [[(1, 0, 0)], [(0, 1, 0)], [(0, 0, 1)], [(1, 1, 1)]])
    schedule, rep = certify_ium(P, 1)
    assert not rep.witness["factors_group"]
    assert not rep.passed
    assert rep.witness["min_abs"] < 1e-9


def test_k5_never_flat():
    P = make_partition([5], [[(1,), (2,), (3,), (4,)]])
    (t,) = build_tessellations(P)
    H = reflection_from_tessellation(t)
    best = min(
        detect_ium(expi_reflection(H, Angle(k, 360))).witness["max_deviation"]
        for k in range(1, 721)
    )
    assert best > 1e-6


# periodicity ---------------------------------------------------------------------


def test_detect_period_examples():
    rep = detect_period(np.eye(3), 5)
    assert rep.passed and rep.witness["period"] == 1
    P = z2z2z3_partition()
    s = pst_schedule(P, 1, [0, 1])
    assert detect_period(evolve_schedule(P, s.thetas), 10).witness["period"] == 2
    with pytest.raises(ValueError):
        detect_period(np.eye(2), 0)


def test_rational_time_period_excludes_pst():
    P = z2z2z3_partition()
    U = evolve_schedule(P, [Angle(1, 3), Angle(1, 3), Angle(2)])
    rep = detect_period(U, 12)
    assert rep.witness["period"] == 3
    assert not any(detect_pst(U, T).passed for T in range(1, 7))


def test_no_period_found():
    P = z2z2z3_partition()
    U = evolve_schedule(P, [Angle(1, 7), Angle(1, 5), Angle(1, 11)])
    rep = detect_period(U, 20)
    assert not rep.passed and rep.witness["period"] is None
