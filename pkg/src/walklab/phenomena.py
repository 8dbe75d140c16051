"""Perfect state transfer, instantaneous uniform mixing and periodicity.

The schedulers pick angles so that the chosen time ``T`` produces the
phenomenon; the detectors certify it numerically on any evolution operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .exceptions import HypothesisError
from .groups import set_product
from .operators import (
    EVOLUTION_TOL,
    Angle,
    AngleLike,
    _as_matrix,
    angle_to_json,
    expi_reflection,
    phase_equal,
    power,
    reflection_from_tessellation,
    scale_angle,
    staggered_step,
)
from .tessellation import ConnectionPartition, build_tessellations, commute_settheoretic

# Per-cell angle at which exp(i theta H) is flat on a cell of the given size.
IUM_ANGLES = {2: Angle(1, 4), 3: Angle(1, 3), 4: Angle(1, 2)}


@dataclass(frozen=True)
class ThetaSchedule:
    thetas: tuple
    T: int
    intent: str = "custom"  # pst | ium | discretize | custom
    targets: tuple = ()
    target_element: Optional[int] = None

    def __post_init__(self):
        if self.T < 1:
            raise ValueError(f"time T must be a positive integer, got {self.T}")
        if self.intent not in {"pst", "ium", "discretize", "custom"}:
            raise ValueError(f"unknown schedule intent {self.intent!r}")

    def to_dict(self) -> dict:
        out = {
            "intent": self.intent,
            "T": self.T,
            "thetas": [angle_to_json(t) for t in self.thetas],
        }
        if self.intent == "pst":
            out["targets"] = list(self.targets)
        return out


@dataclass
class PhenomenonReport:
    kind: str  # pst | ium | period
    passed: bool
    tol: float
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "pass": self.passed, "tol": self.tol, "witness": self.witness}


def _require_commuting(P: ConnectionPartition):
    for i, j in combinations(range(P.k), 2):
        if not commute_settheoretic(P.group, P.pieces[i], P.pieces[j]):
            raise HypothesisError(
                f"pieces {i} and {j} generate subgroups with C_i*C_j != C_j*C_i, "
                "so their adjacency matrices do not commute"
            )


def pst_schedule(P: ConnectionPartition, T: int, targets: Sequence[int]) -> ThetaSchedule:
    """Angles giving perfect state transfer at step ``T``.

    Each targeted piece must be a single element of order 2 and gets
    ``pi/(2T)``; every other piece gets ``gamma_i * pi / T`` so that its factor
    in ``U^T`` is ``+-I``. The transfer is ``a -> g a`` with ``g`` the product
    of the targeted generators.
    """
    G = P.group
    targets = tuple(sorted(set(int(t) for t in targets)))
    if not targets:
        raise HypothesisError("perfect state transfer needs at least one targeted piece")
    if T < 1:
        raise ValueError(f"time T must be a positive integer, got {T}")
    for t in targets:
        if not 0 <= t < P.k:
            raise HypothesisError(f"target piece {t} out of range (k = {P.k})")
        piece = P.pieces[t]
        if len(piece) != 1:
            raise HypothesisError(
                f"target piece {t} {P.describe_piece(t)} is not a singleton; "
                "transfer needs a piece with exactly one element"
            )
        if G.ord(piece[0]) != 2:
            raise HypothesisError(f"target piece {t} {P.describe_piece(t)} is not an element of order 2")
    _require_commuting(P)

    gammas = [len(p) + 1 for p in P.pieces]
    thetas = tuple(
        Angle(1, 2 * T) if i in targets else Angle(gammas[i], T) for i in range(P.k)
    )
    g = G.identity
    for t in targets:
        g = G.op(g, P.pieces[t][0])
    return ThetaSchedule(thetas, T, "pst", targets, g)


def transfer_map(P: ConnectionPartition, schedule: ThetaSchedule) -> np.ndarray:
    """Expected permutation ``a -> target_element * a`` of a PST schedule."""
    G = P.group
    return G.op_many(schedule.target_element, np.arange(G.order))


def _phase_permutation(M: np.ndarray, tol: float):
    """Return ``(perm, alpha)`` if ``M`` is ``alpha`` times a permutation matrix, else ``None``."""
    mags = np.abs(M)
    big = mags >= 1 - tol
    if not (big.sum(axis=0) == 1).all() or not (big.sum(axis=1) == 1).all():
        return None
    if np.max(np.where(big, 0.0, mags)) > tol:
        return None
    perm = np.argmax(big, axis=0)
    entries = M[perm, np.arange(M.shape[0])]
    alpha = entries[0] / abs(entries[0])
    if np.max(np.abs(entries - alpha)) > tol:
        return None
    return perm, complex(alpha)


def detect_pst(U, T: int, tol: float = EVOLUTION_TOL) -> PhenomenonReport:
    """Find every ordered pair ``a != b`` with ``|U^T[b, a]| >= 1 - tol``."""
    if T < 1:
        raise ValueError(f"time T must be >= 1, got {T}")
    UT = power(U, T)
    mags = np.abs(UT)
    hits = np.argwhere(mags >= 1 - tol)
    pairs = [
        {"source": int(a), "target": int(b), "amplitude": float(mags[b, a]),
         "fidelity": float(min(mags[b, a] ** 2, 1.0))}
        for b, a in hits if a != b
    ]
    pairs.sort(key=lambda p: (p["source"], p["target"]))
    witness = {"T": int(T), "pairs": pairs, "phase_permutation": False}
    pp = _phase_permutation(UT, tol)
    if pp is not None:
        perm, alpha = pp
        witness["phase_permutation"] = True
        witness["permutation"] = [int(x) for x in perm]
        witness["alpha"] = [alpha.real, alpha.imag]
    return PhenomenonReport("pst", bool(pairs), tol, witness)


def ium_schedule(P: ConnectionPartition, T: int) -> ThetaSchedule:
    """Angles giving instantaneous uniform mixing at step ``T``.

    Pieces of subgroup order 2, 3, 4 get ``pi/(4T)``, ``pi/(3T)``, ``pi/(2T)``.
    Larger cells cannot be flattened: ``|sin theta| = sqrt(gamma)/2`` has no
    real solution once ``gamma > 4``.

    Uniform mixing of the full product is guaranteed only when the piece
    subgroups factor the group, ``prod(gamma_i) == |G|``; use
    :func:`certify_ium` or :func:`detect_ium` to check other partitions.
    """
    if T < 1:
        raise ValueError(f"time T must be a positive integer, got {T}")
    gammas = [len(p) + 1 for p in P.pieces]
    for i, g in enumerate(gammas):
        if g not in IUM_ANGLES:
            raise HypothesisError(
                f"piece {i} {P.describe_piece(i)} spans a subgroup of order {g} > 4: uniform mixing "
                f"would need |sin theta| = sqrt({g})/2 > 1, which has no real solution"
            )
    if not P.disjoint:
        raise HypothesisError("uniform mixing schedule needs pairwise disjoint pieces")
    _require_commuting(P)
    if not P.connection.generates:
        raise HypothesisError("connection set does not generate the group")
    thetas = tuple(IUM_ANGLES[g] / T for g in gammas)
    return ThetaSchedule(thetas, T, "ium")


def detect_ium(M, tol: float = EVOLUTION_TOL) -> PhenomenonReport:
    """Pass iff every entry of ``M`` has magnitude ``1/sqrt(n)`` within ``tol``."""
    M = _as_matrix(M)
    n = M.shape[0]
    mags = np.abs(M)
    target = 1 / math.sqrt(n)
    dev = float(np.max(np.abs(mags - target)))
    witness = {
        "n": int(n),
        "expected": target,
        "min_abs": float(mags.min()),
        "max_abs": float(mags.max()),
        "max_deviation": dev,
    }
    return PhenomenonReport("ium", dev <= tol, tol, witness)


def _flat_on(M: np.ndarray, support: np.ndarray, value: float, tol: float) -> bool:
    mags = np.abs(M)
    return bool(
        np.max(np.abs(mags[support] - value), initial=0.0) <= tol
        and np.max(mags[~support], initial=0.0) <= tol
    )


def certify_ium(P: ConnectionPartition, T: int, tol: float = EVOLUTION_TOL):
    """Schedule, evolve and certify uniform mixing, checking the factor structure too.

    Each factor ``exp(i theta_i T H_i)`` must be flat on its cells with
    magnitude ``1/sqrt(gamma_i)``; the running product over the first ``j``
    factors must be flat on the product subgroup ``S_1 ... S_j`` with
    magnitude ``1/sqrt(|S_1 ... S_j|)``.
    """
    schedule = ium_schedule(P, T)
    G = P.group
    tess = build_tessellations(P)
    Hs = [reflection_from_tessellation(t) for t in tess]
    U = staggered_step(Hs, schedule.thetas)
    UT = power(U, T)

    idx = np.arange(G.order)
    # (a, b) lies in the same right coset of S iff a * b^-1 in S
    quotient = G.op_many(idx[:, None], G.inv_many(idx)[None, :])
    running = np.eye(G.order, dtype=complex)
    span = (G.identity,)
    steps = []
    ok = True
    for t, H, theta in zip(tess, Hs, schedule.thetas):
        F = expi_reflection(H, scale_angle(theta, T))
        factor_flat = _flat_on(F, np.isin(quotient, t.subgroup), 1 / math.sqrt(t.gamma), tol)
        running = running @ F
        span = set_product(G, span, t.subgroup)
        running_flat = _flat_on(running, np.isin(quotient, span), 1 / math.sqrt(len(span)), tol)
        ok = ok and factor_flat and running_flat
        steps.append({"piece": t.index, "gamma": t.gamma, "factor_flat": factor_flat,
                      "span_order": len(span), "product_flat": running_flat})
    report = detect_ium(UT, tol)
    report.witness["T"] = int(T)
    # Flatness is guaranteed when the subgroups factor G (prod gamma_i = |G|);
    # other admissible partitions may or may not mix uniformly.
    report.witness["factors_group"] = math.prod(t.gamma for t in tess) == G.order
    report.witness["factors"] = steps
    report.witness["product_deviation_from_UT"] = float(np.max(np.abs(running - UT)))
    report.passed = report.passed and ok
    return schedule, report


def detect_period(U, maxP: int, tol: float = EVOLUTION_TOL) -> PhenomenonReport:
    """Smallest ``p <= maxP`` with ``U^p`` equal to ``I`` up to a global phase."""
    if maxP < 1:
        raise ValueError(f"maxP must be >= 1, got {maxP}")
    M = _as_matrix(U)
    eye = np.eye(M.shape[0], dtype=complex)
    P = eye
    for p in range(1, maxP + 1):
        P = P @ M
        if phase_equal(P, eye, tol):
            beta = float(np.angle(P[0, 0]))
            return PhenomenonReport("period", True, tol, {"period": p, "phase": beta, "max_checked": maxP})
    return PhenomenonReport("period", False, tol, {"period": None, "max_checked": maxP})


def evolve_schedule(P: ConnectionPartition, thetas: Sequence[AngleLike]):
    """Build tessellations, reflections and the one-step operator for ``thetas``."""
    tess = build_tessellations(P)
    if len(thetas) != len(tess):
        raise ValueError(f"{len(thetas)} angles for {len(tess)} tessellations")
    Hs = [reflection_from_tessellation(t) for t in tess]
    return staggered_step(Hs, list(thetas))
