"""Reflection Hamiltonians, staggered evolution and the continuous-time reference.

Angles are kept as exact rational multiples of pi so that schedules such as
``T * theta = pi/2`` land exactly on the zeros of sine and cosine.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .cayley import adjacency_matrix
from .exceptions import HypothesisError
from .tessellation import ConnectionPartition, Tessellation, build_tessellations, classify_covering, commute_matrix

CONSTRUCTION_TOL = 1e-12
IDENTITY_TOL = 1e-10
EVOLUTION_TOL = 1e-9


@dataclass(frozen=True, order=True)
class Angle:
    """The angle ``num/den * pi``, stored reduced with ``den > 0``."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den == 0:
            raise ValueError("angle denominator must be nonzero")
        f = Fraction(self.num, self.den)
        object.__setattr__(self, "num", f.numerator)
        object.__setattr__(self, "den", f.denominator)

    @classmethod
    def from_fraction(cls, f) -> "Angle":
        f = Fraction(f)
        return cls(f.numerator, f.denominator)

    @property
    def coefficient(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def radians(self) -> float:
        return math.pi * self.num / self.den

    def cos_sin(self) -> tuple:
        r = self.coefficient % 2
        exact = {Fraction(0): (1.0, 0.0), Fraction(1, 2): (0.0, 1.0),
                 Fraction(1): (-1.0, 0.0), Fraction(3, 2): (0.0, -1.0)}
        if r in exact:
            return exact[r]
        x = math.pi * float(r)
        return math.cos(x), math.sin(x)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Angle.from_fraction(self.coefficient * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Angle.from_fraction(self.coefficient / other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Angle):
            return Angle.from_fraction(self.coefficient + other.coefficient)
        return NotImplemented

    def __neg__(self):
        return Angle(-self.num, self.den)

    def __str__(self):
        if self.num == 0:
            return "0"
        return f"{self.num} pi" if self.den == 1 else f"{self.num}/{self.den} pi"


AngleLike = Union[Angle, float, int]

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?:(?P<p>\d+)\s*(?:/\s*(?P<q>\d+))?\s*\*?\s*)?pi(?:\s*/\s*(?P<q2>\d+))?\s*$"
)


def parse_angle(text) -> AngleLike:
    """Parse ``"p/q pi"``, ``"pi/q"``, ``"3pi"``, ``"-1/4 pi"`` exactly; bare numbers are radians."""
    if isinstance(text, Angle):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not an angle: {text!r}")
    if isinstance(text, (int, float)):
        if not math.isfinite(text):
            raise ValueError(f"angle must be finite, got {text!r}")
        return float(text)
    s = str(text).strip()
    m = _ANGLE_RE.match(s)
    if m:
        p = int(m["p"]) if m["p"] else 1
        q = int(m["q"]) if m["q"] else 1
        if m["q2"]:
            if m["q"]:
                raise ValueError(f"ambiguous angle {text!r}")
            q = int(m["q2"])
        if q == 0:
            raise ValueError(f"zero denominator in angle {text!r}")
        sign = -1 if m["sign"] == "-" else 1
        return Angle(sign * p, q)
    try:
        value = float(s)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}; use 'p/q pi' or radians") from None
    if not math.isfinite(value):
        raise ValueError(f"angle must be finite, got {text!r}")
    if value == 0:
        return Angle(0)
    return value


def cos_sin(theta: AngleLike) -> tuple:
    if isinstance(theta, Angle):
        return theta.cos_sin()
    return math.cos(theta), math.sin(theta)


def angle_to_json(theta: AngleLike):
    return str(theta) if isinstance(theta, Angle) else float(theta)


def scale_angle(theta: AngleLike, factor) -> AngleLike:
    if isinstance(theta, Angle):
        return theta * factor
    return float(theta) * float(factor)


@dataclass(frozen=True)
class ReflectionOperator:
    matrix: np.ndarray = field(repr=False)
    gamma: int
    tessellation: Tessellation = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class EvolutionOperator:
    matrix: np.ndarray = field(repr=False)
    provenance: tuple = ()

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def reflection_from_tessellation(T: Tessellation) -> ReflectionOperator:
    """``H = 2 sum_cells |u><u| - I`` with ``u`` uniform on each cell.

    The result is cross-checked against ``(2A + (2 - gamma) I) / gamma``.
    """
    sizes = {len(c) for c in T.cells}
    if len(sizes) != 1:
        raise ValueError(f"tessellation {T.index} is not uniform: cell sizes {sorted(sizes)}")
    n = T.adjacency.shape[0]
    H = -np.eye(n, dtype=complex)
    for cell in T.cells:
        u = np.zeros(n)
        u[list(cell)] = 1 / math.sqrt(len(cell))
        H += 2 * np.outer(u, u)
    g = T.gamma
    via_adjacency = (2 * T.adjacency + (2 - g) * np.eye(n)) / g
    if np.max(np.abs(H - via_adjacency)) > CONSTRUCTION_TOL:
        raise RuntimeError(f"projector and adjacency forms of H disagree for tessellation {T.index}")
    H.setflags(write=False)
    return ReflectionOperator(H, g, T)


def _as_matrix(M) -> np.ndarray:
    if isinstance(M, (ReflectionOperator, EvolutionOperator)):
        return M.matrix
    return np.asarray(M)


def expi_reflection(H, phi: AngleLike) -> np.ndarray:
    """``exp(i phi H) = cos(phi) I + i sin(phi) H``, exact because ``H^2 = I``."""
    H = _as_matrix(H)
    c, s = cos_sin(phi)
    return c * np.eye(H.shape[0], dtype=complex) + 1j * s * H


def staggered_step(Hs: Sequence[ReflectionOperator], thetas: Sequence[AngleLike]) -> EvolutionOperator:
    """Ordered product ``exp(i theta_1 H_1) ... exp(i theta_k H_k)``."""
    if len(Hs) != len(thetas):
        raise ValueError(f"{len(Hs)} operators but {len(thetas)} angles")
    if not Hs:
        raise ValueError("need at least one reflection operator")
    n = _as_matrix(Hs[0]).shape[0]
    U = np.eye(n, dtype=complex)
    provenance = []
    for i, (H, theta) in enumerate(zip(Hs, thetas)):
        M = _as_matrix(H)
        if M.shape != (n, n):
            raise ValueError(f"operator {i} has shape {M.shape}, expected {(n, n)}")
        U = U @ expi_reflection(M, theta)
        tid = H.tessellation.index if isinstance(H, ReflectionOperator) else i
        provenance.append((tid, theta))
    return EvolutionOperator(U, tuple(provenance))


def power(U, T: int) -> np.ndarray:
    """``U**T`` by repeated squaring."""
    if T < 0:
        raise ValueError("power must be nonnegative")
    return np.linalg.matrix_power(_as_matrix(U), int(T))


def ctqw(A, t: float) -> np.ndarray:
    """Continuous-time walk ``exp(i t A)`` from the eigendecomposition of symmetric ``A``."""
    A = np.asarray(A, dtype=float)
    if not np.allclose(A, A.T):
        raise ValueError("adjacency matrix must be symmetric")
    w, V = np.linalg.eigh(A)
    return (V * np.exp(1j * t * w)) @ V.T


def global_phase(M, N):
    """Phase ``beta`` with ``M ~ exp(i beta) N`` read off the largest entry of ``N``."""
    M = _as_matrix(M)
    N = _as_matrix(N)
    if M.shape != N.shape:
        raise ValueError(f"shape mismatch: {M.shape} vs {N.shape}")
    idx = np.unravel_index(np.argmax(np.abs(N)), N.shape)
    if np.abs(N[idx]) == 0:
        raise ValueError("reference matrix is all zero")
    return float(np.angle(M[idx] / N[idx]))


def phase_equal(M, N, tol: float = EVOLUTION_TOL) -> bool:
    """True iff ``M == exp(i beta) N`` entrywise within ``tol`` for some real ``beta``."""
    beta = global_phase(M, N)
    return bool(np.max(np.abs(_as_matrix(M) - np.exp(1j * beta) * _as_matrix(N))) <= tol)


def unitarity_residual(U) -> float:
    U = _as_matrix(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


@dataclass
class DiscretizationReport:
    theta: AngleLike
    k: int
    gamma_total: int
    deviations: list
    tol: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations) if self.deviations else 0.0

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tol

    def to_dict(self) -> dict:
        return {
            "theta": angle_to_json(self.theta),
            "k": self.k,
            "gamma_total": self.gamma_total,
            "deviations": [{"T": t, "max_abs": d} for t, d in enumerate(self.deviations)],
            "max_deviation": self.max_deviation,
            "tol": self.tol,
            "pass": self.passed,
        }


def discretization_check(P: ConnectionPartition, theta: AngleLike, Tmax: int,
                         tol: float = EVOLUTION_TOL) -> DiscretizationReport:
    """Compare ``U^T`` with ``exp(i theta (2k - gamma) T) exp(2 i theta T A)`` for ``T = 0..Tmax``.

    ``U`` uses the angles ``theta_i = theta * gamma_i``; the right-hand side is
    evaluated independently through :func:`ctqw`.
    """
    tess = build_tessellations(P)
    report = classify_covering(P, tess)
    if report.kind != "factorization":
        raise HypothesisError(
            f"discretization needs a tessellation factorization; got a covering with "
            f"{len(report.shared_edges)} shared edges"
        )
    if not report.uniform:
        raise HypothesisError("discretization needs a uniform tessellation factorization")
    for a, b in combinations(tess, 2):
        if not commute_matrix(a.adjacency, b.adjacency):
            raise HypothesisError(f"adjacency matrices of pieces {a.index} and {b.index} do not commute")

    A = adjacency_matrix(P.connection)
    Hs = [reflection_from_tessellation(t) for t in tess]
    U = staggered_step(Hs, [scale_angle(theta, t.gamma) for t in tess])
    k, gamma = report.k, report.gamma_total
    deviations = []
    for T in range(Tmax + 1):
        UT = power(U, T)
        c, s = cos_sin(scale_angle(theta, (2 * k - gamma) * T))
        t = 2 * T * (theta.radians if isinstance(theta, Angle) else float(theta))
        rhs = complex(c, s) * ctqw(A, t)
        deviations.append(float(np.max(np.abs(UT - rhs))))
    return DiscretizationReport(theta, k, gamma, deviations, tol)
