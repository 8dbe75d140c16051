"""Scikit-learn style wrapper around the staggered walk pipeline.

``StaggeredWalk`` is fitted on a :class:`ConnectionPartition` (the "data" that
fixes the graph and its tessellations) and then transforms batches of state
vectors by the ``T``-step propagator.

>>> walk = StaggeredWalk(schedule="pst", T=1, targets=[0]).fit(partition)  # doctest: +SKIP
>>> walk.predict_proba(np.eye(walk.n_vertices_))                           # doctest: +SKIP
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .operators import (
    EVOLUTION_TOL,
    parse_angle,
    power,
    reflection_from_tessellation,
    scale_angle,
    staggered_step,
    unitarity_residual,
)
from .phenomena import ThetaSchedule, detect_ium, detect_period, detect_pst, ium_schedule, pst_schedule
from .tessellation import ConnectionPartition, build_tessellations, classify_covering


def check_partition(P) -> ConnectionPartition:
    if not isinstance(P, ConnectionPartition):
        raise TypeError(f"expected a ConnectionPartition, got {type(P).__name__}")
    return P


def check_angles(thetas, k: int) -> tuple:
    if thetas is None:
        raise ValueError("schedule='custom' needs explicit thetas")
    out = tuple(parse_angle(t) for t in thetas)
    if len(out) != k:
        raise ValueError(f"got {len(out)} angles for {k} tessellations")
    return out


def check_states(X, n: int, *, normalize: bool = False) -> np.ndarray:
    """Coerce ``X`` to a 2-d complex array of row state vectors of length ``n``.

    Unlike ``sklearn.utils.check_array`` this accepts complex input.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array of states, got ndim={X.ndim}")
    if X.shape[1] != n:
        raise ValueError(f"states have {X.shape[1]} amplitudes, walk has {n} vertices")
    if not np.all(np.isfinite(X)):
        raise ValueError("states contain NaN or infinity")
    if normalize:
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise ValueError("cannot normalize a zero state")
        X = X / norms
    return X


class StaggeredWalk(TransformerMixin, BaseEstimator):
    """Staggered quantum walk with Hamiltonians on a Cayley graph.

    Parameters
    ----------
    schedule : {"custom", "pst", "ium", "discretize"}
        How the angles are chosen. ``"custom"`` uses ``thetas`` verbatim,
        ``"pst"`` and ``"ium"`` call the corresponding schedulers at time
        ``T``, ``"discretize"`` sets ``theta_i = theta * gamma_i``.
    T : int
        Number of steps applied by :meth:`transform`.
    thetas : sequence of angles, optional
        One angle per piece, as :class:`Angle`, ``"p/q pi"`` strings or radians.
    theta : angle, optional
        Base angle for ``schedule="discretize"``.
    targets : sequence of int, optional
        Singleton order-2 pieces to transfer along for ``schedule="pst"``.
    tol : float
        Tolerance used by the ``detect_*`` helpers.
    """

    def __init__(self, schedule="custom", T=1, thetas=None, theta=None, targets=None, tol=EVOLUTION_TOL):
        self.schedule = schedule
        self.T = T
        self.thetas = thetas
        self.theta = theta
        self.targets = targets
        self.tol = tol

    def fit(self, X, y=None):
        P = check_partition(X)
        if not isinstance(self.T, (int, np.integer)) or self.T < 1:
            raise ValueError(f"T must be a positive integer, got {self.T!r}")
        tess = build_tessellations(P)
        self.tessellations_ = tess
        self.covering_ = classify_covering(P, tess)
        self.reflections_ = [reflection_from_tessellation(t) for t in tess]

        if self.schedule == "pst":
            self.schedule_ = pst_schedule(P, self.T, self.targets or ())
        elif self.schedule == "ium":
            self.schedule_ = ium_schedule(P, self.T)
        elif self.schedule == "discretize":
            if self.theta is None:
                raise ValueError("schedule='discretize' needs theta")
            base = parse_angle(self.theta)
            thetas = tuple(scale_angle(base, t.gamma) for t in tess)
            self.schedule_ = ThetaSchedule(thetas, self.T, "discretize")
        elif self.schedule == "custom":
            self.schedule_ = ThetaSchedule(check_angles(self.thetas, P.k), self.T, "custom")
        else:
            raise ValueError(f"unknown schedule {self.schedule!r}")

        self.partition_ = P
        self.n_vertices_ = P.group.order
        self.evolution_ = staggered_step(self.reflections_, list(self.schedule_.thetas))
        self.propagator_ = power(self.evolution_, self.T)
        return self

    def transform(self, X):
        """Evolve each row state vector by ``U^T``."""
        check_is_fitted(self, "propagator_")
        X = check_states(X, self.n_vertices_)
        return X @ self.propagator_.T

    def predict_proba(self, X):
        """Vertex occupation probabilities ``|U^T x|^2`` for each row state."""
        return np.abs(self.transform(X)) ** 2

    @property
    def unitarity_residual_(self) -> float:
        check_is_fitted(self, "evolution_")
        return unitarity_residual(self.evolution_)

    def detect_pst(self):
        check_is_fitted(self, "evolution_")
        return detect_pst(self.evolution_, self.T, self.tol)

    def detect_ium(self):
        check_is_fitted(self, "propagator_")
        return detect_ium(self.propagator_, self.tol)

    def detect_period(self, max_period: int):
        check_is_fitted(self, "evolution_")
        return detect_period(self.evolution_, max_period, self.tol)
