"""Single-mode Gaussian channels acting on first and second moments.

A channel maps ``(alpha, V) -> (X alpha + delta, X V X^T + Y)``. It is
physical iff ``Y >= 0`` and ``y >= |tau - 1| / 2`` with ``tau = det X`` and
``y = sqrt(det Y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotAState, NotPhysical, NotPositive, get_tol
from .symplectic2 import det2, matrix_rank2, psd_rank2, sym_eig2

CLASS_NAMES = {
    "A1": "zero-transmission",
    "A2": "classical-signal",
    "B1": "single-quadrature-noise",
    "B2": "classical-additive-noise",
    "CL": "lossy",
    "CA": "amplification",
    "D": "phase-conjugating",
    "Id": "perfect-transmission",
}


def _as_mat2(m, name):
    a = np.array(m, dtype=float)
    if a.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _as_vec2(v, name):
    a = np.zeros(2) if v is None else np.array(v, dtype=float).reshape(-1)
    if a.shape != (2,):
        raise ValueError(f"{name} must have 2 entries, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    """Moments map ``(X, Y, delta)``; build validated instances with :func:`new_channel`."""

    X: np.ndarray
    Y: np.ndarray
    delta: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "X", _as_mat2(self.X, "X"))
        Y = _as_mat2(self.Y, "Y")
        object.__setattr__(self, "Y", 0.5 * (Y + Y.T))
        object.__setattr__(self, "delta", _as_vec2(self.delta, "delta"))

    @property
    def tau(self) -> float:
        return det2(self.X)

    @property
    def y(self) -> float:
        return math.sqrt(max(det2(self.Y), 0.0))

    @property
    def rank_x(self) -> int:
        return matrix_rank2(self.X)

    @property
    def rank_y(self) -> int:
        return psd_rank2(self.Y)

    def apply(self, state):
        return apply(self, state)

    def to_dict(self):
        return {"X": self.X.tolist(), "Y": self.Y.tolist(), "delta": self.delta.tolist()}

    def __repr__(self):
        return f"GaussianChannel(X={self.X.tolist()}, Y={self.Y.tolist()}, delta={self.delta.tolist()})"


def channel_from_dict(d, tol=None) -> GaussianChannel:
    return new_channel(d["X"], d["Y"], d.get("delta"), tol=tol)


def check_physical(X, Y, tol=None):
    """Raise unless ``Y >= 0`` and ``y >= |tau - 1|/2`` up to ``tol``."""
    tol = get_tol(tol)
    _, _, l1, l2 = sym_eig2(Y[0, 0], Y[0, 1], Y[1, 1])
    if l2 < -tol:
        raise NotPositive(f"Y has a negative eigenvalue {l2:.6g}")
    tau = det2(X)
    y = math.sqrt(max(det2(Y), 0.0))
    bound = abs(tau - 1.0) / 2.0
    if y < bound - tol:
        raise NotPhysical(
            f"y = {y:.10g} < |tau - 1|/2 = {bound:.10g} (tau = {tau:.10g}); "
            "a quantum channel needs y >= |tau - 1|/2"
        )


def new_channel(X, Y, delta=None, tol=None) -> GaussianChannel:
    """Build a channel and check that it is completely positive.

    Raises:
        NotPositive: ``Y`` has an eigenvalue below ``-tol``.
        NotPhysical: ``y < |tau - 1|/2 - tol``.
    """
    c = GaussianChannel(X, Y, delta)
    check_physical(c.X, c.Y, tol)
    return c


def thermal_channel(tau: float, y: float, tol=None) -> GaussianChannel:
    """``X = sqrt|tau| diag(1, sgn tau)``, ``Y = y I``."""
    return new_channel(fiducial_x(tau), y * np.eye(2), tol=tol)


def fiducial_x(tau: float) -> np.ndarray:
    r = math.sqrt(abs(tau))
    return np.array([[r, 0.0], [0.0, -r if tau < 0 else r]])


def is_entanglement_breaking(c: GaussianChannel, tol=None) -> bool:
    return c.y >= (abs(c.tau) + 1.0) / 2.0 - get_tol(tol)


@dataclass(frozen=True)
class CanonicalClass:
    """Canonical class of a channel with its beam-splitter/two-mode-squeezer realization."""

    tag: str
    tau: float
    y: float
    T: float
    G: float

    @property
    def name(self) -> str:
        return CLASS_NAMES[self.tag]

    @property
    def is_thermal(self) -> bool:
        return self.tag in ("A1", "B2", "CL", "CA", "D", "Id")


def thermal_TG(tau: float, y: float):
    """Invert the canonical-class relations: ``(tau, y) -> (T, G)``."""
    if tau >= 0:
        G = y + (tau + 1.0) / 2.0
        return tau / G, G
    G = y + (abs(tau) + 1.0) / 2.0
    return abs(tau) / (G - 1.0), G


def thermal_tau_y(tag: str, T: float, G: float):
    """Forward canonical-class relations: ``(T, G) -> (tau, y)`` for a given class."""
    if tag == "D":
        return -T * (G - 1.0), (1.0 - T) * (G - 1.0) / 2.0 + G / 2.0
    if tag in ("A1", "A2"):
        return 0.0, G - 0.5
    if tag in ("B1", "Id"):
        return 1.0, 0.0
    return T * G, G * (1.0 - T / 2.0) - 0.5


def classify(c: GaussianChannel, tol=None) -> CanonicalClass:
    """Canonical class from ``(tau, y)`` with ranks breaking the ties at ``tau = 0`` and ``(1, 0)``."""
    tol = get_tol(tol)
    tau, y = c.tau, c.y
    rx, ry = c.rank_x, c.rank_y
    if rx < 2:
        tag, tau = ("A2" if rx == 1 else "A1"), 0.0
    elif ry < 2:
        tag, y = ("B1" if ry == 1 else "Id"), 0.0
    elif abs(tau - 1.0) <= tol:
        tag = "B2"
    elif tau < 0:
        tag = "D"
    elif tau < 1:
        tag = "CL"
    else:
        tag = "CA"
    T, G = thermal_TG(tau, y)
    return CanonicalClass(tag, tau, y, T, G)


def compose(c2: GaussianChannel, c1: GaussianChannel) -> GaussianChannel:
    """Channel ``c2 o c1`` (``c1`` acts first)."""
    X = c2.X @ c1.X
    Y = c2.X @ c1.Y @ c2.X.T + c2.Y
    return GaussianChannel(X, Y, c2.X @ c1.delta + c2.delta)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Single-mode Gaussian state with coherent vector ``alpha`` and covariance ``V``."""

    alpha: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_vec2(self.alpha, "alpha"))
        V = _as_mat2(self.V, "V")
        object.__setattr__(self, "V", 0.5 * (V + V.T))

    @property
    def mean_photon_number(self) -> float:
        return 0.5 * (np.trace(self.V) + self.alpha @ self.alpha) - 0.5


def new_state(V, alpha=None, tol=None) -> GaussianState:
    st = GaussianState(alpha, V)
    symplectic_eigenvalue(st.V, tol)
    if st.V[0, 0] < 0 or st.V[1, 1] < 0:
        raise NotAState("covariance matrix has a negative diagonal entry")
    return st


def vacuum() -> GaussianState:
    return GaussianState(None, 0.5 * np.eye(2))


def apply(c: GaussianChannel, st: GaussianState) -> GaussianState:
    return GaussianState(c.X @ st.alpha + c.delta, c.X @ st.V @ c.X.T + c.Y)


def symplectic_eigenvalue(V, tol=None) -> float:
    """``nu = sqrt(det V)``; raises :class:`NotAState` if ``det V < 1/4 - tol``."""
    d = det2(np.asarray(V, dtype=float))
    if d < 0.25 - get_tol(tol):
        raise NotAState(f"det V = {d:.10g} < 1/4")
    return math.sqrt(max(d, 0.25))
