"""Fiducial and canonical decompositions of single-mode Gaussian channels.

Every physical channel factors as ``X = M X_F(tau) Theta`` and
``Y = M Y_F(y, s) M^T`` with ``M`` symplectic, ``Theta`` a rotation,
``X_F = sqrt|tau| diag(1, sgn tau)`` and ``Y_F = y diag(e^{2s}, e^{-2s})``.
Rank-deficient channels are reached as limits of a family with a finite
truncation squeezing ``s_T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    CanonicalClass,
    GaussianChannel,
    check_physical,
    classify,
    fiducial_x,
)
from .errors import DomainError, NotPhysical
from .symplectic2 import (
    matrix_rank2,
    normalize_angle,
    psd_rank2,
    rotation_matrix,
    squeeze_matrix,
    svd2,
    sym_eig2,
    williamson2,
)

EXACT, LIMIT_B1, LIMIT_A2 = "exact", "b1", "a2"
DEFAULT_S_T = 10.0


@dataclass(frozen=True)
class FiducialParams:
    tau: float
    y: float
    s: float

    @property
    def X(self) -> np.ndarray:
        return fiducial_x(self.tau)

    @property
    def Y(self) -> np.ndarray:
        return self.y * np.diag([math.exp(2 * self.s), math.exp(-2 * self.s)])

    def channel(self) -> GaussianChannel:
        return GaussianChannel(self.X, self.Y)


def fiducial_channel(tau: float, y: float, s: float) -> GaussianChannel:
    if y < abs(tau - 1.0) / 2.0:
        raise NotPhysical(f"fiducial parameters tau={tau}, y={y} are not physical")
    return FiducialParams(tau, y, s).channel()


@dataclass(frozen=True, eq=False)
class FiducialDecomposition:
    M: np.ndarray
    theta: float
    fiducial: FiducialParams
    limit: str = EXACT
    s_T: float | None = None

    @property
    def Theta(self) -> np.ndarray:
        return rotation_matrix(self.theta)

    def to_dict(self):
        f = self.fiducial
        return {
            "M": self.M.tolist(),
            "theta": self.theta,
            "tau": f.tau,
            "y": f.y,
            "s": f.s,
            "limit": self.limit,
            "s_T": self.s_T,
        }


@dataclass(frozen=True, eq=False)
class CanonicalDecomposition:
    """``X = M2 X_C M1`` and ``Y = M2 Y_C M2^T``."""

    M1: np.ndarray
    M2: np.ndarray
    canonical: CanonicalClass
    X_C: np.ndarray
    Y_C: np.ndarray

    def apply(self, V):
        W = self.M1 @ V @ self.M1.T
        return self.M2 @ (self.X_C @ W @ self.X_C.T + self.Y_C) @ self.M2.T


def _fiducial_core(theta1, s_x, theta2, tau, theta_y, s_y, y):
    """Assemble ``(M, Theta, s)`` from the SVD data of X and the Williamson data of Y.

    ``Theta_F`` diagonalizes ``S_X^-1 O1^T O_Y S_Y^2 O_Y^T O1 S_X^-1`` (unit
    determinant) with the larger eigenvalue ``e^{2s}`` first.
    """
    d = theta_y - theta1
    c, sn = math.cos(d), math.sin(d)
    ep, em = math.exp(2 * s_y), math.exp(-2 * s_y)
    c11 = c * c * ep + sn * sn * em
    c22 = sn * sn * ep + c * c * em
    c12 = c * sn * 2.0 * math.sinh(2 * s_y)
    a11 = c11 * math.exp(-2 * s_x)
    a22 = c22 * math.exp(2 * s_x)
    cs, ss, l1, _ = sym_eig2(a11, c12, a22, det=1.0)
    s = 0.5 * math.log(l1) if l1 > 1.0 else 0.0
    o_a = np.array([[cs, -ss], [ss, cs]])
    # M = O1 S_X Theta_F^T with Theta_F^T = o_a; scale rows first to keep small entries exact
    sx_oa = np.array([math.exp(s_x) * o_a[0], math.exp(-s_x) * o_a[1]])
    M = rotation_matrix(theta1) @ sx_oa
    theta_a = math.atan2(ss, cs)
    sgn = -1.0 if tau < 0 else 1.0
    theta = normalize_angle(theta2 - sgn * theta_a)
    return M, theta, s


def _x_data(X):
    sv = svd2(X)
    rank = matrix_rank2(X)
    return sv, rank


def decompose_fiducial(c: GaussianChannel, s_T: float = DEFAULT_S_T, tol=None) -> FiducialDecomposition:
    """Factor ``c`` as ``M o Phi_F(tau, y, s) o Theta``.

    Full-rank channels, and the ranks (2, 0) and (0, 2), are decomposed
    exactly. Rank (2, 1) yields the single-quadrature-noise limit (``"b1"``)
    and rank (1, 2) the classical-signal limit (``"a2"``), each built at the
    finite truncation squeezing ``s_T``.

    Raises:
        NotPhysical: if ``c`` is not a quantum channel.
    """
    check_physical(c.X, c.Y, tol)
    sv, rx = _x_data(c.X)
    ry = psd_rank2(c.Y)

    if ry == 0:
        # Y = 0 forces tau = 1; Y_F = 0 for every s, take s = 0 and Theta_F = I
        if rx < 2:
            raise NotPhysical("rank(X) < 2 with Y = 0 is not a channel")
        s_x = 0.5 * math.log(sv.x1 / sv.x2)
        M = rotation_matrix(sv.theta1) @ squeeze_matrix(s_x)
        return FiducialDecomposition(M, sv.theta2, FiducialParams(c.tau, 0.0, 0.0), EXACT)

    if ry == 1:
        if rx < 2:
            raise NotPhysical("rank(X) < 2 with rank(Y) = 1 is not a channel")
        # the vanishing eigenvalue of Y goes first
        cs, sn, y2, _ = sym_eig2(c.Y[0, 0], c.Y[0, 1], c.Y[1, 1])
        theta_y = math.atan2(sn, cs) + 0.5 * math.pi
        # residual ~ e^{-2 s_T}: the small noise eigenvalue is e^{-2 s_T} / (4 y2)
        s_y = -0.5 * math.log(2.0 * y2) - 0.5 * s_T
        y = 0.5 * math.exp(-s_T)
        s_x = 0.5 * math.log(sv.x1 / sv.x2)
        M, theta, s = _fiducial_core(sv.theta1, s_x, sv.theta2, 1.0, theta_y, s_y, y)
        return FiducialDecomposition(M, theta, FiducialParams(1.0, y, s), LIMIT_B1, s_T)

    theta_y, s_y, y = williamson2(c.Y)
    if rx == 2:
        tau = c.tau
        s_x = 0.5 * math.log(sv.x1 / sv.x2)
        M, theta, s = _fiducial_core(sv.theta1, s_x, sv.theta2, tau, theta_y, s_y, y)
        return FiducialDecomposition(M, theta, FiducialParams(tau, y, s), EXACT)
    if rx == 0:
        M, theta, s = _fiducial_core(0.0, 0.0, 0.0, 0.0, theta_y, s_y, y)
        return FiducialDecomposition(M, theta, FiducialParams(0.0, y, s), EXACT)
    # rank(X) = 1: X = O1 diag(x1, 0) O2 reached as e^{-s_T} O1 S(ln x1 + s_T) O2
    s_x = math.log(sv.x1) + s_T
    tau = math.exp(-2.0 * s_T)
    M, theta, s = _fiducial_core(sv.theta1, s_x, sv.theta2, tau, theta_y, s_y, y)
    return FiducialDecomposition(M, theta, FiducialParams(tau, y, s), LIMIT_A2, s_T)


def reconstruct(d: FiducialDecomposition) -> GaussianChannel:
    """Rebuild ``(X, Y)`` from ``(M, Theta, fiducial)``; limit cases use their stored ``s_T``."""
    f = d.fiducial
    X = d.M @ f.X @ d.Theta
    Y = d.M @ f.Y @ d.M.T
    return GaussianChannel(X, Y)


def reconstruction_residual(c: GaussianChannel, d: FiducialDecomposition) -> float:
    """Max-abs entry of the reconstruction error over both X and Y."""
    r = reconstruct(d)
    return float(max(np.abs(r.X - c.X).max(), np.abs(r.Y - c.Y).max()))


def fiducial_squeezing_closed_form(s_x: float, s_y: float, dtheta: float):
    """Closed-form squeezing ``s`` and angle ``theta_F`` of the fiducial noise.

    Given the SVD squeezing ``s_x`` of X, the Williamson squeezing ``s_y`` of Y
    and ``dtheta = theta_Y - theta1_X``, returns ``(s, theta_F)`` such that
    ``O(theta_F) S_X^-1 O(dtheta) S_Y^2 O(dtheta)^T S_X^-1 O(theta_F)^T =
    diag(e^{2s}, e^{-2s})``. This root selection gives ``s <= 0``; the
    decomposition itself uses the opposite gauge (``s >= 0``).

    ``xi - sqrt(xi^2 - 16 e^{4(s_x+s_y)})`` is evaluated as
    ``16 e^{4(s_x+s_y)} / (xi + sqrt(...))`` to avoid cancellation.

    Raises:
        DomainError: when ``sin(2 dtheta) == 0`` or ``s_y == 0`` (angle undefined).
    """
    a, b = math.exp(4 * s_x), math.exp(4 * s_y)
    cos2 = math.cos(2 * dtheta)
    xi = (1 + b) * (1 + a) - (b - 1) * (a - 1) * cos2
    rad = math.sqrt(max(xi * xi - 16.0 * a * b, 0.0))
    small_root = 16.0 * a * b / (xi + rad)
    s = 0.5 * math.log(0.25 * math.exp(-2 * (s_x + s_y)) * small_root)
    sin2 = math.sin(2 * dtheta)
    if sin2 == 0.0 or s_y == 0.0:
        raise DomainError("theta_F is undefined when sin(2 dtheta) = 0 or s_y = 0")
    xit = (1 + b) * (a - 1) - (b - 1) * (1 + a) * cos2
    lam = -math.exp(-2 * s_x) * (xit + rad) / (2 * sin2 * (b - 1))
    theta_f = -math.asin(math.copysign(1.0, lam) / math.sqrt(1 + lam * lam))
    return s, theta_f


def decompose_canonical(c: GaussianChannel, tol=None) -> CanonicalDecomposition:
    """Canonical decomposition ``U2 o Phi_C o U1`` with symplectic ``M1``, ``M2``."""
    check_physical(c.X, c.Y, tol)
    cls = classify(c, tol)
    sv, rx = _x_data(c.X)
    ry = psd_rank2(c.Y)

    if ry == 2 and rx == 1:
        theta_y, s_y, y = williamson2(c.Y)
        v = squeeze_matrix(-s_y) @ rotation_matrix(-theta_y) @ rotation_matrix(sv.theta1) @ np.array([sv.x1, 0.0])
        nv = math.hypot(v[0], v[1])
        M1 = squeeze_matrix(math.log(nv)) @ rotation_matrix(sv.theta2)
        M2 = rotation_matrix(theta_y) @ squeeze_matrix(s_y) @ rotation_matrix(math.atan2(v[1], v[0]))
        return CanonicalDecomposition(M1, M2, cls, np.diag([1.0, 0.0]), y * np.eye(2))

    if ry == 1:
        cs, sn, y2, _ = sym_eig2(c.Y[0, 0], c.Y[0, 1], c.Y[1, 1])
        theta_y = math.atan2(sn, cs) + 0.5 * math.pi
        s_y = -0.5 * math.log(2.0 * y2)
        s_x = 0.5 * math.log(sv.x1 / sv.x2)
        M1 = (
            squeeze_matrix(-s_y)
            @ rotation_matrix(-theta_y)
            @ rotation_matrix(sv.theta1)
            @ squeeze_matrix(s_x)
            @ rotation_matrix(sv.theta2)
        )
        M2 = rotation_matrix(theta_y) @ squeeze_matrix(s_y)
        return CanonicalDecomposition(M1, M2, cls, np.eye(2), np.diag([0.0, 0.5]))

    if ry == 0:
        s_x = 0.5 * math.log(sv.x1 / sv.x2)
        M1 = rotation_matrix(sv.theta1) @ squeeze_matrix(s_x) @ rotation_matrix(sv.theta2)
        return CanonicalDecomposition(M1, np.eye(2), cls, fiducial_x(c.tau), np.zeros((2, 2)))

    # thermal classes: full rank Y with rank(X) in {0, 2}
    theta_y, s_y, y = williamson2(c.Y)
    if rx == 2:
        tau = c.tau
        theta1, s_x, theta2 = sv.theta1, 0.5 * math.log(sv.x1 / sv.x2), sv.theta2
    else:
        tau, theta1, s_x, theta2 = 0.0, 0.0, 0.0, 0.0
    sgn = -1.0 if tau < 0 else 1.0
    M1 = (
        squeeze_matrix(-s_y)
        @ rotation_matrix(-sgn * theta_y)
        @ rotation_matrix(sgn * theta1)
        @ squeeze_matrix(s_x)
        @ rotation_matrix(theta2)
    )
    M2 = rotation_matrix(theta_y) @ squeeze_matrix(s_y)
    return CanonicalDecomposition(M1, M2, cls, fiducial_x(tau), y * np.eye(2))
