"""Closed-form 2x2 real linear algebra for single-mode phase space.

Matrices are plain ``numpy`` arrays of shape ``(2, 2)``. Every routine here
works in closed form (no iterative LAPACK calls) so that angles and ordering
conventions are deterministic:

* singular values and symplectic eigenvalue orderings put the larger value first,
* angles are normalized to ``(-pi, pi]``,
* a degenerate SVD (``x1 == x2``) puts all of the rotation into ``theta1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
IDENTITY = np.eye(2)

# relative rank threshold for singular values / eigenvalues
RANK_RTOL = 1e-12

_EPS = np.finfo(float).eps


def normalize_angle(theta: float) -> float:
    """Map an angle onto ``(-pi, pi]``."""
    t = math.remainder(float(theta), 2.0 * math.pi)
    if t <= -math.pi:
        t += 2.0 * math.pi
    return t


def rotation_matrix(theta: float) -> np.ndarray:
    """Phase-space rotation ``O(theta) = [[cos, -sin], [sin, cos]]``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeeze_matrix(s: float) -> np.ndarray:
    """Single-mode squeezer ``S(s) = diag(e^s, e^-s)``."""
    return np.array([[math.exp(s), 0.0], [0.0, math.exp(-s)]])


@dataclass(frozen=True)
class Rotation:
    theta: float

    @property
    def matrix(self) -> np.ndarray:
        return rotation_matrix(self.theta)


@dataclass(frozen=True)
class Squeezer:
    s: float

    @property
    def matrix(self) -> np.ndarray:
        return squeeze_matrix(self.s)


@dataclass(frozen=True)
class Svd2:
    """``m = O(theta1) @ diag(x1, x2) @ J @ O(theta2)`` with ``J = sigma_z`` if conjugating."""

    theta1: float
    theta2: float
    x1: float
    x2: float
    conjugating: bool

    def matrix(self) -> np.ndarray:
        j = SIGMA_Z if self.conjugating else IDENTITY
        return (
            rotation_matrix(self.theta1)
            @ np.diag([self.x1, self.x2])
            @ j
            @ rotation_matrix(self.theta2)
        )


def det2(m) -> float:
    return float(m[0][0] * m[1][1] - m[0][1] * m[1][0])


def svd2(m) -> Svd2:
    """Singular value decomposition of a real 2x2 matrix.

    Writes ``m = Q*O(phi) + R*O(psi)@sigma_z`` with ``Q, R >= 0``; then
    ``theta1 = (phi + psi)/2``, ``theta2 = (phi - psi)/2`` and the singular
    values are ``Q + R`` and ``|Q - R|``.

    Args:
        m: array-like of shape (2, 2).

    Returns:
        Svd2 with ``x1 >= x2 >= 0`` and ``conjugating == (det m < 0)``.
    """
    m = np.asarray(m, dtype=float)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    e, f = 0.5 * (a + d), 0.5 * (a - d)
    g, h = 0.5 * (c + b), 0.5 * (c - b)
    q = math.hypot(e, h)
    r = math.hypot(f, g)
    phi = math.atan2(h, e)
    psi = math.atan2(g, f)
    x1 = q + r
    x2 = abs(q - r)
    conjugating = det2(m) < 0.0
    if x1 - x2 <= 4.0 * _EPS * x1:
        # degenerate: m is a scaled rotation (or reflection); fix theta2 = 0
        theta1 = psi if conjugating else phi
        theta2 = 0.0
        if x1 == 0.0:
            theta1 = 0.0
    else:
        theta1 = 0.5 * (phi + psi)
        theta2 = 0.5 * (phi - psi)
    return Svd2(normalize_angle(theta1), normalize_angle(theta2), x1, x2, conjugating)


def sym_eig2(a11: float, a12: float, a22: float, det: float | None = None):
    """Eigen-decomposition of a symmetric 2x2 matrix, larger eigenvalue first.

    The leading eigenvector is formed without cancellation, so its small
    component keeps full relative precision even for eigenvalue ratios near
    ``1e30``. Passing ``det`` (when it is known exactly, e.g. 1 for a product
    of symplectic factors) avoids the cancelling ``a11*a22 - a12**2``.

    Returns:
        ``(cos, sin, l1, l2)`` with ``A = O @ diag(l1, l2) @ O.T`` where ``O``
        is the rotation with the returned cosine/sine, ``cos > 0`` or
        ``cos == 0 < sin``.
    """
    h = 0.5 * (a11 - a22)
    rad = math.hypot(h, a12)
    mean = 0.5 * (a11 + a22)
    if det is None:
        det = a11 * a22 - a12 * a12
    # the root of larger magnitude is cancellation-free; the other follows from det
    if mean >= 0.0:
        l1 = mean + rad
        l2 = det / l1 if l1 != 0.0 else 0.0
    else:
        l2 = mean - rad
        l1 = det / l2
    if h >= 0.0:
        v0, v1 = h + rad, a12
    else:
        v0, v1 = a12, rad - h
    big = max(abs(v0), abs(v1))
    if big == 0.0:
        return 1.0, 0.0, l1, l2
    v0, v1 = v0 / big, v1 / big
    n = math.hypot(v0, v1)
    cs, sn = v0 / n, v1 / n
    if cs < 0.0 or (cs == 0.0 and sn < 0.0):
        cs, sn = -cs, -sn
    return cs, sn, l1, l2


def psd_rank2(y, rtol: float = RANK_RTOL) -> int:
    """Numerical rank of a symmetric non-negative 2x2 matrix."""
    y = np.asarray(y, dtype=float)
    _, _, l1, l2 = sym_eig2(y[0, 0], 0.5 * (y[0, 1] + y[1, 0]), y[1, 1])
    thr = rtol * max(1.0, abs(l1))
    return int(l1 > thr) + int(l2 > thr)


def matrix_rank2(m, rtol: float = RANK_RTOL) -> int:
    """Numerical rank of a 2x2 matrix from its singular values."""
    sv = svd2(m)
    thr = rtol * max(1.0, sv.x1)
    return int(sv.x1 > thr) + int(sv.x2 > thr)


def williamson2(y):
    """Symplectic diagonalization of a positive-definite 2x2 matrix.

    Finds ``theta_Y``, ``s_Y`` and ``y_sym`` such that
    ``O(theta_Y) S(s_Y) diag(y_sym, y_sym) S(s_Y) O(theta_Y).T == y`` with
    ``y_sym = sqrt(det y)`` and ``s_Y = ln(y1/y2)/4 >= 0``.

    Raises:
        RankDeficient: if ``y`` is singular (rank < 2).
    """
    y = np.asarray(y, dtype=float)
    if psd_rank2(y) < 2:
        raise RankDeficient("williamson2 needs a full-rank matrix; det(y) = %r" % det2(y))
    cs, sn, y1, y2 = sym_eig2(y[0, 0], 0.5 * (y[0, 1] + y[1, 0]), y[1, 1])
    y_sym = math.sqrt(y1 * y2)
    s_y = max(0.25 * math.log(y1 / y2), 0.0)
    return math.atan2(sn, cs), s_y, y_sym


def is_symplectic(m, tol: float = 1e-9) -> bool:
    """For 2x2 matrices ``m @ Omega @ m.T == Omega`` iff ``det m == 1``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return abs(det2(m) - 1.0) <= tol
