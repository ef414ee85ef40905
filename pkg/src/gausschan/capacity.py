"""Energy-constrained Gaussian classical capacity of single-mode channels.

Above the additivity threshold the capacity has a closed form in the
fiducial parameters ``(tau, y, s)``. Below it, :func:`numerical_one_shot`
maximizes the one-shot Gaussian Holevo quantity directly over pure input
states and Gaussian modulations. The optimizer never uses the closed form,
so the two routes check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .channel import GaussianChannel
from .decompose import DEFAULT_S_T, EXACT, FiducialParams, decompose_fiducial
from .errors import BelowThreshold, DomainError, get_tol
from .symplectic2 import matrix_rank2

INV_LN2 = 1.0 / math.log(2.0)
CLOSED_FORM, NUMERICAL = "closed_form", "numerical"
DEFAULT_STARTS = 32

_SMALL_X = 1e-8
_COARSE = {"xtol": 1e-3, "ftol": 1e-5}
_POLISH = {"xtol": 1e-12, "ftol": 1e-15, "maxfev": 20000}


def _g_scalar(x: float) -> float:
    if x == 0.0:
        return 0.0
    if x < _SMALL_X:
        # (x+1)ln(x+1) = x + O(x^2)
        return (x - x * math.log(x)) * INV_LN2
    return (math.log1p(x) + x * math.log1p(1.0 / x)) * INV_LN2


def g(x):
    """Entropy in bits of a thermal state with mean photon number ``x``.

    ``g(x) = (x+1) log2(x+1) - x log2(x)`` with ``g(0) = 0``. Accepts scalars
    or arrays.

    Raises:
        DomainError: if any ``x < 0``.
    """
    if np.ndim(x) == 0:
        x = float(x)
        if x < 0 or math.isnan(x):
            raise DomainError(f"g(x) needs x >= 0, got {x}")
        return _g_scalar(x)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("g(x) needs x >= 0")
    return np.vectorize(_g_scalar, otypes=[float])(arr)


def holevo_chi_g(nu_bar: float, nu: float, tol=None) -> float:
    """``g(nu_bar - 1/2) - g(nu - 1/2)`` for symplectic eigenvalues ``nu_bar >= nu >= 1/2``."""
    tol = get_tol(tol)
    if nu < 0.5 - tol or nu_bar < 0.5 - tol:
        raise DomainError(f"symplectic eigenvalues must be >= 1/2, got nu={nu}, nu_bar={nu_bar}")
    return g(max(nu_bar - 0.5, 0.0)) - g(max(nu - 0.5, 0.0))


def n_threshold(f: FiducialParams) -> float:
    """Input energy above which the one-shot Gaussian capacity is additive."""
    if f.tau == 0:
        raise DomainError("the energy threshold needs tau != 0")
    a = 2.0 * abs(f.s)
    return 0.5 * (math.exp(a) + 2.0 * f.y / abs(f.tau) * math.sinh(a) - 1.0)


def y_threshold_curve(tau: float, n_bar: float, s: float) -> float:
    """Largest noise ``y`` for which ``n_bar`` is at or above the threshold."""
    if s == 0:
        raise DomainError("y_thr is undefined for s = 0 (additive everywhere)")
    if tau == 0:
        raise DomainError("y_thr needs tau != 0")
    a = abs(s)
    return abs(tau) * (math.exp(-2 * a) * (1 + 2 * n_bar) - 1) / (-math.expm1(-4 * a))


@dataclass
class CapacityReport:
    c_gauss: float
    regime: str
    n_bar: float
    n_thr: float
    c_bar: float | None
    gap_bound: float | None
    V_in: np.ndarray
    V_mod: np.ndarray
    optimizer: dict | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "c_gauss": self.c_gauss,
            "regime": self.regime,
            "n_bar": self.n_bar,
            "n_thr": self.n_thr,
            "c_bar": self.c_bar,
            "gap_bound": self.gap_bound,
            "encoding": {"V_in": self.V_in.tolist(), "V_mod": self.V_mod.tolist()},
            "optimizer": self.optimizer,
            **self.params,
        }


def _check_energy(n_bar):
    if not n_bar >= 0:
        raise DomainError(f"mean photon number must be >= 0, got {n_bar}")


def _cbar(tau, y, s, n_bar):
    if tau == 0:
        raise DomainError("C-bar needs tau != 0")
    if tau < 0:
        y = -y
    sh2 = math.sinh(s) ** 2
    return g((2 * tau * n_bar + (2 * y + 1 - tau) * sh2) / (2 * y + 1 + tau))


def _fiducial_of(c):
    if isinstance(c, FiducialParams):
        return c
    return decompose_fiducial(c).fiducial


def gaussian_capacity_closed_form(f: FiducialParams, n_bar: float, tol=None) -> CapacityReport:
    """Closed-form Gaussian capacity of ``Phi_F(tau, y, s)`` for ``n_bar >= n_thr``.

    The optimal encoding is a squeezed vacuum ``V_in = S(s)^2 / 2`` modulated
    up to the mean-energy budget so that the modulated output is thermal.

    Raises:
        BelowThreshold: if ``n_bar < n_thr - tol``.
        DomainError: if ``tau == 0`` or ``n_bar < 0``.
    """
    _check_energy(n_bar)
    n_thr = n_threshold(f)
    if n_bar < n_thr - get_tol(tol):
        raise BelowThreshold(f"n_bar = {n_bar:.10g} is below the threshold {n_thr:.10g}")
    at = abs(f.tau)
    c = g(at * n_bar + f.y * math.cosh(2 * f.s) + (at - 1) / 2) - g(f.y + (at - 1) / 2)
    V_in = 0.5 * np.diag([math.exp(2 * f.s), math.exp(-2 * f.s)])
    shift = f.y / at * math.sinh(2 * f.s)
    V_bar = np.diag([n_bar + 0.5 - shift, n_bar + 0.5 + shift])
    c_bar = _cbar(f.tau, f.y, f.s, n_bar) if f.tau > 0 else None
    return CapacityReport(
        c_gauss=c,
        regime=CLOSED_FORM,
        n_bar=n_bar,
        n_thr=n_thr,
        c_bar=c_bar,
        gap_bound=INV_LN2 if f.tau > 0 else None,
        V_in=V_in,
        V_mod=V_bar - V_in,
        params={"tau": f.tau, "y": f.y, "s": f.s},
    )


def _zero_report(n_bar, params):
    return CapacityReport(
        c_gauss=0.0,
        regime=CLOSED_FORM,
        n_bar=n_bar,
        n_thr=0.0,
        c_bar=None,
        gap_bound=None,
        V_in=0.5 * np.eye(2),
        V_mod=n_bar * np.eye(2),
        params=params,
    )


def capacity_of_channel(
    c: GaussianChannel,
    n_bar: float,
    s_T: float = DEFAULT_S_T,
    seed: int = 0,
    starts: int = DEFAULT_STARTS,
    tol=None,
) -> CapacityReport:
    """Gaussian capacity of an arbitrary channel through its fiducial channel.

    A channel with ``X = 0`` carries no information. Otherwise the closed form
    is used at or above the threshold and the numerical one-shot optimum below
    it. Rank-deficient channels, whose fiducial form is only a limit, always
    use the numerical route. Encodings are expressed in the input frame of
    ``c``.
    """
    _check_energy(n_bar)
    d = decompose_fiducial(c, s_T=s_T, tol=tol)
    f = d.fiducial
    params = {"tau": f.tau, "y": f.y, "s": f.s, "limit": d.limit}
    if matrix_rank2(c.X) == 0:
        return _zero_report(n_bar, params)
    n_thr = n_threshold(f)
    if d.limit == EXACT and n_bar >= n_thr - get_tol(tol):
        rep = gaussian_capacity_closed_form(f, n_bar, tol)
        R = d.Theta
        rep.V_in = R.T @ rep.V_in @ R
        rep.V_mod = R.T @ rep.V_mod @ R
        rep.params = params
        return rep
    rep = numerical_one_shot(c, n_bar, seed=seed, starts=starts, tol=tol, _fiducial=f)
    if d.limit != EXACT:
        # limit decompositions only approximate c at finite s_T
        rep.c_bar = None
    rep.params = params
    return rep


def _one_shot_objective(X, Y, n_bar):
    x11, x12, x21, x22 = X[0, 0], X[0, 1], X[1, 0], X[1, 1]
    y11, y12, y22 = Y[0, 0], Y[0, 1], Y[1, 1]
    total = 2.0 * n_bar + 1.0

    def out_det(v11, v12, v22):
        # X V X^T + Y
        a = x11 * v11 + x12 * v12
        b = x11 * v12 + x12 * v22
        c = x21 * v11 + x22 * v12
        d = x21 * v12 + x22 * v22
        o11 = a * x11 + b * x12 + y11
        o12 = a * x21 + b * x22 + y12
        o22 = c * x21 + d * x22 + y22
        return o11 * o22 - o12 * o12

    def encoding(p):
        r, phi, a, b = p
        n = math.hypot(a, b)
        if n > 1.0:
            a, b = a / n, b / n
        ch, sh = math.cosh(2 * r), math.sinh(2 * r)
        c2, s2 = math.cos(2 * phi), math.sin(2 * phi)
        v11, v12, v22 = 0.5 * (ch + sh * c2), 0.5 * sh * s2, 0.5 * (ch - sh * c2)
        budget = max(total - ch, 0.0)
        m11, m12, m22 = 0.5 * budget * (1 + a), 0.5 * budget * b, 0.5 * budget * (1 - a)
        return (v11, v12, v22), (m11, m12, m22)

    def chi(p):
        (v11, v12, v22), (m11, m12, m22) = encoding(p)
        nu = math.sqrt(max(out_det(v11, v12, v22), 0.25))
        nu_bar = math.sqrt(max(out_det(v11 + m11, v12 + m12, v22 + m22), 0.25))
        return _g_scalar(nu_bar - 0.5) - _g_scalar(nu - 0.5)

    return chi, encoding


def numerical_one_shot(
    c: GaussianChannel,
    n_bar: float,
    seed: int = 0,
    starts: int = DEFAULT_STARTS,
    tol=None,
    _fiducial: FiducialParams | None = None,
) -> CapacityReport:
    """Maximize the one-shot Gaussian Holevo quantity of ``c`` numerically.

    The input is a pure state ``V_in = O(phi) S(r)^2 O(phi)^T / 2`` and the
    modulation ``V_mod`` is PSD with trace equal to the remaining energy
    budget ``2 n_bar + 1 - tr V_in`` (extra modulation never lowers the output
    entropy, so the budget is saturated). ``V_mod`` is parametrized as
    ``budget * (I + a sigma_z + b sigma_x) / 2`` with ``(a, b)`` projected
    radially onto the unit disk. Each of ``starts`` seeded random points is
    refined with a coarse bounded Powell search, then the best one is
    polished with tight tolerances. The distinct coarse local optima are
    reported as well. Below the threshold the result is the one-shot value
    only.
    """
    _check_energy(n_bar)
    f = _fiducial
    if f is None and matrix_rank2(c.X) == 2:
        f = decompose_fiducial(c, tol=tol).fiducial
    if f is not None and f.tau != 0:
        n_thr = n_threshold(f)
        c_bar = _cbar(f.tau, f.y, f.s, n_bar) if f.tau > 0 else None
        params = {"tau": f.tau, "y": f.y, "s": f.s}
    else:
        n_thr, c_bar, params = 0.0, None, {"tau": 0.0}

    if n_bar == 0.0:
        return CapacityReport(0.0, NUMERICAL, n_bar, n_thr, c_bar, None, 0.5 * np.eye(2), np.zeros((2, 2)),
                              {"starts": 0, "best_iter": None, "local_optima": [0.0]}, params)

    chi, encoding = _one_shot_objective(c.X, c.Y, n_bar)
    r_max = 0.5 * math.acosh(2.0 * n_bar + 1.0)
    bounds = [(-r_max, r_max), (-0.5 * math.pi, 0.5 * math.pi), (-1.0, 1.0), (-1.0, 1.0)]
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    rng = np.random.default_rng(seed)

    def neg(p):
        return -chi(p)

    best, best_k, found = None, None, []
    for k in range(starts):
        x0 = lo + (hi - lo) * rng.random(4)
        res = minimize(neg, x0, method="Powell", bounds=bounds, options=_COARSE)
        found.append(-float(res.fun))
        if best is None or res.fun < best.fun:
            best, best_k = res, k
    res = minimize(neg, best.x, method="Powell", bounds=bounds, options=_POLISH)
    if res.fun > best.fun:
        res = best
    best_val, best_x = -float(res.fun), res.x

    (v11, v12, v22), (m11, m12, m22) = encoding(best_x)
    optima = sorted({round(v, 5) for v in found}, reverse=True)
    return CapacityReport(
        c_gauss=best_val,
        regime=NUMERICAL,
        n_bar=n_bar,
        n_thr=n_thr,
        c_bar=c_bar,
        gap_bound=None,
        V_in=np.array([[v11, v12], [v12, v22]]),
        V_mod=np.array([[m11, m12], [m12, m22]]),
        optimizer={"starts": starts, "best_iter": best_k, "local_optima": optima},
        params=params,
    )


def upper_bound_cbar(c, n_bar: float) -> float:
    """Closed-form upper bound on the classical capacity.

    For ``tau > 0`` it lies within ``1/ln 2`` bits of the Gaussian capacity at
    and above the threshold. For ``tau < 0`` the bound uses ``y -> -y`` and
    carries no gap guarantee. ``c`` may be a channel or :class:`FiducialParams`.

    Raises:
        DomainError: for ``tau == 0``.
    """
    _check_energy(n_bar)
    f = _fiducial_of(c)
    return _cbar(f.tau, f.y, f.s, n_bar)


def supplementary_bound(c, n_bar: float, b: float) -> float:
    """``g(|tau| n_bar + y cosh 2s + (|tau|-1)/2) - b`` for an externally supplied entropy bound ``b``."""
    _check_energy(n_bar)
    if b < 0:
        raise DomainError(f"b must be >= 0, got {b}")
    f = _fiducial_of(c)
    if f.tau <= 0:
        raise DomainError("the supplementary bound needs tau > 0")
    at = abs(f.tau)
    return g(at * n_bar + f.y * math.cosh(2 * f.s) + (at - 1) / 2) - b


def region_rows(tau_min: float, tau_max: float, grid: int, n_bar: float, s: float):
    """Boundary curves of the ``(tau, y)`` plane sampled on ``grid`` points.

    Returns:
        list of ``(tau, y_min, y_eb, y_thr)`` where ``y_min = |tau-1|/2`` is the
        physicality bound, ``y_eb = (|tau|+1)/2`` the entanglement-breaking
        bound and ``y_thr`` the threshold curve (``None`` for ``s = 0`` or
        ``tau = 0``).
    """
    if grid < 2:
        raise DomainError(f"grid needs at least 2 points, got {grid}")
    _check_energy(n_bar)
    rows = []
    for tau in np.linspace(tau_min, tau_max, grid):
        tau = float(tau)
        y_thr = None if (s == 0 or tau == 0) else y_threshold_curve(tau, n_bar, s)
        rows.append((tau, abs(tau - 1) / 2, (abs(tau) + 1) / 2, y_thr))
    return rows
