"""Multimode Gaussian circuit simulator and physical channel realizations.

Modes are ordered ``(q_0, p_0, q_1, p_1, ...)``. An :class:`OpticalNetwork`
prepares ancillas, applies symplectic gates to the joint covariance matrix and
keeps one mode. :func:`extract_channel` recovers the single-mode ``(X, Y)`` map
that a network implements, so circuit builders can be checked against the
abstract channel they are supposed to realize.
"""

from __future__ import annotations

import json
import json.scanner
import math
from dataclasses import dataclass

import numpy as np

from .channel import GaussianChannel, GaussianState, new_channel, thermal_TG
from .decompose import FiducialParams
from .errors import DomainError, ModeIndexOutOfRange, NotAffine, ParseError, get_tol
from .symplectic2 import OMEGA, SIGMA_Z, rotation_matrix, squeeze_matrix

AFFINE_TOL = 1e-10
GATE_KINDS = ("phase", "squeeze", "bs", "tms", "cnot")
ANCILLA_KINDS = ("vacuum", "thermal", "tms")

# (q_c, p_c, q_t, p_t): q_t += q_c, p_c -= p_t
CNOT_MATRIX = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, -1.0],
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)


def omega_n(n: int) -> np.ndarray:
    """Block-diagonal symplectic form on ``n`` modes."""
    return np.kron(np.eye(n), OMEGA)


def beam_splitter_matrix(T: float) -> np.ndarray:
    if not 0.0 <= T <= 1.0:
        raise DomainError(f"beam splitter transmissivity must lie in [0, 1], got {T}")
    t, r = math.sqrt(T), math.sqrt(1.0 - T)
    eye = np.eye(2)
    return np.block([[t * eye, r * eye], [-r * eye, t * eye]])


def two_mode_squeezer_matrix(G: float) -> np.ndarray:
    if G < 1.0:
        raise DomainError(f"two-mode squeezer gain must be >= 1, got {G}")
    a, b = math.sqrt(G), math.sqrt(G - 1.0)
    eye = np.eye(2)
    return np.block([[a * eye, b * SIGMA_Z], [b * SIGMA_Z, a * eye]])


@dataclass(frozen=True)
class Gate:
    """One symplectic gate.

    ``kind`` is one of ``phase`` (``theta``), ``squeeze`` (``s``), ``bs``
    (``T``), ``tms`` (``G``) or ``cnot``. ``modes`` holds one index for
    single-mode gates and ``(i, j)`` for two-mode gates; for ``cnot`` it is
    ``(control, target)``.
    """

    kind: str
    modes: tuple
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        want = 1 if self.kind in ("phase", "squeeze") else 2
        if len(self.modes) != want:
            raise ValueError(f"gate {self.kind!r} acts on {want} mode(s), got {self.modes}")
        if want == 2 and self.modes[0] == self.modes[1]:
            raise ValueError(f"gate {self.kind!r} needs two distinct modes")

    def local_matrix(self) -> np.ndarray:
        if self.kind == "phase":
            return rotation_matrix(self.value)
        if self.kind == "squeeze":
            return squeeze_matrix(self.value)
        if self.kind == "bs":
            return beam_splitter_matrix(self.value)
        if self.kind == "tms":
            return two_mode_squeezer_matrix(self.value)
        return CNOT_MATRIX

    def matrix(self, n: int) -> np.ndarray:
        """Embed the gate into the ``2n x 2n`` phase space."""
        for m in self.modes:
            if not 0 <= m < n:
                raise ModeIndexOutOfRange(f"gate {self.kind!r} uses mode {m} of a {n}-mode network")
        S = np.eye(2 * n)
        idx = [k for m in self.modes for k in (2 * m, 2 * m + 1)]
        S[np.ix_(idx, idx)] = self.local_matrix()
        return S

    def to_dict(self):
        if self.kind == "cnot":
            return {"kind": "cnot", "control": self.modes[0], "target": self.modes[1]}
        key = {"phase": "theta", "squeeze": "s", "bs": "T", "tms": "G"}[self.kind]
        where = {"mode": self.modes[0]} if len(self.modes) == 1 else {"modes": list(self.modes)}
        return {"kind": self.kind, key: self.value, **where}


def phase(theta, mode):
    return Gate("phase", (mode,), theta)


def squeeze(s, mode):
    return Gate("squeeze", (mode,), s)


def bs(T, i, j):
    return Gate("bs", (i, j), T)


def tms(G, i, j):
    return Gate("tms", (i, j), G)


def cnot(control, target):
    return Gate("cnot", (control, target))


@dataclass(frozen=True)
class Ancilla:
    """Initial state of ancilla mode(s): vacuum, thermal with ``y``, or a TMS vacuum pair with gain ``G``."""

    kind: str
    modes: tuple
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ANCILLA_KINDS:
            raise ValueError(f"unknown ancilla kind {self.kind!r}")
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        want = 2 if self.kind == "tms" else 1
        if len(self.modes) != want:
            raise ValueError(f"ancilla {self.kind!r} initializes {want} mode(s), got {self.modes}")
        if self.kind == "thermal" and self.value < 0.5:
            raise DomainError(f"thermal ancilla needs y >= 1/2, got {self.value}")

    def covariance(self) -> np.ndarray:
        if self.kind == "vacuum":
            return 0.5 * np.eye(2)
        if self.kind == "thermal":
            return self.value * np.eye(2)
        S = two_mode_squeezer_matrix(self.value)
        return 0.5 * S @ S.T

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "tms":
            d["modes"], d["G"] = list(self.modes), self.value
        else:
            d["mode"] = self.modes[0]
            if self.kind == "thermal":
                d["y"] = self.value
        return d


def vacuum_ancilla(mode):
    return Ancilla("vacuum", (mode,))


def thermal_ancilla(y, mode):
    return Ancilla("thermal", (mode,), y)


def tms_ancilla(G, i, j):
    return Ancilla("tms", (i, j), G)


@dataclass(frozen=True)
class MultiModeState:
    """Joint Gaussian state on ``n`` modes."""

    alpha: np.ndarray
    V: np.ndarray

    @property
    def n(self) -> int:
        return self.V.shape[0] // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        ev = np.linalg.eigvals(1j * omega_n(self.n) @ self.V)
        return np.sort(np.abs(ev))[::2]

    def is_valid(self, tol=AFFINE_TOL) -> bool:
        return bool(np.all(self.symplectic_eigenvalues() >= 0.5 - tol))

    def mode(self, k: int) -> GaussianState:
        """Reduced state of mode ``k`` (partial trace by row/column deletion)."""
        if not 0 <= k < self.n:
            raise ModeIndexOutOfRange(f"mode {k} of a {self.n}-mode state")
        sl = slice(2 * k, 2 * k + 2)
        return GaussianState(self.alpha[sl], self.V[sl, sl])


@dataclass(frozen=True)
class OpticalNetwork:
    """Ancilla preparation, a gate sequence and the mode that is kept.

    The input state enters on ``input_mode``; every other mode must be
    initialized by exactly one ancilla.
    """

    n_modes: int
    ancillas: tuple = ()
    gates: tuple = ()
    keep: int = 0
    input_mode: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ancillas", tuple(self.ancillas))
        object.__setattr__(self, "gates", tuple(self.gates))
        n = self.n_modes
        if n < 1:
            raise ValueError("a network needs at least one mode")
        for label, m in (("keep", self.keep), ("input", self.input_mode)):
            if not 0 <= m < n:
                raise ModeIndexOutOfRange(f"{label} mode {m} of a {n}-mode network")
        seen = {self.input_mode}
        for a in self.ancillas:
            for m in a.modes:
                if not 0 <= m < n:
                    raise ModeIndexOutOfRange(f"ancilla mode {m} of a {n}-mode network")
                if m in seen:
                    raise ValueError(f"mode {m} is initialized more than once")
                seen.add(m)
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            raise ValueError(f"modes {missing} are never initialized")
        for g in self.gates:
            g.matrix(n)

    def symplectic(self) -> np.ndarray:
        S = np.eye(2 * self.n_modes)
        for g in self.gates:
            S = g.matrix(self.n_modes) @ S
        return S

    def to_dict(self):
        return {
            "modes": self.n_modes,
            "input": self.input_mode,
            "ancillas": [a.to_dict() for a in self.ancillas],
            "gates": [g.to_dict() for g in self.gates],
            "keep": self.keep,
        }


def prepare(net: OpticalNetwork, state: GaussianState) -> MultiModeState:
    n = net.n_modes
    alpha = np.zeros(2 * n)
    V = np.zeros((2 * n, 2 * n))
    i = net.input_mode
    alpha[2 * i:2 * i + 2] = state.alpha
    V[2 * i:2 * i + 2, 2 * i:2 * i + 2] = state.V
    for a in net.ancillas:
        idx = [k for m in a.modes for k in (2 * m, 2 * m + 1)]
        V[np.ix_(idx, idx)] = a.covariance()
    return MultiModeState(alpha, V)


def run_joint(net: OpticalNetwork, state: GaussianState) -> MultiModeState:
    """Propagate ``state`` and the ancillas through every gate; no trace."""
    joint = prepare(net, state)
    S = net.symplectic()
    return MultiModeState(S @ joint.alpha, S @ joint.V @ S.T)


def run(net: OpticalNetwork, state: GaussianState) -> GaussianState:
    """Output state on ``net.keep`` after all other modes are traced out."""
    return run_joint(net, state).mode(net.keep)


def _random_state(rng):
    r, phi, nu = rng.uniform(-1, 1), rng.uniform(0, math.pi), 0.5 + rng.exponential(1.0)
    O = rotation_matrix(phi)
    S = squeeze_matrix(r)
    return GaussianState(rng.normal(size=2), nu * O @ S @ S @ O.T)


def extract_channel(net: OpticalNetwork, seed: int = 0, tol=AFFINE_TOL) -> GaussianChannel:
    """Recover the single-mode channel implemented by ``net``.

    ``delta`` and ``X`` come from displaced vacuum probes, ``Y`` from the
    vacuum output. Three more covariance probes and ten random states then
    confirm that the network acts as ``(X alpha + delta, X V X^T + Y)``.

    Raises:
        NotAffine: if any probe deviates by more than ``tol``.
    """
    half = 0.5 * np.eye(2)
    vac = run(net, GaussianState(None, half))
    delta = vac.alpha
    X = np.column_stack([run(net, GaussianState(e, half)).alpha - delta for e in np.eye(2)])
    Y = vac.V - X @ half @ X.T
    ch = GaussianChannel(X, Y, delta)

    e1, e2 = np.eye(2)
    probes = [
        GaussianState(None, half + np.outer(e1, e1)),
        GaussianState(None, half + np.outer(e2, e2)),
        GaussianState(None, half + 0.5 * (np.outer(e1, e2) + np.outer(e2, e1))),
    ]
    rng = np.random.default_rng(seed)
    probes += [_random_state(rng) for _ in range(10)]
    worst = 0.0
    for st in probes:
        got = run(net, st)
        want = ch.apply(st)
        scale = max(1.0, float(np.max(np.abs(want.V))), float(np.max(np.abs(want.alpha))))
        err = max(np.max(np.abs(got.V - want.V)), np.max(np.abs(got.alpha - want.alpha))) / scale
        worst = max(worst, float(err))
    if worst > tol:
        raise NotAffine(f"network output deviates from an affine Gaussian map by {worst:.3g}")
    return ch


def channel_residual(a: GaussianChannel, b: GaussianChannel) -> float:
    """Max-abs difference over ``X``, ``Y`` and ``delta``."""
    return float(max(np.max(np.abs(a.X - b.X)), np.max(np.abs(a.Y - b.Y)), np.max(np.abs(a.delta - b.delta))))


def _thermal_gates(tau, y, tol):
    if y < abs(tau - 1.0) / 2.0 - get_tol(tol):
        raise DomainError(f"(tau, y) = ({tau}, {y}) is not a physical thermal channel")
    T, G = thermal_TG(tau, y)
    T = min(max(T, 0.0), 1.0)
    G = max(G, 1.0)
    return [bs(T, 0, 1), tms(G, 0, 2)], (2 if tau < 0 else 0)


def build_thermal(tau: float, y: float, tol=None) -> OpticalNetwork:
    """Beam splitter ``T`` then two-mode squeezer ``G`` with vacuum ancillas.

    The signal output realizes ``tau >= 0`` and the idler output ``tau < 0``.

    Raises:
        DomainError: if ``y < |tau - 1|/2``.
    """
    gates, keep = _thermal_gates(tau, y, tol)
    return OpticalNetwork(3, (vacuum_ancilla(1), vacuum_ancilla(2)), gates, keep)


def build_fiducial(f: FiducialParams, tol=None) -> OpticalNetwork:
    """Thermal core dressed by ``S(-s)`` on the input and ``S(s)`` on the output."""
    if f.tau == 0:
        raise DomainError("the fiducial realization needs tau != 0")
    gates, keep = _thermal_gates(f.tau, f.y, tol)
    gates = [squeeze(-f.s, 0), *gates, squeeze(f.s, keep)]
    return OpticalNetwork(3, (vacuum_ancilla(1), vacuum_ancilla(2)), gates, keep)


def build_classical_signal(y: float) -> OpticalNetwork:
    """CV-CNOT from the input onto half of a TMS pair with ``G = y + 1/2``; keeps the target."""
    if y < 0.5:
        raise DomainError(f"the classical-signal channel needs y >= 1/2, got {y}")
    return OpticalNetwork(3, (tms_ancilla(y + 0.5, 1, 2),), (cnot(0, 1),), keep=1)


def build_single_quadrature_noise() -> OpticalNetwork:
    """CV-CNOT onto a vacuum ancilla; keeps the control."""
    return OpticalNetwork(2, (vacuum_ancilla(1),), (cnot(0, 1),), keep=0)


def cascade(first: OpticalNetwork, second: OpticalNetwork) -> OpticalNetwork:
    """Feed the kept mode of ``first`` into the input of ``second``."""
    n1 = first.n_modes
    mapping = {}
    nxt = n1
    for m in range(second.n_modes):
        if m == second.input_mode:
            mapping[m] = first.keep
        else:
            mapping[m] = nxt
            nxt += 1

    def remap(obj):
        return type(obj)(obj.kind, tuple(mapping[m] for m in obj.modes), obj.value)

    return OpticalNetwork(
        nxt,
        first.ancillas + tuple(remap(a) for a in second.ancillas),
        first.gates + tuple(remap(g) for g in second.gates),
        keep=mapping[second.keep],
        input_mode=first.input_mode,
    )


class _LineDecoder(json.JSONDecoder):
    """JSON decoder that remembers the line on which each object starts."""

    def __init__(self):
        super().__init__()
        self.lines = {}
        base = self.parse_object

        def parse_object(s_and_end, *args):
            s, end = s_and_end
            obj, new_end = base(s_and_end, *args)
            self.lines[id(obj)] = s.count("\n", 0, end) + 1
            return obj, new_end

        self.parse_object = parse_object
        self.scan_once = json.scanner.py_make_scanner(self)


def _gate_from_dict(d):
    kind = d.get("kind")
    if kind == "cnot":
        return cnot(d["control"], d["target"])
    if kind in ("phase", "squeeze"):
        key = "theta" if kind == "phase" else "s"
        return Gate(kind, (d["mode"],), float(d[key]))
    if kind in ("bs", "tms"):
        key = "T" if kind == "bs" else "G"
        return Gate(kind, tuple(d["modes"]), float(d[key]))
    raise ValueError(f"unknown gate kind {kind!r}")


def _ancilla_from_dict(d):
    kind = d.get("kind")
    if kind == "vacuum":
        return vacuum_ancilla(d["mode"])
    if kind == "thermal":
        return thermal_ancilla(float(d["y"]), d["mode"])
    if kind == "tms":
        return tms_ancilla(float(d["G"]), *d["modes"])
    raise ValueError(f"unknown ancilla kind {kind!r}")


def network_from_json(text: str) -> OpticalNetwork:
    """Parse a network description.

    Raises:
        ParseError: on malformed JSON or an invalid gate/ancilla entry; the
            message carries the line number of the offending object.
        ModeIndexOutOfRange: if an index exceeds the mode count.
    """
    dec = _LineDecoder()
    try:
        doc = dec.decode(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or "modes" not in doc:
        raise ParseError("network file must be an object with a 'modes' entry", 1)

    def build(items, factory, what):
        out = []
        for item in items:
            line = dec.lines.get(id(item))
            try:
                out.append(factory(item))
            except ModeIndexOutOfRange:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
                raise ParseError(f"bad {what}: {detail}", line) from None
        return out

    ancillas = build(doc.get("ancillas", []), _ancilla_from_dict, "ancilla")
    gates = build(doc.get("gates", []), _gate_from_dict, "gate")
    try:
        return OpticalNetwork(
            int(doc["modes"]), ancillas, gates, keep=int(doc.get("keep", 0)), input_mode=int(doc.get("input", 0))
        )
    except ModeIndexOutOfRange:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), dec.lines.get(id(doc))) from None


def network_to_json(net: OpticalNetwork) -> str:
    return json.dumps(net.to_dict(), indent=2)


def is_physical_extraction(c: GaussianChannel, tol=None) -> bool:
    """Whether an extracted channel passes the physicality check."""
    try:
        new_channel(c.X, c.Y, c.delta, tol=tol)
    except ValueError:
        return False
    return True


__all__ = [
    "AFFINE_TOL",
    "Ancilla",
    "CNOT_MATRIX",
    "Gate",
    "MultiModeState",
    "OpticalNetwork",
    "beam_splitter_matrix",
    "bs",
    "build_classical_signal",
    "build_fiducial",
    "build_single_quadrature_noise",
    "build_thermal",
    "cascade",
    "channel_residual",
    "cnot",
    "extract_channel",
    "network_from_json",
    "network_to_json",
    "omega_n",
    "phase",
    "run",
    "run_joint",
    "squeeze",
    "thermal_ancilla",
    "tms",
    "tms_ancilla",
    "two_mode_squeezer_matrix",
    "vacuum_ancilla",
]
