import math

import numpy as np
import pytest

import gausschan.realize as rz
from gausschan.channel import GaussianState, classify, new_channel, thermal_channel
from gausschan.decompose import FiducialParams, decompose_fiducial, reconstruction_residual
from gausschan.errors import DomainError, ModeIndexOutOfRange, NotAffine, ParseError
from gausschan.realize import (
    CNOT_MATRIX,
    Gate,
    OpticalNetwork,
    build_classical_signal,
    build_fiducial,
    build_single_quadrature_noise,
    build_thermal,
    cascade,
    channel_residual,
    extract_channel,
    network_from_json,
    network_to_json,
    omega_n,
    run,
    run_joint,
    thermal_ancilla,
    vacuum_ancilla,
)

HALF = 0.5 * np.eye(2)


def is_symplectic_n(S, tol=1e-12):
    n = S.shape[0] // 2
    return np.max(np.abs(S @ omega_n(n) @ S.T - omega_n(n))) <= tol


@pytest.mark.parametrize(
    "gate",
    [
        rz.phase(0.7, 1),
        rz.squeeze(-0.4, 0),
        rz.bs(0.3, 0, 2),
        rz.bs(1.0, 2, 1),
        rz.tms(2.5, 1, 2),
        rz.cnot(0, 1),
        rz.cnot(2, 0),
    ],
)
def test_gates_symplectic(gate):
    assert is_symplectic_n(gate.matrix(3))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("mirror", (0,))
    with pytest.raises(ValueError):
        Gate("bs", (0,), 0.5)
    with pytest.raises(ValueError):
        Gate("bs", (1, 1), 0.5)
    with pytest.raises(DomainError):
        rz.bs(1.2, 0, 1).matrix(2)
    with pytest.raises(DomainError):
        rz.tms(0.9, 0, 1).matrix(2)
    with pytest.raises(ModeIndexOutOfRange):
        rz.bs(0.5, 0, 3).matrix(2)


def test_network_validation():
    with pytest.raises(ModeIndexOutOfRange):
        OpticalNetwork(2, (vacuum_ancilla(1),), (), keep=2)
    with pytest.raises(ValueError):
        OpticalNetwork(2, (vacuum_ancilla(1), vacuum_ancilla(1)), ())
    with pytest.raises(ValueError):
        OpticalNetwork(3, (vacuum_ancilla(1),), ())
    with pytest.raises(ValueError):
        OpticalNetwork(2, (vacuum_ancilla(0), vacuum_ancilla(1)), ())
    with pytest.raises(ModeIndexOutOfRange):
        OpticalNetwork(2, (vacuum_ancilla(1),), (rz.cnot(0, 5),))


def test_empty_network_identity():
    net = OpticalNetwork(1)
    st = GaussianState([0.3, -0.2], [[1.2, 0.1], [0.1, 0.7]])
    out = run(net, st)
    assert np.array_equal(out.V, st.V) and np.array_equal(out.alpha, st.alpha)


def test_beam_splitter_vacuum_fixed_point():
    net = OpticalNetwork(2, (vacuum_ancilla(1),), (rz.bs(0.5, 0, 1),))
    out = run(net, GaussianState(None, HALF))
    assert np.allclose(out.V, HALF, atol=1e-15)


def test_cnot_joint_covariance_exact():
    vq, vqp, vp, y = 1.25, 0.375, 0.625, 1.5
    net = OpticalNetwork(2, (thermal_ancilla(y, 1),), (rz.cnot(0, 1),))
    joint = run_joint(net, GaussianState(None, [[vq, vqp], [vqp, vp]]))
    want = np.array(
        [
            [vq, vqp, vq, 0.0],
            [vqp, vp + y, vqp, -y],
            [vq, vqp, y + vq, 0.0],
            [0.0, -y, 0.0, y],
        ]
    )
    assert np.array_equal(joint.V, want)


def test_cnot_matrix_is_symplectic():
    assert np.array_equal(CNOT_MATRIX @ omega_n(2) @ CNOT_MATRIX.T, omega_n(2))


def test_extract_lossy():
    T = 0.37
    net = OpticalNetwork(2, (vacuum_ancilla(1),), (rz.bs(T, 0, 1),))
    c = extract_channel(net)
    assert np.allclose(c.X, math.sqrt(T) * np.eye(2), atol=1e-15)
    assert np.allclose(c.Y, (1 - T) / 2 * np.eye(2), atol=1e-15)


def test_extract_amplifier_and_conjugator():
    G = 1.8
    sig = OpticalNetwork(2, (vacuum_ancilla(1),), (rz.tms(G, 0, 1),), keep=0)
    c = extract_channel(sig)
    assert np.allclose(c.X, math.sqrt(G) * np.eye(2), atol=1e-15)
    assert np.allclose(c.Y, (G - 1) / 2 * np.eye(2), atol=1e-15)
    idl = OpticalNetwork(2, (vacuum_ancilla(1),), (rz.tms(G, 0, 1),), keep=1)
    c = extract_channel(idl)
    assert np.allclose(c.X, math.sqrt(G - 1) * np.diag([1.0, -1.0]), atol=1e-15)
    assert abs(c.tau + (G - 1)) < 1e-14
    assert classify(c).tag == "D"


def test_build_thermal_examples():
    net = build_thermal(0.5, 0.25)
    assert [g.value for g in net.gates] == [0.5, 1.0]
    net = build_thermal(2.0, 0.5)
    assert abs(net.gates[0].value - 1) < 1e-15 and abs(net.gates[1].value - 2) < 1e-15
    net = build_thermal(-1.0, 1.0)
    assert abs(net.gates[0].value - 1) < 1e-15 and abs(net.gates[1].value - 2) < 1e-15
    assert abs(extract_channel(net).tau + 1) < 1e-14
    with pytest.raises(DomainError):
        build_thermal(0.5, 0.1)


def thermal_grid():
    pts = []
    for tau in np.linspace(-2.0, -0.1, 4):
        pts += [(tau, (abs(tau) + 1) / 2 + dy) for dy in (0.0, 0.6)]
    for tau in np.linspace(0.1, 0.9, 4):
        pts += [(tau, (1 - tau) / 2 + dy) for dy in (0.0, 0.6)]
    for tau in np.linspace(1.2, 3.0, 4):
        pts += [(tau, (tau - 1) / 2 + dy) for dy in (0.0, 0.6)]
    pts += [(1.0, y) for y in (0.1, 0.5, 2.0)]
    pts += [(0.0, y) for y in (0.5, 1.0, 2.5)]
    return pts


@pytest.mark.parametrize("tau, y", thermal_grid())
def test_build_thermal_grid(tau, y):
    c = extract_channel(build_thermal(tau, y))
    assert channel_residual(c, thermal_channel(tau, y)) <= 1e-10
    new_channel(c.X, c.Y, c.delta)


def test_build_fiducial():
    f = FiducialParams(0.7, 0.3, 0.4)
    c = extract_channel(build_fiducial(f))
    assert np.allclose(c.Y, 0.3 * np.diag([math.exp(0.8), math.exp(-0.8)]), atol=1e-12)
    assert channel_residual(c, f.channel()) <= 1e-10
    assert channel_residual(extract_channel(build_fiducial(FiducialParams(-0.6, 1.1, 0.3))), FiducialParams(-0.6, 1.1, 0.3).channel()) <= 1e-10
    with pytest.raises(DomainError):
        build_fiducial(FiducialParams(0.0, 0.5, 0.1))


def test_build_fiducial_s0_is_thermal():
    a = extract_channel(build_fiducial(FiducialParams(0.6, 0.4, 0.0)))
    b = extract_channel(build_thermal(0.6, 0.4))
    assert channel_residual(a, b) <= 1e-14


def test_network_cascade():
    tau, y, s = 0.55, 0.6, 0.25
    T = 2 * tau / (2 * y + tau + 1)
    G = tau / T
    net = cascade(build_fiducial(FiducialParams(T, (1 - T) / 2, s)), build_fiducial(FiducialParams(G, (G - 1) / 2, s)))
    c = extract_channel(net)
    assert channel_residual(c, FiducialParams(tau, y, s).channel()) <= 1e-12


def test_single_quadrature_noise():
    c = extract_channel(build_single_quadrature_noise())
    assert np.array_equal(c.X, np.eye(2))
    assert np.array_equal(c.Y, np.diag([0.0, 0.5]))
    out = run(build_single_quadrature_noise(), GaussianState(None, HALF))
    assert np.array_equal(out.V, np.diag([0.5, 1.0]))


def test_classical_signal():
    c = extract_channel(build_classical_signal(0.5))
    assert np.array_equal(c.X, np.diag([1.0, 0.0]))
    assert np.allclose(c.Y, HALF, atol=1e-15)
    for y in (0.5, 0.9, 2.0):
        c = extract_channel(build_classical_signal(y))
        assert c.tau == 0.0
        assert classify(c).tag == "A2"
        assert np.allclose(c.Y, y * np.eye(2), atol=1e-14)
    with pytest.raises(DomainError):
        build_classical_signal(0.4)


def test_single_quadrature_limit_convergence():
    c = extract_channel(build_single_quadrature_noise())
    res = [reconstruction_residual(c, decompose_fiducial(c, s_T=t)) for t in (6, 8, 10)]
    assert res[0] > res[1] > res[2]
    for t, r in zip((6, 8, 10), res):
        assert r <= 10 * math.exp(-2 * t)


def test_joint_states_stay_valid(rng):
    for _ in range(50):
        tau = rng.uniform(-2, 2)
        y = abs(tau - 1) / 2 + rng.exponential(0.5)
        s = rng.uniform(-0.7, 0.7)
        net = build_fiducial(FiducialParams(tau, y, s)) if abs(tau) > 1e-3 else build_thermal(tau, y)
        r = rng.uniform(-1, 1)
        st = GaussianState(rng.normal(size=2), 0.5 * np.diag([math.exp(2 * r), math.exp(-2 * r)]))
        assert run_joint(net, st).is_valid(1e-10)


def test_not_affine(monkeypatch):
    net = build_thermal(0.5, 0.4)
    real_run = rz.run

    def warped(n, st):
        out = real_run(n, st)
        return GaussianState(out.alpha, out.V + 1e-3 * out.V @ out.V)

    monkeypatch.setattr(rz, "run", warped)
    with pytest.raises(NotAffine):
        rz.extract_channel(net)


def test_json_roundtrip():
    for net in (
        build_fiducial(FiducialParams(0.7, 0.3, 0.4)),
        build_classical_signal(1.0),
        build_single_quadrature_noise(),
        OpticalNetwork(2, (thermal_ancilla(0.8, 1),), (rz.phase(0.3, 0), rz.cnot(1, 0))),
    ):
        back = network_from_json(network_to_json(net))
        assert back == net


def test_json_bad_gate_line():
    text = """{
  "modes": 2,
  "ancillas": [{"kind": "vacuum", "mode": 1}],
  "gates": [
    {"kind": "bs", "T": 0.5, "modes": [0, 1]},
    {"kind": "mirror", "modes": [0, 1]}
  ],
  "keep": 0
}"""
    with pytest.raises(ParseError) as exc:
        network_from_json(text)
    assert exc.value.line == 6
    assert "line 6" in str(exc.value) and "mirror" in str(exc.value)


def test_json_errors():
    with pytest.raises(ParseError) as exc:
        network_from_json('{"modes": 2,\n "gates": [}')
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        network_from_json('{"modes": 2, "ancillas": [{"kind": "vacuum"}]}')
    with pytest.raises(ParseError):
        network_from_json("[1, 2]")
    with pytest.raises(ModeIndexOutOfRange):
        network_from_json('{"modes": 2, "ancillas": [{"kind": "vacuum", "mode": 1}], "keep": 4}')
