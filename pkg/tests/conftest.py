"""Shared fixtures and independent oracles for the test suite."""
import numpy as np
import pytest
from scipy.linalg import expm

from q2synth.circuit import CNOTGate, OneQubit, Rot

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": X, "y": Y, "z": Z}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def haar(n, rng):
    """Haar unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q @ np.diag(np.diag(r) / abs(np.diag(r)))


def haar_state(rng, n=4):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_local(rng):
    return np.kron(haar(2, rng), haar(2, rng))


def oracle_gate(g):
    """4x4 matrix of one gate, built independently of the package."""
    if isinstance(g, CNOTGate):
        m = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            bits = [(i >> 1) & 1, i & 1]
            if bits[g.control]:
                bits[g.target] ^= 1
            m[2 * bits[0] + bits[1], i] = 1
        return m
    if isinstance(g, Rot):
        one = expm(0.5j * g.angle * PAULI[g.axis])
    else:
        assert isinstance(g, OneQubit)
        one = np.asarray(g.matrix2)
    return np.kron(one, np.eye(2)) if g.wire == 0 else np.kron(np.eye(2), one)


def oracle_unitary(circuit):
    u = np.eye(4, dtype=complex)
    for g in circuit.gates:
        u = oracle_gate(g) @ u
    return u


def oracle_abs_eps(state):
    """|eps| equals the concurrence 2 |det reshape(state)|."""
    return 2 * abs(np.linalg.det(np.asarray(state).reshape(2, 2)))


def oracle_makhlin(u):
    yy = np.kron(Y, Y)
    s = u / np.linalg.det(u) ** 0.25
    return np.linalg.eigvals(s.T @ yy @ s @ yy)


def oracle_phase_dist(u, v):
    """min over t of ||u - e^{it} v||, by dense sampling plus refinement."""
    from scipy.optimize import minimize_scalar

    f = lambda t: np.linalg.norm(u - np.exp(1j * t) * v)
    ts = np.linspace(0, 2 * np.pi, 721)
    t0 = ts[np.argmin([f(t) for t in ts])]
    return minimize_scalar(f, bounds=(t0 - 0.01, t0 + 0.01), method="bounded",
                           options={"xatol": 1e-14}).fun
