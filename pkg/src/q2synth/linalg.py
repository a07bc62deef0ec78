"""
Fixed-size complex linear algebra for two-qubit work.

Conventions used throughout the package:

* matrices are ``numpy`` arrays of dtype ``complex128`` stored row-major;
* the two-qubit basis is ``|00>, |01>, |10>, |11>`` with wire 0 (the top,
  higher qubit) as the most significant bit, so ``kron(A, B)`` acts with
  ``A`` on wire 0 and ``B`` on wire 1;
* one-qubit rotations are ``R_n(theta) = exp(+i sigma_n theta / 2)``.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import NumericalError, PreconditionError

# construction checks / reconstruction residuals / rank and zero decisions
TOL_CONSTRUCT = 1e-10
TOL_RESIDUAL = 1e-8
TOL_DECISION = 1e-6

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

XX = np.kron(PAULI_X, PAULI_X)
YY = np.kron(PAULI_Y, PAULI_Y)
ZZ = np.kron(PAULI_Z, PAULI_Z)
SIGMA_YY = YY

# CNOT controlled on wire 0 (top), targeting wire 1
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
# CNOT controlled on wire 1, targeting wire 0
CNOT_REV = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product ``a (x) b`` with ``a`` on wire 0."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def is_unitary(m: np.ndarray, tol: float = TOL_CONSTRUCT) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])) < tol)


def is_special_unitary(m: np.ndarray, tol: float = TOL_CONSTRUCT) -> bool:
    return is_unitary(m, tol) and abs(np.linalg.det(m) - 1) < tol


def check_unitary(m, shape: int | None = None, tol: float = TOL_RESIDUAL,
                  name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a complex array, raising PreconditionError unless unitary."""
    m = np.asarray(m, dtype=complex)
    if shape is not None and m.shape != (shape, shape):
        raise PreconditionError(f"{name} must be {shape}x{shape}, got shape {m.shape}")
    if not is_unitary(m, tol):
        raise PreconditionError(f"{name} is not unitary within {tol:g}")
    return m


def to_special(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Rescale a unitary to determinant one.

    Returns ``(s, phase)`` with ``m = exp(i phase) s`` and ``det s = 1``, using
    the principal ``n``-th root of the determinant.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    phase = cmath.phase(np.linalg.det(m)) / n
    return m * cmath.exp(-1j * phase), phase


def phase_dist(u: np.ndarray, v: np.ndarray, tol: float = TOL_RESIDUAL) -> float:
    """Frobenius distance between ``u`` and ``v`` minimized over a global phase.

    For n x n unitaries this equals ``sqrt(2n - 2 |tr(u^dag v)|)``; it is
    evaluated as ``||u - exp(i t) v||`` at the optimal ``t`` because the trace
    form cancels catastrophically near zero (noise floor ~1e-8).
    """
    u = check_unitary(u, tol=tol, name="u")
    v = check_unitary(v, tol=tol, name="v")
    if u.shape != v.shape:
        raise PreconditionError("phase_dist needs matrices of equal shape")
    return _aligned_dist(u, v, np.trace(v.conj().T @ u))


def state_phase_dist(s: np.ndarray, t: np.ndarray) -> float:
    """``min_theta ||s - exp(i theta) t||`` for unit vectors."""
    s = np.asarray(s, dtype=complex)
    t = np.asarray(t, dtype=complex)
    return _aligned_dist(s, t, np.vdot(t, s))


def _aligned_dist(x: np.ndarray, y: np.ndarray, overlap: complex) -> float:
    """``||x - exp(i t) y||`` with ``t = arg(overlap)``, ``overlap = <y, x>``."""
    ph = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(x - ph * y))


def rot(axis: str, angle: float) -> np.ndarray:
    """One-qubit rotation ``exp(i sigma_axis angle / 2)``."""
    try:
        pauli = PAULIS[axis]
    except KeyError:
        raise PreconditionError(f"unknown rotation axis {axis!r}") from None
    return math.cos(angle / 2) * I2 + 1j * math.sin(angle / 2) * pauli


def su2_from_column(s: np.ndarray) -> np.ndarray:
    """The SU(2) matrix ``[[s0, -conj(s1)], [s1, conj(s0)]]`` sending |0> to ``s``."""
    s0, s1 = complex(s[0]), complex(s[1])
    return np.array([[s0, -s1.conjugate()], [s1, s0.conjugate()]], dtype=complex)


def sym_unitary_eig(s: np.ndarray, seed: int = 0, max_tries: int = 16,
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal eigendecomposition of a symmetric unitary matrix.

    A symmetric unitary ``S = A + iB`` has commuting real symmetric parts, so
    a single real orthogonal ``O`` diagonalizes both. ``O`` is taken from the
    eigenvectors of ``A + w B`` for a random weight ``w``; an unlucky ``w``
    that merges distinct eigenvalues is detected by the residual and retried.

    Returns:
        (O, D) with ``S = O @ D @ O.T``, ``O`` real with ``det O = +1`` and
        ``D`` diagonal unitary.

    Raises:
        PreconditionError: if ``S`` is not symmetric and unitary.
        NumericalError: if no weight reaches a residual below 1e-8.
    """
    s = np.asarray(s, dtype=complex)
    if s.shape[0] != s.shape[1] or not is_unitary(s, TOL_RESIDUAL):
        raise PreconditionError("sym_unitary_eig needs a unitary matrix")
    if np.linalg.norm(s - s.T) > TOL_RESIDUAL:
        raise PreconditionError("sym_unitary_eig needs a symmetric matrix")
    a = (s.real + s.real.T) / 2
    b = (s.imag + s.imag.T) / 2
    rng = np.random.default_rng(seed)
    best = (math.inf, None, None)
    for attempt in range(max_tries):
        w = 1.0 if attempt == 0 else rng.uniform(0.5, 4.0) * rng.choice([-1, 1])
        # irrational offset keeps the first weight away from special values
        _, o = np.linalg.eigh(a + (w + 0.6180339887498949) * b)
        d = np.diag(np.diag(o.T @ s @ o))
        residual = np.linalg.norm(o @ d @ o.T - s)
        if residual < best[0]:
            best = (residual, o, d)
        if residual < 1e-12:
            break
    residual, o, d = best
    if residual >= TOL_RESIDUAL:
        raise NumericalError(
            f"sym_unitary_eig: best residual {residual:.3e} after {max_tries} weights"
        )
    if np.linalg.det(o) < 0:
        o[:, 0] = -o[:, 0]
    dd = np.diag(d)
    return o, np.diag(dd / np.abs(dd))


def zyz_angles(g: np.ndarray) -> tuple[float, float, float]:
    """Euler angles with ``rot('z', a) @ rot('y', b) @ rot('z', c) = +-g``.

    ``b`` lies in [0, pi]; ``a`` and ``c`` in (-pi, pi].
    """
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2) or not is_special_unitary(g, TOL_RESIDUAL):
        raise PreconditionError("zyz_angles needs an SU(2) matrix")
    beta = 2 * math.atan2(abs(g[0, 1]), abs(g[0, 0]))
    if abs(g[0, 1]) < 1e-14:
        alpha, gamma = 2 * cmath.phase(g[0, 0]), 0.0
    elif abs(g[0, 0]) < 1e-14:
        alpha, gamma = 2 * cmath.phase(g[0, 1]), 0.0
    else:
        p0, p1 = cmath.phase(g[0, 0]), cmath.phase(g[0, 1])
        alpha, gamma = p0 + p1, p0 - p1
    return _wrap(alpha), beta, _wrap(gamma)


def _wrap(angle: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.remainder(angle, 2 * math.pi)
    if w <= -math.pi + 1e-15:
        w += 2 * math.pi
    return 0.0 if w == 0 else w


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of U(n)."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_special_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return to_special(random_unitary(n, rng))[0]


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in C^n."""
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SO(n)."""
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
