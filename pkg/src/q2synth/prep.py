"""
Two-qubit state preparation from |00> with a single CNOT, and the
row-specified synthesis that follows from it by taking inverses.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .circuit import CNOTGate, Circuit, OneQubit, apply
from .errors import PreconditionError
from .invariants import eps
from .linalg import (
    CNOT,
    TOL_DECISION,
    TOL_RESIDUAL,
    check_unitary,
    kron,
    state_phase_dist,
    su2_from_column,
)

ZERO_STATE = np.array([1, 0, 0, 0], dtype=complex)
# product states with second Schmidt coefficient below this get a 0-CNOT circuit
SEPARABLE_TOL = 1e-9


@dataclass(frozen=True)
class PrepSolution:
    circuit: Circuit
    residual: float


@dataclass(frozen=True)
class CanPrepareResult:
    answer: bool
    witness: Optional[tuple]
    max_eps: float
    restarts: int


def _normalized(state) -> np.ndarray:
    s = np.asarray(state, dtype=complex)
    if s.shape != (4,):
        raise PreconditionError("state must have 4 amplitudes")
    if abs(np.linalg.norm(s) - 1) > TOL_RESIDUAL:
        raise PreconditionError("state is not normalized")
    return s


def _orient(x: np.ndarray) -> np.ndarray:
    """Fix the sign of a kernel vector (Re z > 0, else Im z > 0, else lambda > 0)."""
    for k in range(3):
        if abs(x[k]) > 1e-12:
            return x if x[k] > 0 else -x
    return x


def _kernel_vector(m: np.ndarray) -> np.ndarray:
    """Unit vector (Re z, Im z, lambda) in the kernel of the 2x3 real system."""
    _, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > 1e-13))
    kernel = vt[rank:].T  # 3 x k orthonormal
    if kernel.shape[1] == 1:
        return _orient(kernel[:, 0])
    # prefer lambda = 0, then the largest Re z
    lam_row = kernel[2]
    if np.linalg.norm(lam_row) > 1e-12:
        y = np.linalg.svd(lam_row[None, :])[2][1:].T  # directions with lambda = 0
        sub = kernel @ y
    else:
        sub = kernel
    re_row = sub[0]
    if np.linalg.norm(re_row) > 1e-12:
        x = sub @ (re_row / np.linalg.norm(re_row))
    else:
        x = sub[:, 0]
    x = x / np.linalg.norm(x)
    x[2] = 0.0 if abs(x[2]) < 1e-15 else x[2]
    return _orient(x)


def solve_c(phi) -> np.ndarray:
    """One-qubit gate ``c`` such that ``CNOT (I (x) c) phi`` is a product state.

    With ``c = [[u, -conj(v)], [v, conj(u)]]`` the entanglement of the result is
    ``-2 (p02 z - p13 conj(z) - (p03 + p12) lam)`` where ``z = u^2 - v^2`` and
    ``lam = 2 Re(u conj(v))`` (``pij = phi_i phi_j``). Setting it to zero is a
    real 2x3 linear system; a unit kernel vector fixes ``|z|^2 + lam^2 = 1`` and
    ``u, v`` are recovered from ``z`` and ``lam``.
    """
    p = _normalized(phi)
    a_, b_, c_ = p[0] * p[2], p[1] * p[3], p[0] * p[3] + p[1] * p[2]
    m = np.array([
        [(a_ - b_).real, -(a_ + b_).imag, -c_.real],
        [(a_ - b_).imag, (a_ + b_).real, -c_.imag],
    ])
    x = _kernel_vector(m)
    z = complex(x[0], x[1])
    lam = float(x[2])
    chi = cmath.phase(z) if abs(z) > 0 else 0.0
    t = 0.5 * math.acos(min(1.0, abs(z)))
    half = cmath.exp(0.5j * chi)
    u = math.cos(t) * half
    v = (1.0 if lam >= 0 else -1.0) * math.sin(t) * half
    return np.array([[u, -v.conjugate()], [v, u.conjugate()]], dtype=complex)


def _product_factors(state: np.ndarray):
    """Best ``s (x) t`` approximation; returns (s, t, second Schmidt coefficient)."""
    u, sv, vh = np.linalg.svd(state.reshape(2, 2))
    return u[:, 0], vh[0], sv[1]


def synth_prep(phi) -> PrepSolution:
    """Circuit preparing ``phi`` from |00> with one CNOT and three one-qubit gates.

    ``c = solve_c(phi)`` makes ``eta = CNOT (I (x) c) phi`` a product ``s (x) t``;
    then ``(I (x) c^dag) CNOT (a (x) b)|00> = phi`` where ``a|0> = s, b|0> = t``.
    Product targets are prepared by ``a (x) b`` alone.
    """
    phi = _normalized(phi)
    s, t, schmidt = _product_factors(phi)
    if schmidt < SEPARABLE_TOL:
        circuit = Circuit((OneQubit(0, su2_from_column(s)), OneQubit(1, su2_from_column(t))),
                          metadata="synth_prep: product state")
    else:
        c = solve_c(phi)
        eta = CNOT @ kron(np.eye(2), c) @ phi
        s, t, _ = _product_factors(eta)
        circuit = Circuit(
            (
                OneQubit(0, su2_from_column(s)),
                OneQubit(1, su2_from_column(t)),
                CNOTGate(0, 1),
                OneQubit(1, c.conj().T),
            ),
            metadata="synth_prep",
        )
    residual = state_phase_dist(apply(circuit, ZERO_STATE), phi)
    return PrepSolution(circuit, residual)


def synth_row(u) -> Circuit:
    """Circuit ``w`` whose first row matches that of ``u`` up to phase.

    Preparing ``u^dag |00>`` and inverting the circuit gives ``<00| w = <00| u``
    (up to phase), so at most one CNOT is used.
    """
    u = check_unitary(u, shape=4, name="u")
    target = u.conj().T @ ZERO_STATE
    circuit = synth_prep(target).circuit.inverse()
    return Circuit(circuit.gates, metadata="synth_row")


# ------------------------------------------------------------ gate capability

def _bloch(theta: float, phi: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), cmath.exp(1j * phi) * math.sin(theta / 2)])


def _eps_of_image(g: np.ndarray, x) -> complex:
    return eps(g @ np.kron(_bloch(x[0], x[1]), _bloch(x[2], x[3])))


def _starts(n: int, seed: int) -> np.ndarray:
    sobol = qmc.Sobol(d=4, scramble=True, seed=seed)
    # polar angles in [0, pi], azimuths in [0, 2pi)
    return sobol.random(n) * np.array([math.pi, 2 * math.pi] * 2)


def eps_extremum(g, maximize: bool, restarts: int = 32, seed: int = 0,
                 target: Optional[float] = None):
    """Extremize ``|eps(G (a (x) b)|00>)|`` over a, b in SU(2).

    Only ``a|0>`` and ``b|0>`` matter, so each factor is searched through its
    two Bloch angles; the witness gates are SU(2) completions of the optimal
    columns. Multistart Nelder-Mead from scrambled Sobol points, stopping
    early once ``target`` is reached.

    Returns:
        (value, (a, b), restarts_used)
    """
    g = check_unitary(g, shape=4, name="G")
    sign = -1.0 if maximize else 1.0

    def f(x):
        return sign * abs(_eps_of_image(g, x)) ** 2

    best_val, best_x, used = math.inf, None, 0
    for x0 in _starts(restarts, seed):
        used += 1
        res = minimize(f, x0, method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-18, "maxiter": 2000})
        if res.fun < best_val:
            best_val, best_x = res.fun, res.x
        value = math.sqrt(abs(best_val))
        if target is not None and (value >= target if maximize else value <= target):
            break
    value = math.sqrt(abs(best_val))
    witness = (su2_from_column(_bloch(best_x[0], best_x[1])),
               su2_from_column(_bloch(best_x[2], best_x[3])))
    return value, witness, used


def can_prepare_all(g, restarts: int = 32, seed: int = 0) -> CanPrepareResult:
    """Decide whether one use of ``G`` plus one-qubit gates prepares every state.

    True iff some product input is mapped to a maximally entangled state,
    i.e. ``max |eps(G (a (x) b)|00>)| = 1``, judged at ``1 - 1e-6``.
    """
    value, witness, used = eps_extremum(g, maximize=True, restarts=restarts,
                                        seed=seed, target=1 - 1e-10)
    answer = value >= 1 - TOL_DECISION
    return CanPrepareResult(answer, witness if answer else None, value, used)
