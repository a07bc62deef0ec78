"""
Local-equivalence invariants of two-qubit states and operators.

The central object is the magic basis ``E`` (``E @ E.T = sigma_y (x) sigma_y``):
it conjugates SO(4) onto SU(2) (x) SU(2), turns ``eps`` into the bilinear form
``v.T @ v`` and diagonalizes ``XX``, ``YY`` and ``ZZ`` simultaneously. Everything
below (canonical decomposition, Kronecker factoring, constructive local
transforms) is linear algebra in that basis.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EpsMismatch,
    NotAProduct,
    NumericalError,
    PreconditionError,
    SpectrumMismatch,
)
from .linalg import (
    PAULIS,
    SIGMA_YY,
    TOL_DECISION,
    TOL_RESIDUAL,
    XX,
    YY,
    ZZ,
    check_unitary,
    kron,
    phase_dist,
    rot,
    state_phase_dist,
    sym_unitary_eig,
    to_special,
)

MAGIC = (1j / math.sqrt(2)) * np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex
)
MAGIC_DAG = MAGIC.conj().T

# Row k holds the magic-basis diagonal entries of (I, XX, YY, ZZ) at position k,
# so the eigenphases of exp(i(phi + tx XX + ty YY + tz ZZ)) are PATTERN @ (phi, tx, ty, tz).
PATTERN = np.column_stack(
    [np.ones(4)] + [np.diag(MAGIC_DAG @ p @ MAGIC).real for p in (XX, YY, ZZ)]
)
PATTERN_INV = np.linalg.inv(PATTERN)

QUARTER_PI = math.pi / 4
_TIE = 1e-9


def eps(state: np.ndarray) -> complex:
    """``<state*| sigma_y (x) sigma_y |state>``, i.e. ``2 (s1 s2 - s0 s3)``.

    Vanishes exactly on product states; ``|eps|`` is a local-unitary invariant.
    """
    s = np.asarray(state, dtype=complex)
    if s.shape != (4,):
        raise PreconditionError("eps expects 4 amplitudes")
    return complex(s @ SIGMA_YY @ s)


def nonlocal_part(theta) -> np.ndarray:
    """``exp(i (tx XX + ty YY + tz ZZ))``."""
    phases = PATTERN[:, 1:] @ np.asarray(theta, dtype=float)
    return MAGIC @ np.diag(np.exp(1j * phases)) @ MAGIC_DAG


# ------------------------------------------------------------ Makhlin spectrum

@dataclass(frozen=True, eq=False)
class MakhlinSpectrum:
    """Eigenvalues of ``u.T Syy u Syy`` sorted by phase in (-pi, pi]."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=complex)
        ph = np.angle(ev)
        ph = np.where(ph <= -math.pi + 1e-12, math.pi, ph)
        order = np.lexsort((np.round(ph, 9),))
        ev = ev[order]
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    def distance(self, other: "MakhlinSpectrum", up_to_sign: bool = True) -> float:
        """Max-norm multiset distance (optionally allowing an overall sign).

        Normalizing U(4) to SU(4) leaves a fourth root of unity free, which
        multiplies the spectrum by +-1; ``up_to_sign`` quotients that out.
        """
        return multiset_distance(self.eigenvalues, other.eigenvalues, up_to_sign)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __len__(self):
        return 4


def multiset_distance(a, b, up_to_sign: bool = True) -> float:
    signs = (1, -1) if up_to_sign else (1,)
    best = math.inf
    for sign in signs:
        for perm in itertools.permutations(range(4)):
            d = np.max(np.abs(np.asarray(a)[list(perm)] - sign * np.asarray(b)))
            best = min(best, d)
    return float(best)


def makhlin_spectrum(u: np.ndarray) -> MakhlinSpectrum:
    """Spectrum of ``u.T Syy u Syy`` after rescaling ``u`` into SU(4)."""
    u = check_unitary(u, shape=4, name="u")
    us, _ = to_special(u)
    return MakhlinSpectrum(np.linalg.eigvals(us.T @ SIGMA_YY @ us @ SIGMA_YY))


# ------------------------------------------------------------ Weyl chamber

def _chamber_moves(theta) -> tuple[np.ndarray, list]:
    """Reduce angles into ``pi/4 >= tx >= ty >= |tz|``.

    Returns the normalized angles and the list of moves applied, each one of
    ``("shift", k, n)``, ``("flip", j, k)``, ``("swap", j, k)``.
    """
    t = np.array(theta, dtype=float)
    moves: list = []

    def shift(k, n):
        if n:
            t[k] -= n * math.pi / 2
            moves.append(("shift", k, n))

    def flip(j, k):
        t[j], t[k] = -t[j], -t[k]
        moves.append(("flip", j, k))

    def swap(j, k):
        t[j], t[k] = t[k], t[j]
        moves.append(("swap", j, k))

    for k in range(3):
        shift(k, int(round(t[k] / (math.pi / 2))))
    for _ in range(2):
        for j in range(2):
            if abs(t[j]) < abs(t[j + 1]) - 1e-15:
                swap(j, j + 1)
    if t[0] < 0:
        flip(0, 2)
    if t[1] < 0:
        flip(1, 2)
    if t[0] > QUARTER_PI - _TIE and t[2] < 0:
        shift(0, 1)
        flip(0, 2)
    return t, moves


def chamber_normalize(theta) -> np.ndarray:
    return _chamber_moves(theta)[0]


def _third(j: int, k: int) -> int:
    return 3 - j - k


_AXES = "xyz"


def _move_locals(move) -> tuple[tuple, tuple]:
    """Locals ``(L, R)`` (each a pair of 2x2) with ``A(old) ~ (L0 (x) L1) A(new) (R0 (x) R1)``."""
    kind, j, k = move
    eye = np.eye(2, dtype=complex)
    if kind == "shift":
        # exp(i pi/2 s s) = i (s (x) s); right-multiply by (i s)^n on both wires
        m = np.linalg.matrix_power(1j * PAULIS[_AXES[j]], k)
        return (eye, eye), (m, m)
    if kind == "flip":
        m = 1j * PAULIS[_AXES[_third(j, k)]]
        return (m, eye), (m.conj().T, eye)
    # swap: conjugation by R_l(pi/2) (x) R_l(pi/2) exchanges axes j and k
    m = rot(_AXES[_third(j, k)], math.pi / 2)
    return (m.conj().T, m.conj().T), (m, m)


# ------------------------------------------------------------ decompositions

@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """``exp(i phase) (a (x) b) exp(i(tx XX + ty YY + tz ZZ)) (c (x) d)``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    theta_x: float
    theta_y: float
    theta_z: float
    phase: float

    @property
    def theta(self) -> tuple[float, float, float]:
        return (self.theta_x, self.theta_y, self.theta_z)

    def matrix(self) -> np.ndarray:
        return (np.exp(1j * self.phase) * kron(self.a, self.b)
                @ nonlocal_part(self.theta) @ kron(self.c, self.d))


def local_factor(w: np.ndarray, tol: float = TOL_DECISION) -> tuple[np.ndarray, np.ndarray]:
    """Split ``w ~ a (x) b`` with ``a, b`` in SU(2).

    The 4x4 matrix is rearranged so that a Kronecker product becomes a rank-one
    4x4 matrix ``vec(a) vec(b)^T``; the leading singular pair gives the factors.

    Raises:
        NotAProduct: if the rearranged matrix is not rank one within ``tol``.
    """
    w = np.asarray(w, dtype=complex)
    if w.shape != (4, 4):
        raise PreconditionError("local_factor expects a 4x4 matrix")
    r = w.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    if s[0] == 0 or math.sqrt(np.sum(s[1:] ** 2)) >= tol * s[0]:
        raise NotAProduct(
            f"operator is not a Kronecker product (residual {np.sum(s[1:] ** 2) ** 0.5:.3e})"
        )
    a = math.sqrt(s[0]) * u[:, 0].reshape(2, 2)
    b = math.sqrt(s[0]) * vh[0].reshape(2, 2)
    return to_special(a)[0], to_special(b)[0]


def _apply_chamber(theta, a, b, c, d):
    t, moves = _chamber_moves(theta)
    for move in moves:
        (l0, l1), (r0, r1) = _move_locals(move)
        a, b = a @ l0, b @ l1
        c, d = r0 @ c, r1 @ d
    return t, a, b, c, d


def canonical_decompose(u: np.ndarray, seed: int = 0) -> CanonicalForm:
    """Canonical (KAK) decomposition with chamber-normalized angles.

    Works in the magic basis: ``m = E^dag u E`` factors as ``P D Q^T`` with
    ``P, Q`` in SO(4) and ``D`` diagonal, where ``Q`` diagonalizes ``m^T m``.

    Raises:
        NumericalError: if the reconstruction residual exceeds 1e-8.
    """
    u = check_unitary(u, shape=4, name="u")
    us, _ = to_special(u)
    m = MAGIC_DAG @ us @ MAGIC
    q, d2 = sym_unitary_eig(m.T @ m, seed=seed)
    dvals = np.sqrt(np.diag(d2))
    p = m @ q @ np.diag(1 / dvals)
    if np.linalg.norm(p.imag) > TOL_RESIDUAL:
        raise NumericalError(f"left factor not real (imag norm {np.linalg.norm(p.imag):.2e})")
    p = p.real
    if np.linalg.det(p) < 0:
        p[:, 0] = -p[:, 0]
        dvals[0] = -dvals[0]
    h = np.angle(dvals)
    coeffs = PATTERN_INV @ h
    a, b = local_factor(MAGIC @ p @ MAGIC_DAG)
    c, d = local_factor(MAGIC @ q.T @ MAGIC_DAG)
    theta, a, b, c, d = _apply_chamber(coeffs[1:], a, b, c, d)
    core = kron(a, b) @ nonlocal_part(theta) @ kron(c, d)
    phase = float(np.angle(np.trace(core.conj().T @ u)))
    form = CanonicalForm(a, b, c, d, *map(float, theta), phase)
    residual = np.linalg.norm(form.matrix() - u)
    if residual > TOL_RESIDUAL:
        raise NumericalError(f"canonical_decompose residual {residual:.3e}")
    return form


def _angles_from_spectrum(ev: np.ndarray) -> np.ndarray:
    """Raw (unnormalized) canonical angles from Makhlin eigenvalues, batched."""
    h = np.angle(ev) / 2
    # branches of the square root must multiply to +1 (det D = 1)
    odd = np.mod(np.round(h.sum(axis=-1) / math.pi), 2) == 1
    h[..., 0] += np.where(odd, math.pi, 0.0)
    return (h @ PATTERN_INV.T)[..., 1:]


def chamber_normalize_batch(theta: np.ndarray) -> np.ndarray:
    """Vectorized equivalent of :func:`chamber_normalize` for shape (..., 3)."""
    t = theta - (math.pi / 2) * np.round(theta / (math.pi / 2))
    mags = -np.sort(-np.abs(t), axis=-1)
    sign = np.where(np.prod(t, axis=-1) < 0, -1.0, 1.0)
    mags[..., 2] *= sign
    tie = (mags[..., 0] > QUARTER_PI - _TIE) & (mags[..., 2] < 0)
    mags[..., 2] = np.where(tie, -mags[..., 2], mags[..., 2])
    return mags


def canonical_angles(u: np.ndarray) -> np.ndarray:
    """Chamber-normalized canonical angles of one operator or a stack of them.

    Cheaper than :func:`canonical_decompose` (no local factors); accepts
    arrays of shape (..., 4, 4) of unitaries.
    """
    u = np.asarray(u, dtype=complex)
    det = np.linalg.det(u)
    us = u * np.exp(-1j * np.angle(det) / 4)[..., None, None]
    gamma = np.swapaxes(us, -1, -2) @ SIGMA_YY @ us @ SIGMA_YY
    ev = np.linalg.eigvals(gamma)
    return chamber_normalize_batch(_angles_from_spectrum(ev))


# ------------------------------------------------------------ local transforms

def state_local_transform(phi: np.ndarray, psi: np.ndarray,
                          tol: float = TOL_RESIDUAL) -> tuple[np.ndarray, np.ndarray]:
    """Find ``a, b`` in SU(2) with ``(a (x) b) phi = exp(i t) psi``.

    In the magic basis the task becomes rotating ``v`` onto ``w`` by a real
    orthogonal matrix, which is possible once both have the same ``v.T v``.
    The rotation is the orthogonal Procrustes solution mapping the real and
    imaginary parts of ``v`` onto those of ``w``.

    Raises:
        EpsMismatch: if ``|eps(phi)|`` and ``|eps(psi)|`` differ by more than ``tol``.
    """
    phi = np.asarray(phi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    for s in (phi, psi):
        if s.shape != (4,) or abs(np.linalg.norm(s) - 1) > TOL_RESIDUAL:
            raise PreconditionError("states must be normalized 4-vectors")
    e_phi, e_psi = eps(phi), eps(psi)
    if abs(abs(e_phi) - abs(e_psi)) > tol:
        raise EpsMismatch(f"|eps| differ: {abs(e_phi):.12g} vs {abs(e_psi):.12g}")
    v = MAGIC_DAG @ phi
    w = MAGIC_DAG @ psi
    if abs(e_phi) > 1e-14 and abs(e_psi) > 1e-14:
        w = w * np.exp(0.5j * (np.angle(e_phi) - np.angle(e_psi)))
    src = np.column_stack([v.real, v.imag])
    dst = np.column_stack([w.real, w.imag])
    uu, _, vt = np.linalg.svd(dst @ src.T)
    p = uu @ vt
    if np.linalg.det(p) < 0:
        # the last singular direction is outside span(src), so flipping it is free
        uu[:, -1] = -uu[:, -1]
        p = uu @ vt
    a, b = local_factor(MAGIC @ p @ MAGIC_DAG)
    out = kron(a, b) @ phi
    residual = state_phase_dist(out, psi)
    if residual > TOL_RESIDUAL:
        raise NumericalError(f"state_local_transform residual {residual:.3e}")
    return a, b


def _magic_factors(u: np.ndarray, seed: int):
    """``m = E^dag us E = P diag(dvals) Q^T`` with P, Q in SO(4)."""
    us, _ = to_special(u)
    m = MAGIC_DAG @ us @ MAGIC
    q, d2 = sym_unitary_eig(m.T @ m, seed=seed)
    dvals = np.sqrt(np.diag(d2))
    p = (m @ q @ np.diag(1 / dvals)).real
    if np.linalg.det(p) < 0:
        p[:, 0] = -p[:, 0]
        dvals[0] = -dvals[0]
    return p, dvals, q


def align_locals(u: np.ndarray, v: np.ndarray, seed: int = 0):
    """Best-effort ``(a, b, c, d)`` with ``(a (x) b) u (c (x) d) ~ v``, unchecked.

    Both operators are brought to ``P D Q^T`` form in the magic basis; their
    diagonal parts then agree up to a signed permutation and a fourth root of
    unity, which is searched exhaustively (this also covers degenerate
    spectra, where eigenvectors are not unique). Returns the locals and the
    alignment error of the diagonal parts.
    """
    pu, du, qu = _magic_factors(u, seed)
    pv, dv, qv = _magic_factors(v, seed)
    best = (math.inf, None, None)
    for perm in itertools.permutations(range(4)):
        for s in (1, -1, 1j, -1j):
            ratio = dv / (s * du[list(perm)])
            signs = np.where(ratio.real >= 0, 1.0, -1.0)
            err = np.max(np.abs(ratio - signs))
            if err < best[0]:
                best = (err, perm, signs)
    err, perm, signs = best
    # D_v = s * S Pi D_u Pi^T, with Pi D_u Pi^T = D_u[perm] and S = diag(signs)
    pi = np.zeros((4, 4))
    pi[np.arange(4), list(perm)] = 1.0
    if np.linalg.det(pi) < 0:
        pi[0, :] = -pi[0, :]
    left = MAGIC @ pv @ np.diag(signs) @ pi @ pu.T @ MAGIC_DAG
    right = MAGIC @ qu @ pi.T @ qv.T @ MAGIC_DAG
    a, b = local_factor(left)
    c, d = local_factor(right)
    return a, b, c, d, float(err)


def operator_local_transform(u: np.ndarray, v: np.ndarray, seed: int = 0,
                             tol: float = TOL_DECISION):
    """Find ``a, b, c, d`` in SU(2) with ``(a (x) b) u (c (x) d) = exp(i t) v``.

    Raises:
        SpectrumMismatch: if the Makhlin spectra differ by more than ``tol``.
        NumericalError: if the aligned product misses ``v`` by more than 1e-8.
    """
    u = check_unitary(u, shape=4, name="u")
    v = check_unitary(v, shape=4, name="v")
    gap = makhlin_spectrum(u).distance(makhlin_spectrum(v))
    if gap > tol:
        raise SpectrumMismatch(f"Makhlin spectra differ by {gap:.3e}")
    a, b, c, d, err = align_locals(u, v, seed)
    if err > math.sqrt(tol):
        raise SpectrumMismatch(f"no signed permutation aligns the spectra (err {err:.3e})")
    out = kron(a, b) @ u @ kron(c, d)
    residual = phase_dist(out, v)
    if residual > TOL_RESIDUAL:
        raise NumericalError(f"operator_local_transform residual {residual:.3e}")
    return a, b, c, d
