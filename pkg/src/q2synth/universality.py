"""
Dimension counting for generic two-qubit circuit templates.

A template is a gate list with placeholders: free rotations (one parameter),
free one-qubit gates (three parameters, Z-Y-Z Euler angles), free controlled
rotations and controlled one-qubit gates, plus fixed gates. The set of
operators it reaches can only be all of U(4) modulo phase if the differential
of the parameter map has rank 15 somewhere. With a don't-care group the
tangent space is augmented by the group's generators first.

A rank below 15 proves that universality is impossible; rank 15 only says it
is not excluded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional, Union

import numpy as np

from .circuit import (
    CNOTGate,
    Circuit,
    OneQubit,
    Rot,
    embed,
    iter_lines,
    parse_gate_line,
    _fmt_angle,
)
from .errors import ParseError, PreconditionError
from .linalg import (
    HADAMARD,
    I2,
    I4,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    check_unitary,
    rot,
)
from .mdc import ACROSS_QUBITS, SubspaceDecomposition
from .textio import format_complex, parse_complex

TEMPLATE_HEADER = "# q2synth-template v1"
FD_STEP = 1e-5
RANK_CUTOFF = 1e-6
FULL_DIM = 15


# ------------------------------------------------------------------ elements

@dataclass(frozen=True)
class VarRot:
    """Free rotation ``R_axis(t)`` on ``wire``."""

    axis: str
    wire: int
    nparams = 1

    def matrix(self, p) -> np.ndarray:
        return embed(rot(self.axis, p[0]), self.wire)


@dataclass(frozen=True)
class VarSU2:
    """Free one-qubit gate ``Rz(p0) Ry(p1) Rz(p2)`` on ``wire``."""

    wire: int
    nparams = 3

    def matrix(self, p) -> np.ndarray:
        return embed(_zyz(p), self.wire)


@dataclass(frozen=True)
class VarCRot:
    """Free controlled rotation: ``R_axis(t)`` on ``target`` when ``control`` is 1."""

    axis: str
    control: int
    target: int
    nparams = 1

    def matrix(self, p) -> np.ndarray:
        return controlled(rot(self.axis, p[0]), self.control, self.target)


@dataclass(frozen=True)
class VarCSU2:
    """Free controlled one-qubit gate (``Rz Ry Rz`` on ``target``)."""

    control: int
    target: int
    nparams = 3

    def matrix(self, p) -> np.ndarray:
        return controlled(_zyz(p), self.control, self.target)


@dataclass(frozen=True, eq=False)
class FixedTwoQubit:
    """A fixed 4x4 unitary."""

    u: np.ndarray
    nparams = 0

    def __post_init__(self):
        u = check_unitary(self.u, shape=4, name="GATE2 matrix")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def matrix(self, p=()) -> np.ndarray:
        return self.u


@dataclass(frozen=True)
class Fixed:
    """A fixed circuit gate (CNOT or a fixed rotation)."""

    gate: Union[CNOTGate, Rot, OneQubit]
    nparams = 0

    def matrix(self, p=()) -> np.ndarray:
        return self.gate.matrix()


Element = Union[VarRot, VarSU2, VarCRot, VarCSU2, FixedTwoQubit, Fixed]


def _zyz(p) -> np.ndarray:
    # p[0] acts first
    return rot("z", p[2]) @ rot("y", p[1]) @ rot("z", p[0])


def controlled(g: np.ndarray, control: int, target: int) -> np.ndarray:
    """``|0><0| (x) I + |1><1| (x) g`` with the projectors on ``control``."""
    if {control, target} != {0, 1}:
        raise PreconditionError("controlled gate needs distinct wires 0 and 1")
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    if control == 0:
        return np.kron(p0, I2) + np.kron(p1, g)
    return np.kron(I2, p0) + np.kron(g, p1)


@dataclass(frozen=True)
class Template:
    elements: tuple = ()
    metadata: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def param_count(self) -> int:
        return sum(e.nparams for e in self.elements)

    def __add__(self, other: "Template") -> "Template":
        return Template(self.elements + other.elements, self.metadata)


def template_unitary(t: Template, params) -> np.ndarray:
    """Operator of the template at ``params`` (elements applied in order)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (t.param_count,):
        raise PreconditionError(f"template takes {t.param_count} parameters, got {params.shape}")
    u = I4.copy()
    k = 0
    for e in t.elements:
        u = e.matrix(params[k:k + e.nparams]) @ u
        k += e.nparams
    return u


def _controlled_rot_gates(axis: str, angle: float, control: int, target: int) -> list:
    """Controlled ``R_axis(angle)`` from two CNOTs and half-angle rotations."""
    cx = CNOTGate(control, target)
    if axis == "x":
        # H Rz H = Rx
        h = OneQubit(target, HADAMARD)
        return [h] + _controlled_rot_gates("z", angle, control, target) + [h]
    # X Rz X = Rz(-), X Ry X = Ry(-)
    return [Rot(axis, target, angle / 2), cx, Rot(axis, target, -angle / 2), cx]


@lru_cache(maxsize=64)
def _fixed_circuit(key: bytes) -> tuple:
    from .mdc import synth_3cnot

    u = np.frombuffer(key, dtype=complex).reshape(4, 4)
    return synth_3cnot(u).gates


def instantiate(t: Template, params) -> Circuit:
    """Circuit (CNOT + one-qubit gates) for the template at ``params``.

    Fixed 4x4 gates are compiled with :func:`q2synth.mdc.synth_3cnot`, so the
    result agrees with :func:`template_unitary` up to global phase.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (t.param_count,):
        raise PreconditionError(f"template takes {t.param_count} parameters, got {params.shape}")
    gates: list = []
    k = 0
    for e in t.elements:
        p = params[k:k + e.nparams]
        k += e.nparams
        if isinstance(e, Fixed):
            gates.append(e.gate)
        elif isinstance(e, VarRot):
            gates.append(Rot(e.axis, e.wire, p[0]))
        elif isinstance(e, VarSU2):
            gates += [Rot("z", e.wire, p[0]), Rot("y", e.wire, p[1]), Rot("z", e.wire, p[2])]
        elif isinstance(e, VarCRot):
            gates += _controlled_rot_gates(e.axis, p[0], e.control, e.target)
        elif isinstance(e, VarCSU2):
            for axis, angle in zip("zyz", p):
                gates += _controlled_rot_gates(axis, angle, e.control, e.target)
        else:
            gates += list(_fixed_circuit(np.ascontiguousarray(e.u).tobytes()))
    return Circuit(tuple(gates), metadata=t.metadata)


# ---------------------------------------------------------------- text format

_VAR_AXES = {"RX": "x", "RY": "y", "RZ": "z"}
_VAR_CAXES = {"CRX": "x", "CRY": "y", "CRZ": "z"}


def _wire(tok: str, lineno: int) -> int:
    if tok not in ("0", "1"):
        raise ParseError(lineno, f"wire must be 0 or 1, got {tok!r}")
    return int(tok)


def _pair(tokens: list[str], lineno: int) -> tuple[int, int]:
    c, t = _wire(tokens[0], lineno), _wire(tokens[1], lineno)
    if c == t:
        raise ParseError(lineno, "control and target must differ")
    return c, t


def _parse_element(tokens: list[str], lineno: int) -> Element:
    op = tokens[0].upper()
    if op == "VAR":
        if len(tokens) < 2:
            raise ParseError(lineno, "VAR needs a gate name")
        kind = tokens[1].upper()
        if kind in _VAR_AXES:
            if len(tokens) != 3:
                raise ParseError(lineno, f"VAR {kind} takes <wire>")
            return VarRot(_VAR_AXES[kind], _wire(tokens[2], lineno))
        if kind in _VAR_CAXES:
            if len(tokens) != 4:
                raise ParseError(lineno, f"VAR {kind} takes <control> <target>")
            return VarCRot(_VAR_CAXES[kind], *_pair(tokens[2:], lineno))
        raise ParseError(lineno, f"unknown VAR gate {tokens[1]!r}")
    if op == "VARSU2":
        if len(tokens) != 2:
            raise ParseError(lineno, "VARSU2 takes <wire>")
        return VarSU2(_wire(tokens[1], lineno))
    if op == "VARCSU2":
        if len(tokens) != 3:
            raise ParseError(lineno, "VARCSU2 takes <control> <target>")
        return VarCSU2(*_pair(tokens[1:], lineno))
    if op == "GATE2":
        if len(tokens) != 17:
            raise ParseError(lineno, f"GATE2 takes 16 complex entries, got {len(tokens) - 1}")
        m = np.array([parse_complex(x, lineno) for x in tokens[1:]]).reshape(4, 4)
        try:
            return FixedTwoQubit(m)
        except PreconditionError as exc:
            raise ParseError(lineno, str(exc)) from None
    return Fixed(parse_gate_line(tokens, lineno))


def parse_template(text: str) -> Template:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TEMPLATE_HEADER:
        raise ParseError(1, f"missing header {TEMPLATE_HEADER!r}")
    meta = [ln.strip()[1:].strip() for ln in lines[1:] if ln.strip().startswith("#")]
    elements = [_parse_element(tokens, lineno) for lineno, tokens in iter_lines(text)]
    return Template(tuple(elements), metadata="\n".join(meta))


def emit_template(t: Template) -> str:
    out = [TEMPLATE_HEADER]
    out += [f"# {line}" for line in t.metadata.splitlines()] if t.metadata else []
    for e in t.elements:
        if isinstance(e, VarRot):
            out.append(f"VAR R{e.axis.upper()} {e.wire}")
        elif isinstance(e, VarSU2):
            out.append(f"VARSU2 {e.wire}")
        elif isinstance(e, VarCRot):
            out.append(f"VAR CR{e.axis.upper()} {e.control} {e.target}")
        elif isinstance(e, VarCSU2):
            out.append(f"VARCSU2 {e.control} {e.target}")
        elif isinstance(e, FixedTwoQubit):
            out.append("GATE2 " + " ".join(format_complex(z) for z in e.u.ravel()))
        elif isinstance(e.gate, CNOTGate):
            out.append(f"CNOT {e.gate.control} {e.gate.target}")
        elif isinstance(e.gate, Rot):
            out.append(f"R{e.gate.axis.upper()} {e.gate.wire} {_fmt_angle(e.gate.angle)}")
        else:
            out.append("GATE2 " + " ".join(format_complex(z) for z in e.gate.matrix().ravel()))
    return "\n".join(out) + "\n"


FIXTURES = ("fig1", "prop7", "prop8", "prop9", "prop10", "footnote2")


def load_fixture(name: str) -> Template:
    """One of the bundled proof-circuit templates (see ``FIXTURES``)."""
    if name not in FIXTURES:
        raise PreconditionError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("q2synth.fixtures").joinpath(f"{name}.tpl").read_text()
    return parse_template(text)


# ------------------------------------------------------------ don't-care groups

@dataclass(frozen=True)
class DontCareGroup:
    generators: tuple
    name: str = ""

    @property
    def dim(self) -> int:
        return len(self.generators)


def diag_group(d: SubspaceDecomposition) -> DontCareGroup:
    """Anti-Hermitian basis of the block-unitary operators preserving ``d``.

    For blocks of sizes ``d_i`` this has ``sum d_i^2`` generators.
    """
    gens = []
    for block in d.blocks:
        for j in block:
            g = np.zeros((4, 4), dtype=complex)
            g[j, j] = 1j
            gens.append(g)
        for x, j in enumerate(block):
            for k in block[x + 1:]:
                g = np.zeros((4, 4), dtype=complex)
                g[j, k], g[k, j] = 1.0, -1.0
                gens.append(g)
                g = np.zeros((4, 4), dtype=complex)
                g[j, k], g[k, j] = 1j, 1j
                gens.append(g)
    return DontCareGroup(tuple(gens), name=str(d))


# ------------------------------------------------------------------- rank

_PAULI_BASIS = [np.kron(a, b) for a in (I2, PAULI_X, PAULI_Y, PAULI_Z)
                for b in (I2, PAULI_X, PAULI_Y, PAULI_Z)]


def _realify(t: np.ndarray) -> np.ndarray:
    """Traceless part of an anti-Hermitian ``t`` as 16 real Pauli coefficients."""
    t = t - np.trace(t) / 4 * I4
    h = 1j * t  # Hermitian
    return np.array([np.trace(p @ h).real / 4 for p in _PAULI_BASIS])


def tangent_vectors(t: Template, params) -> np.ndarray:
    """Rows ``realify(dU/dp_k U^dag)`` by central differences."""
    params = np.asarray(params, dtype=float)
    u = template_unitary(t, params)
    rows = []
    for k in range(t.param_count):
        e = np.zeros_like(params)
        e[k] = FD_STEP
        du = (template_unitary(t, params + e) - template_unitary(t, params - e)) / (2 * FD_STEP)
        rows.append(_realify(du @ u.conj().T))
    return np.array(rows).reshape(-1, 16)


@dataclass(frozen=True)
class RankReport:
    rank: int
    singular_values: tuple  # relative to the largest, at the best trial
    universal_possible: bool
    param_count: int = 0
    group_dim: int = 0
    trials: int = 0

    @property
    def verdict(self) -> str:
        return "not excluded" if self.universal_possible else "impossible"


def template_rank(t: Template, g: Optional[DontCareGroup] = None, trials: int = 4,
                  seed: int = 0) -> RankReport:
    """Largest numerical rank of the template's differential (plus group) over trials."""
    if trials < 1:
        raise PreconditionError("trials must be positive")
    rng = np.random.default_rng(seed)
    gens = g.generators if g is not None else ()
    group_rows = np.array([_realify(x) for x in gens]).reshape(-1, 16)
    best_rank, best_sv = -1, ()
    for _ in range(trials):
        params = rng.uniform(0, 2 * math.pi, size=t.param_count)
        m = np.vstack([tangent_vectors(t, params), group_rows])
        sv = np.linalg.svd(m, compute_uv=False) if m.size else np.zeros(0)
        if sv.size == 0 or sv[0] == 0:
            rank, rel = 0, np.zeros(sv.size)
        else:
            rel = sv / sv[0]
            rank = int(np.sum(rel > RANK_CUTOFF))
        if rank > best_rank:
            best_rank, best_sv = rank, tuple(float(x) for x in rel)
    return RankReport(best_rank, best_sv, best_rank == FULL_DIM, t.param_count,
                      g.dim if g is not None else 0, trials)


# ----------------------------------------------------------------- formulas

def cnot_lower_bound(n: int, kind: str) -> int:
    """Parameter-counting CNOT lower bounds for n qubits.

    ``prep``: ceil((2^n - 3n - 1)/4); ``full``: ceil((4^n - 3n - 1)/4);
    ``diag_dc`` (up to a diagonal don't-care): ceil((4^n - 2^n - 3n)/4).
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise PreconditionError("n must be a positive integer")
    if kind == "prep":
        num = 2 ** n - 3 * n - 1
    elif kind == "full":
        num = 4 ** n - 3 * n - 1
    elif kind == "diag_dc":
        num = 4 ** n - 2 ** n - 3 * n
    else:
        raise PreconditionError(f"kind must be prep, full or diag_dc, got {kind!r}")
    return max(0, -(-num // 4))


def across_qubits_group() -> DontCareGroup:
    return diag_group(SubspaceDecomposition(ACROSS_QUBITS))


def footnote_experiment(seed: int = 0, trials: int = 4) -> RankReport:
    """Rank of the open 2-CNOT-orientation template modulo the across-qubits 2+2 group.

    The outcome is recorded, not interpreted: rank 15 would leave universality
    open, anything lower would rule it out.
    """
    return template_rank(load_fixture("footnote2"), across_qubits_group(), trials, seed)
