"""
Two-qubit circuits: gate types, exact simulation, CNOT counting and the
``q2synth-circuit v1`` text format.

Gate lists are in application order: ``gates[0]`` acts first, so it is the
rightmost factor of :func:`unitary_of`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import ParseError, PreconditionError
from .linalg import (
    CNOT,
    CNOT_REV,
    I2,
    I4,
    TOL_CONSTRUCT,
    TOL_RESIDUAL,
    check_unitary,
    kron,
    rot,
    zyz_angles,
)

HEADER = "# q2synth-circuit v1"
WIRES = (0, 1)
AXES = ("x", "y", "z")


def _check_wire(wire) -> None:
    if wire not in WIRES or isinstance(wire, bool):
        raise PreconditionError(f"wire must be 0 or 1, got {wire!r}")


def embed(m: np.ndarray, wire: int) -> np.ndarray:
    """Place a 2x2 matrix on ``wire`` of the two-qubit register."""
    _check_wire(wire)
    return kron(m, I2) if wire == 0 else kron(I2, m)


@dataclass(frozen=True)
class CNOTGate:
    control: int
    target: int

    def __post_init__(self):
        _check_wire(self.control)
        _check_wire(self.target)
        if self.control == self.target:
            raise PreconditionError("CNOT control and target must differ")

    def matrix(self) -> np.ndarray:
        return CNOT if self.control == 0 else CNOT_REV

    def inverse(self) -> "CNOTGate":
        return self


@dataclass(frozen=True)
class Rot:
    """``exp(i sigma_axis angle / 2)`` on one wire."""

    axis: str
    wire: int
    angle: float

    def __post_init__(self):
        if self.axis not in AXES:
            raise PreconditionError(f"rotation axis must be x, y or z, got {self.axis!r}")
        _check_wire(self.wire)
        object.__setattr__(self, "angle", float(self.angle))

    def matrix(self) -> np.ndarray:
        return embed(rot(self.axis, self.angle), self.wire)

    def inverse(self) -> "Rot":
        return Rot(self.axis, self.wire, -self.angle)


@dataclass(frozen=True, eq=False)
class OneQubit:
    """Arbitrary one-qubit gate, stored normalized to SU(2).

    The discarded global phase is kept in ``phase`` so that
    ``exp(i phase) * matrix`` is the matrix passed in.
    """

    wire: int
    matrix2: np.ndarray
    phase: float = 0.0

    def __post_init__(self):
        _check_wire(self.wire)
        m = check_unitary(self.matrix2, shape=2, tol=TOL_RESIDUAL, name="one-qubit gate")
        half = cmath.phase(np.linalg.det(m)) / 2
        m = m * cmath.exp(-1j * half)
        m.setflags(write=False)
        object.__setattr__(self, "matrix2", m)
        object.__setattr__(self, "phase", float(self.phase) + half)

    def matrix(self) -> np.ndarray:
        return embed(self.matrix2, self.wire)

    def inverse(self) -> "OneQubit":
        return OneQubit(self.wire, self.matrix2.conj().T, -self.phase)

    def __eq__(self, other):
        if not isinstance(other, OneQubit):
            return NotImplemented
        return self.wire == other.wire and np.allclose(
            self.matrix2, other.matrix2, atol=TOL_CONSTRUCT
        )

    def __hash__(self):
        return hash((self.wire, "OneQubit"))


Gate = Union[CNOTGate, Rot, OneQubit]


@dataclass(frozen=True)
class Circuit:
    gates: tuple = ()
    metadata: str = ""

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            if not isinstance(g, (CNOTGate, Rot, OneQubit)):
                raise PreconditionError(f"not a gate: {g!r}")
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        return concat(self, other)

    @property
    def cnot_count(self) -> int:
        return cnot_count(self)

    @property
    def one_qubit_count(self) -> int:
        """Number of non-CNOT gates."""
        return sum(1 for g in self.gates if not isinstance(g, CNOTGate))

    def inverse(self) -> "Circuit":
        """The circuit of ``unitary_of(self)^dagger``."""
        return Circuit(tuple(g.inverse() for g in reversed(self.gates)),
                       metadata=self.metadata)

    def unitary(self) -> np.ndarray:
        return unitary_of(self)


def concat(*circuits: Circuit) -> Circuit:
    """Run ``circuits[0]`` first, then the rest in order."""
    gates: list = []
    for c in circuits:
        gates.extend(c.gates)
    return Circuit(tuple(gates), metadata=circuits[0].metadata if circuits else "")


def cnot_count(c: Circuit) -> int:
    return sum(1 for g in c.gates if isinstance(g, CNOTGate))


def unitary_of(c: Circuit) -> np.ndarray:
    """Operator of a circuit (global phases of OneQubit gates dropped)."""
    u = I4.copy()
    for g in c.gates:
        u = g.matrix() @ u
    return u


def apply(c: Circuit, state: np.ndarray) -> np.ndarray:
    """Simulate ``c`` on a two-qubit state vector, gate by gate."""
    s = np.asarray(state, dtype=complex)
    if s.shape != (4,):
        raise PreconditionError("state must have 4 amplitudes")
    if abs(np.linalg.norm(s) - 1) > TOL_RESIDUAL:
        raise PreconditionError("state is not normalized")
    for g in c.gates:
        s = g.matrix() @ s
    return s


def local_layer(a: np.ndarray, b: np.ndarray) -> list:
    """Gates for ``a (x) b`` as two OneQubit gates (wire 0 first)."""
    return [OneQubit(0, a), OneQubit(1, b)]


# ---------------------------------------------------------------- text format

_AXIS_TOKEN = {"RX": "x", "RY": "y", "RZ": "z"}


def _fmt_angle(x: float) -> str:
    return format(float(x), ".17g")


def emit(c: Circuit) -> str:
    """Serialize to ``q2synth-circuit v1`` text.

    OneQubit gates are written as three rotations (Z, Y, Z Euler angles, in
    application order), so the emitted circuit uses only CNOT and RX/RY/RZ.
    """
    lines = [HEADER]
    if c.metadata:
        for part in c.metadata.splitlines():
            lines.append(f"# {part}")
    for g in c.gates:
        if isinstance(g, CNOTGate):
            lines.append(f"CNOT {g.control} {g.target}")
        elif isinstance(g, Rot):
            lines.append(f"R{g.axis.upper()} {g.wire} {_fmt_angle(g.angle)}")
        else:
            alpha, beta, gamma = zyz_angles(g.matrix2)
            # rot('z', alpha) rot('y', beta) rot('z', gamma): gamma acts first
            lines.append(f"RZ {g.wire} {_fmt_angle(gamma)}")
            lines.append(f"RY {g.wire} {_fmt_angle(beta)}")
            lines.append(f"RZ {g.wire} {_fmt_angle(alpha)}")
    return "\n".join(lines) + "\n"


def _parse_wire(tok: str, lineno: int) -> int:
    if tok not in ("0", "1"):
        raise ParseError(lineno, f"wire must be 0 or 1, got {tok!r}")
    return int(tok)


def _parse_angle(tok: str, lineno: int) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(lineno, f"bad angle {tok!r}") from None
    if not math.isfinite(x):
        raise ParseError(lineno, f"angle must be finite, got {tok!r}")
    return x


def parse_gate_line(tokens: list[str], lineno: int) -> Gate:
    """Parse the tokens of one CNOT/RX/RY/RZ line."""
    op = tokens[0].upper()
    if op == "CNOT":
        if len(tokens) != 3:
            raise ParseError(lineno, "CNOT takes <control> <target>")
        ctrl, tgt = _parse_wire(tokens[1], lineno), _parse_wire(tokens[2], lineno)
        if ctrl == tgt:
            raise ParseError(lineno, "CNOT control and target must differ")
        return CNOTGate(ctrl, tgt)
    if op in _AXIS_TOKEN:
        if len(tokens) != 3:
            raise ParseError(lineno, f"{op} takes <wire> <angle>")
        return Rot(_AXIS_TOKEN[op], _parse_wire(tokens[1], lineno),
                   _parse_angle(tokens[2], lineno))
    raise ParseError(lineno, f"unknown gate {tokens[0]!r}")


def iter_lines(text: str) -> Iterable[tuple[int, list[str]]]:
    """Yield ``(lineno, tokens)`` for non-blank lines with comments removed."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse(text: str) -> Circuit:
    """Parse ``q2synth-circuit v1`` text. Raises ParseError with a line number."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise ParseError(1, f"missing header {HEADER!r}")
    gates = [parse_gate_line(tokens, lineno) for lineno, tokens in iter_lines(text)]
    return Circuit(tuple(gates))
