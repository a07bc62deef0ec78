"""Exception hierarchy for q2synth."""


class Q2SynthError(Exception):
    """Base class for all q2synth errors."""


class PreconditionError(Q2SynthError, ValueError):
    """An input violates an operation's precondition (non-unitary, bad shape, ...)."""


class NumericalError(Q2SynthError, ArithmeticError):
    """A numerical routine failed to reach its residual target."""


class NotAProduct(Q2SynthError):
    """A 4x4 operator is not (close to) a Kronecker product of 2x2 factors."""


class EpsMismatch(Q2SynthError):
    """Two states have different |eps| and cannot be related by local unitaries."""


class SpectrumMismatch(Q2SynthError):
    """Two operators have different Makhlin spectra and are not locally equivalent."""


class RootSearchFailed(Q2SynthError):
    """The gamma search for a 2-CNOT measurement-equivalent operator found no root."""


class ParseError(Q2SynthError, ValueError):
    """Malformed circuit, template, matrix or state text."""

    def __init__(self, lineno: int, reason: str):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")
