"""
Complex-number tokens and the matrix / state file formats.

Tokens look like ``a+bi``, ``a-bi``, ``a``, ``bi`` (``j`` is accepted for
``i``). Files hold whitespace-separated tokens; ``#`` starts a comment.
"""
from __future__ import annotations

import math
import re

import numpy as np

from .errors import ParseError

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN = re.compile(
    rf"^(?:(?P<re>{_NUM})(?P<im>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij]"
    rf"|(?P<only_re>{_NUM})|(?P<only_im>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij])$"
)


def parse_complex(token: str, lineno: int = 0) -> complex:
    """Parse one complex token; raises ParseError on malformed input."""
    m = _TOKEN.match(token.strip())
    if m is None:
        raise ParseError(lineno, f"bad complex number {token!r}")

    def coef(s: str) -> float:
        # a bare sign before i means a unit coefficient
        return float(s + "1") if s in ("", "+", "-") else float(s)

    if m.group("only_re") is not None:
        z = complex(float(m.group("only_re")), 0.0)
    elif m.group("re") is not None:
        z = complex(float(m.group("re")), coef(m.group("im")))
    else:
        z = complex(0.0, coef(m.group("only_im")))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ParseError(lineno, f"complex number must be finite, got {token!r}")
    return z


def format_complex(z: complex) -> str:
    """Inverse of :func:`parse_complex` (round-trips exactly)."""
    z = complex(z)
    re_, im = z.real + 0.0, z.imag + 0.0
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{re_:.17g}{sign}{abs(im):.17g}i"


def _token_rows(text: str) -> list[tuple[int, list[complex]]]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if line:
            rows.append((lineno, [parse_complex(t, lineno) for t in line]))
    return rows


def parse_matrix_text(text: str) -> np.ndarray:
    """Four rows of four complex tokens."""
    rows = _token_rows(text)
    if len(rows) != 4:
        last = rows[-1][0] if rows else 1
        raise ParseError(last, f"matrix needs 4 rows, got {len(rows)}")
    for lineno, row in rows:
        if len(row) != 4:
            raise ParseError(lineno, f"matrix row needs 4 entries, got {len(row)}")
    return np.array([row for _, row in rows], dtype=complex)


def parse_state_text(text: str) -> np.ndarray:
    """Four complex amplitudes, on one line or several."""
    rows = _token_rows(text)
    values = [z for _, row in rows for z in row]
    if len(values) != 4:
        last = rows[-1][0] if rows else 1
        raise ParseError(last, f"state needs 4 amplitudes, got {len(values)}")
    return np.array(values, dtype=complex)


def format_matrix(m: np.ndarray) -> str:
    return "\n".join(" ".join(format_complex(z) for z in row) for row in np.asarray(m)) + "\n"


def format_state(s: np.ndarray) -> str:
    return " ".join(format_complex(z) for z in np.asarray(s)) + "\n"
