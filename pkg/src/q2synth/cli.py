"""
``q2synth`` command-line front end.

Every report is free text followed by one ``RESULT:`` line. Exit codes:
0 success, 1 verification failure or negative answer, 2 malformed input.
Synthesis commands print the circuit, parse that text back and re-simulate
the parsed circuit before reporting success.
"""
from __future__ import annotations

import argparse
import sys
from typing import Callable, Optional

import numpy as np

from . import __version__
from .circuit import apply, emit, parse, unitary_of
from .errors import (
    EpsMismatch,
    NotAProduct,
    NumericalError,
    ParseError,
    PreconditionError,
    RootSearchFailed,
    SpectrumMismatch,
)
from .invariants import (
    canonical_angles,
    eps,
    makhlin_spectrum,
    operator_local_transform,
    state_local_transform,
)
from .linalg import TOL_RESIDUAL, check_unitary, kron, phase_dist, state_phase_dist
from .mdc import (
    KINDS,
    SubspaceDecomposition,
    bell_span_certificate,
    check_mdc_equiv,
    synth_2cnot_mdc,
    synth_3cnot,
)
from .prep import ZERO_STATE, can_prepare_all, synth_prep, synth_row
from .textio import format_complex, parse_matrix_text, parse_state_text
from .universality import (
    FIXTURES,
    cnot_lower_bound,
    diag_group,
    footnote_experiment,
    load_fixture,
    parse_template,
    template_rank,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Malformed or unreadable input (exit code 2)."""


class Report:
    def __init__(self, out):
        self.out = out

    def line(self, text: str = "") -> None:
        self.out.write(text + "\n")

    def block(self, text: str) -> None:
        self.out.write(text if text.endswith("\n") else text + "\n")

    def result(self, text: str) -> None:
        self.out.write(f"RESULT: {text}\n")


def _g(x: float) -> str:
    return format(float(x), ".6e")


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_matrix(path: str) -> np.ndarray:
    m = parse_matrix_text(_read(path))
    return check_unitary(m, shape=4, tol=TOL_RESIDUAL, name=path)


def load_state(path: str, renorm: bool = False) -> np.ndarray:
    s = parse_state_text(_read(path))
    norm = np.linalg.norm(s)
    if abs(norm - 1) > TOL_RESIDUAL:
        if not renorm or norm == 0:
            raise PreconditionError(f"{path}: state norm {norm:.12g} (use --renorm)")
        s = s / norm
    return s


def _decomposition(args, default: str = "1+1+1+1") -> SubspaceDecomposition:
    if getattr(args, "blocks", None):
        return SubspaceDecomposition.parse(args.blocks)
    return SubspaceDecomposition.from_kind(getattr(args, "decomp", None) or default)


def _matrix_lines(rep: Report, name: str, m: np.ndarray) -> None:
    rep.line(f"{name} =")
    for row in m:
        rep.line("  " + " ".join(format_complex(z) for z in row))


# ------------------------------------------------------------------ commands

def cmd_eps(args, rep: Report) -> int:
    e = eps(load_state(args.state, args.renorm))
    rep.line(f"eps = {format_complex(e)}")
    rep.result(f"eps={format_complex(e)} abs={_g(abs(e))}")
    return EXIT_OK


def cmd_invariants(args, rep: Report) -> int:
    u = load_matrix(args.u)
    spec = makhlin_spectrum(u)
    rep.line("Makhlin spectrum (sorted by phase):")
    for z in spec.eigenvalues:
        rep.line(f"  {format_complex(z)}")
    th = canonical_angles(u)
    rep.line("canonical angles (theta_x, theta_y, theta_z):")
    rep.line("  " + " ".join(format(float(t), ".17g") for t in th))
    rep.result(f"theta_x={_g(th[0])} theta_y={_g(th[1])} theta_z={_g(th[2])}")
    return EXIT_OK


def _reparse(circuit) -> tuple[str, object]:
    text = emit(circuit)
    return text, parse(text)


def cmd_prep(args, rep: Report) -> int:
    phi = load_state(args.state, args.renorm)
    sol = synth_prep(phi)
    text, parsed = _reparse(sol.circuit)
    rep.block(text)
    fid = abs(np.vdot(phi, apply(parsed, ZERO_STATE)))
    residual = state_phase_dist(apply(parsed, ZERO_STATE), phi)
    ok = residual <= args.tol
    rep.result(f"fidelity=1-{_g(max(0.0, 1 - fid))} residual={_g(residual)} "
               f"cnots={parsed.cnot_count} status={'ok' if ok else 'failed'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_prep_row(args, rep: Report) -> int:
    u = load_matrix(args.u)
    text, parsed = _reparse(synth_row(u))
    rep.block(text)
    residual = state_phase_dist(unitary_of(parsed)[0], u[0])
    ok = residual <= args.tol
    rep.result(f"row_residual={_g(residual)} cnots={parsed.cnot_count} "
               f"status={'ok' if ok else 'failed'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_canprep(args, rep: Report) -> int:
    g = load_matrix(args.gate)
    res = can_prepare_all(g, seed=args.seed)
    rep.line(f"max |eps| over product inputs = {res.max_eps:.17g} ({res.restarts} restarts)")
    if res.answer:
        a, b = res.witness
        _matrix_lines(rep, "a", a)
        _matrix_lines(rep, "b", b)
        out = g @ kron(a, b) @ ZERO_STATE
        rep.line(f"|eps(G (a (x) b)|00>)| = {abs(eps(out)):.17g}")
    rep.result(f"answer={'true' if res.answer else 'false'} max_eps={_g(res.max_eps)}")
    return EXIT_OK if res.answer else EXIT_FAIL


def cmd_synth3(args, rep: Report) -> int:
    u = load_matrix(args.u)
    circuit, info = synth_3cnot(u, seed=args.seed, return_info=True)
    text, parsed = _reparse(circuit)
    rep.block(text)
    residual = phase_dist(unitary_of(parsed), u)
    ok = residual <= args.tol
    rep.result(f"phase_dist={_g(residual)} cnots={parsed.cnot_count} "
               f"fallback={'true' if info.fallback else 'false'} "
               f"status={'ok' if ok else 'failed'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_synth2_mdc(args, rep: Report) -> int:
    u = load_matrix(args.u)
    d = _decomposition(args)
    sol = synth_2cnot_mdc(u)
    text, parsed = _reparse(sol.circuit)
    rep.block(text)
    w = unitary_of(parsed)
    rep.line(f"gamma = {sol.gamma!r}")
    rep.line("delta = diag(" + ", ".join(format_complex(z) for z in np.diag(sol.delta)) + ")")
    residual = phase_dist(w, sol.delta @ u)
    equiv = check_mdc_equiv(u, w, d, tol=args.tol)
    ok = residual <= args.tol and equiv
    rep.result(f"residual={_g(residual)} cnots={parsed.cnot_count} blocks={d} "
               f"equivalent={'true' if equiv else 'false'} "
               f"bell_span={'true' if bell_span_certificate(sol) else 'false'} "
               f"status={'ok' if ok else 'failed'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_equiv(args, rep: Report) -> int:
    u, w = load_matrix(args.u), load_matrix(args.w)
    d = _decomposition(args)
    rep.line(f"blocks = {d} ({d.kind})")
    ok = check_mdc_equiv(u, w, d, tol=args.tol)
    rep.result("equivalent" if ok else "not-equivalent")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_rank(args, rep: Report) -> int:
    if args.fixture:
        t = load_fixture(args.fixture)
    elif args.template:
        t = parse_template(_read(args.template))
    else:
        raise InputError("rank needs --template FILE or --fixture NAME")
    group = None
    if args.decomp or args.blocks:
        group = diag_group(_decomposition(args))
    r = template_rank(t, group, trials=args.trials, seed=args.seed)
    rep.line(f"parameters = {r.param_count}, group dim = {r.group_dim}, trials = {r.trials}")
    rep.line("relative singular values: " + " ".join(format(x, ".3e") for x in r.singular_values))
    rep.result(f"rank={r.rank} universality={r.verdict.replace(' ', '-')}")
    return EXIT_OK


def cmd_footnote2(args, rep: Report) -> int:
    r = footnote_experiment(seed=args.seed, trials=args.trials)
    rep.line(f"parameters = {r.param_count}, group dim = {r.group_dim}, trials = {r.trials}")
    rep.line("relative singular values: " + " ".join(format(x, ".3e") for x in r.singular_values))
    rep.line("rank 15 means universality is not excluded; it is not a proof")
    rep.result(f"rank={r.rank} seed={args.seed}")
    return EXIT_OK


def cmd_bounds(args, rep: Report) -> int:
    rep.result(str(cnot_lower_bound(args.n, args.kind)))
    return EXIT_OK


def cmd_localequiv(args, rep: Report) -> int:
    u, v = load_matrix(args.u), load_matrix(args.v)
    try:
        a, b, c, d = operator_local_transform(u, v, seed=args.seed)
    except SpectrumMismatch as exc:
        rep.line(str(exc))
        rep.result("not-equivalent")
        return EXIT_FAIL
    for name, m in zip("abcd", (a, b, c, d)):
        _matrix_lines(rep, name, m)
    residual = phase_dist(kron(a, b) @ u @ kron(c, d), v)
    ok = residual <= args.tol
    rep.result(f"{'equivalent' if ok else 'failed'} residual={_g(residual)}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_state_localequiv(args, rep: Report) -> int:
    phi, psi = load_state(args.phi, args.renorm), load_state(args.psi, args.renorm)
    try:
        a, b = state_local_transform(phi, psi, tol=args.tol)
    except EpsMismatch as exc:
        rep.line(str(exc))
        rep.result("not-equivalent")
        return EXIT_FAIL
    _matrix_lines(rep, "a", a)
    _matrix_lines(rep, "b", b)
    residual = state_phase_dist(kron(a, b) @ phi, psi)
    ok = residual <= args.tol
    rep.result(f"{'equivalent' if ok else 'failed'} residual={_g(residual)}")
    return EXIT_OK if ok else EXIT_FAIL


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="verification tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
    common.add_argument("--renorm", action="store_true", help="renormalize input states")
    common.add_argument("--decomp", choices=KINDS, help="computational-basis decomposition kind")
    common.add_argument("--blocks", help="explicit blocks, e.g. 0,1|2,3 (overrides --decomp)")

    p = argparse.ArgumentParser(prog="q2synth", description="Two-qubit circuit synthesis toolkit")
    p.add_argument("--version", action="version", version=f"q2synth {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help_: str, **files):
        sp = sub.add_parser(name, parents=[common], help=help_)
        for flag, metavar in files.items():
            sp.add_argument(f"--{flag}", required=True, metavar=metavar)
        sp.set_defaults(func=func)
        return sp

    add("eps", cmd_eps, "entanglement functional of a state", state="FILE")
    add("invariants", cmd_invariants, "Makhlin spectrum and canonical angles", u="FILE")
    add("prep", cmd_prep, "one-CNOT preparation of a state from |00>", state="FILE")
    add("prep-row", cmd_prep_row, "circuit matching the first row of an operator", u="FILE")
    add("canprep", cmd_canprep, "can one use of a gate prepare every state?", gate="FILE")
    add("synth3", cmd_synth3, "exact three-CNOT synthesis", u="FILE")
    add("synth2-mdc", cmd_synth2_mdc, "two-CNOT synthesis up to measurement", u="FILE")
    add("check-equiv", cmd_check_equiv, "equivalence up to measurement", u="FILE", w="FILE")
    sp = add("rank", cmd_rank, "Jacobian rank of a circuit template")
    sp.add_argument("--template", metavar="FILE")
    sp.add_argument("--fixture", choices=FIXTURES)
    sp.add_argument("--trials", type=int, default=4)
    sp = add("footnote2", cmd_footnote2, "rank experiment for the across-qubits 2+2 case")
    sp.add_argument("--trials", type=int, default=4)
    sp = add("bounds", cmd_bounds, "parameter-counting CNOT lower bounds")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kind", choices=("prep", "full", "diag_dc"), required=True)
    add("localequiv", cmd_localequiv, "one-qubit gates relating two operators", u="FILE", v="FILE")
    add("state-localequiv", cmd_state_localequiv, "one-qubit gates relating two states",
        phi="FILE", psi="FILE")
    return p


def dispatch(argv: Optional[list] = None, out=None) -> int:
    """Run one command; returns the exit code."""
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    rep = Report(out)
    try:
        return args.func(args, rep)
    except (InputError, ParseError, PreconditionError) as exc:
        print(f"q2synth: {exc}", file=sys.stderr)
        rep.result("error=malformed-input")
        return EXIT_INPUT
    except (NotAProduct, SpectrumMismatch, EpsMismatch, NumericalError, RootSearchFailed) as exc:
        print(f"q2synth: {exc}", file=sys.stderr)
        rep.result(f"error={type(exc).__name__}")
        return EXIT_FAIL


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
