"""SWAP needs three CNOTs exactly, but two suffice if the output is measured."""
import numpy as np

from q2synth.circuit import emit, unitary_of
from q2synth.linalg import SWAP, phase_dist
from q2synth.mdc import SubspaceDecomposition, check_mdc_equiv, synth_2cnot_mdc, synth_3cnot

exact = synth_3cnot(SWAP)
print(f"exact: {exact.cnot_count} CNOTs, distance {phase_dist(unitary_of(exact), SWAP):.1e}")

sol = synth_2cnot_mdc(SWAP)
w = unitary_of(sol.circuit)
print(emit(sol.circuit))
print(f"two-CNOT circuit: gamma = {sol.gamma:.4f}, residual {sol.residual:.1e}")
print(f"as an operator it differs from SWAP by {phase_dist(w, SWAP):.3f}")
for kind in ("1+1+1+1", "2+2", "3+1"):
    d = SubspaceDecomposition.from_kind(kind)
    print(f"  equivalent under {kind} measurement: {check_mdc_equiv(SWAP, w, d)}")
