"""Prepare a random two-qubit state from |00> with a single CNOT."""
import numpy as np

from q2synth.circuit import emit, unitary_of
from q2synth.invariants import eps
from q2synth.prep import can_prepare_all, synth_prep
from q2synth.linalg import CNOT, SWAP

rng = np.random.default_rng(7)
phi = rng.normal(size=4) + 1j * rng.normal(size=4)
phi /= np.linalg.norm(phi)
print("target state:", np.round(phi, 4))
print("|eps(phi)| =", abs(eps(phi)))

sol = synth_prep(phi)
print(emit(sol.circuit))
out = unitary_of(sol.circuit)[:, 0]
print("fidelity 1 -", 1 - abs(np.vdot(phi, out)) ** 2)

# which gates can reach every state with one use?
for name, g in (("CNOT", CNOT), ("SWAP", SWAP)):
    r = can_prepare_all(g)
    print(f"{name}: prepares all states = {r.answer} (max |eps| = {r.max_eps:.3f})")
