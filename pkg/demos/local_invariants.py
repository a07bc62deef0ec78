"""Local invariants decide when two operators differ only by one-qubit gates."""
import numpy as np
from scipy.stats import unitary_group

from q2synth.invariants import canonical_decompose, makhlin_spectrum, operator_local_transform
from q2synth.linalg import CNOT, kron, phase_dist

rng = np.random.default_rng(3)
u = unitary_group.rvs(4, random_state=rng)
locals_ = [unitary_group.rvs(2, random_state=rng) for _ in range(4)]
v = kron(locals_[0], locals_[1]) @ u @ kron(locals_[2], locals_[3])

print("spectrum u:", np.round(makhlin_spectrum(u).eigenvalues, 4))
print("spectrum v:", np.round(makhlin_spectrum(v).eigenvalues, 4))
print("distance up to overall sign:", makhlin_spectrum(u).distance(makhlin_spectrum(v)))
print("canonical angles:", np.round(canonical_decompose(u).theta, 4))
print("CNOT angles:", np.round(canonical_decompose(CNOT).theta, 4))

a, b, c, d = operator_local_transform(u, v)
print("recovered locals, distance:", phase_dist(kron(a, b) @ u @ kron(c, d), v))
