"""Jacobian rank of circuit templates: can a template possibly be universal?"""
from q2synth.mdc import SubspaceDecomposition
from q2synth.universality import (
    FIXTURES, cnot_lower_bound, diag_group, footnote_experiment, load_fixture, template_rank,
)

diag = diag_group(SubspaceDecomposition.from_kind("1+1+1+1"))
for name in FIXTURES:
    if name == "footnote2":
        continue
    t = load_fixture(name)
    plain, with_diag = template_rank(t), template_rank(t, diag)
    print(f"{name:7s} params={t.param_count:2d} rank={plain.rank:2d} "
          f"rank+diag={with_diag.rank:2d} ({with_diag.verdict})")

r = footnote_experiment()
print(f"across-qubits experiment: rank {r.rank} of 15 -> {r.verdict}")
for kind in ("full", "diag_dc", "prep"):
    print(f"lower bound on CNOTs, 3 qubits, {kind}: {cnot_lower_bound(3, kind)}")
