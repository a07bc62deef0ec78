"""
q2synth: minimal-CNOT synthesis for two-qubit operators that are only
partially specified (state preparation, one prescribed row, or equivalence
up to a computational-basis measurement), plus local-invariant tools and a
dimension-counting analyzer for circuit templates.
"""
__version__ = "0.1.0"

from .circuit import CNOTGate, Circuit, OneQubit, Rot, apply, cnot_count, emit, parse, unitary_of
from .errors import (
    EpsMismatch,
    NotAProduct,
    NumericalError,
    ParseError,
    PreconditionError,
    Q2SynthError,
    RootSearchFailed,
    SpectrumMismatch,
)
from .invariants import (
    CanonicalForm,
    MakhlinSpectrum,
    canonical_angles,
    canonical_decompose,
    eps,
    local_factor,
    makhlin_spectrum,
    operator_local_transform,
    state_local_transform,
)
from .linalg import phase_dist, state_phase_dist
from .mdc import (
    MdcSolution,
    SubspaceDecomposition,
    bell_span_certificate,
    check_mdc_equiv,
    min_canonical_angle,
    synth_2cnot_mdc,
    synth_3cnot,
)
from .prep import can_prepare_all, solve_c, synth_prep, synth_row
from .universality import (
    DontCareGroup,
    RankReport,
    Template,
    cnot_lower_bound,
    diag_group,
    footnote_experiment,
    instantiate,
    load_fixture,
    parse_template,
    template_rank,
)

__all__ = [
    "apply",
    "bell_span_certificate",
    "can_prepare_all",
    "canonical_angles",
    "canonical_decompose",
    "CanonicalForm",
    "check_mdc_equiv",
    "Circuit",
    "cnot_count",
    "cnot_lower_bound",
    "CNOTGate",
    "diag_group",
    "DontCareGroup",
    "emit",
    "eps",
    "EpsMismatch",
    "footnote_experiment",
    "instantiate",
    "load_fixture",
    "local_factor",
    "makhlin_spectrum",
    "MakhlinSpectrum",
    "MdcSolution",
    "min_canonical_angle",
    "NotAProduct",
    "NumericalError",
    "OneQubit",
    "operator_local_transform",
    "parse",
    "parse_template",
    "ParseError",
    "phase_dist",
    "PreconditionError",
    "Q2SynthError",
    "RankReport",
    "RootSearchFailed",
    "Rot",
    "solve_c",
    "SpectrumMismatch",
    "state_local_transform",
    "state_phase_dist",
    "SubspaceDecomposition",
    "synth_2cnot_mdc",
    "synth_3cnot",
    "synth_prep",
    "synth_row",
    "Template",
    "template_rank",
    "unitary_of",
]
