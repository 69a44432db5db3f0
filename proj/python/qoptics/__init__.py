"""Multimode Fock-space simulator for heralded single-photon interferometers."""

import json

from ._core import (
    Branch,
    Error,
    InputSpec,
    LeakBudgetError,
    ParameterError,
    SchemeParams,
    ZeroProbabilityError,
    beam_splitter_conjugation_defect,
    branch_wigner,
    cli,
    commutation_report,
    commutator_defect,
    format_circuit,
    gaussian_wigner,
    hom_defect,
    parse_errors,
    run_interferometer,
    squeezer_conjugation_defect,
)
from ._core import _run_circuit_json


def run_circuit(text, cutoff=None, leak_budget=1e-6):
    """Run circuit DSL text; returns cutoff, max_leak, herald_weight and outputs."""
    return json.loads(_run_circuit_json(text, cutoff, leak_budget))


__all__ = [
    "Branch",
    "Error",
    "InputSpec",
    "LeakBudgetError",
    "ParameterError",
    "SchemeParams",
    "ZeroProbabilityError",
    "beam_splitter_conjugation_defect",
    "branch_wigner",
    "cli",
    "commutation_report",
    "commutator_defect",
    "format_circuit",
    "gaussian_wigner",
    "hom_defect",
    "parse_errors",
    "run_circuit",
    "run_interferometer",
    "squeezer_conjugation_defect",
]
