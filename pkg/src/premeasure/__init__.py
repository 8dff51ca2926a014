"""Finite-dimensional toolkit for unitary premeasurement schemes.

Construct schemes (object observable, ready instrument state, pointer
observable, interaction unitary), verify them against families of
equivalent criteria, extract state transformers, classify into five kinds,
and simulate measurement on one half of an entangled pair.
"""

from .kinds import MClass, build_ideal, classify, extract_state_transformers, is_ideal
from .observables import IndexFunction, SpectralForm, make_spectral_form, spectral_decompose
from .qlin import BipartiteDims, schmidt
from .scheme import (MeasurementScheme, build_nondemolition, build_premeasurement,
                     evolve, make_scheme, ready_subspace)
from .verify_general import GeneralCriterion, verify_all_general, verify_general
from .verify_nd import NDCriterion, coherence_report, overmeasure, verify_all_nd, verify_nd

__version__ = "0.1.0"

__all__ = [
    "BipartiteDims", "GeneralCriterion", "IndexFunction", "MClass",
    "MeasurementScheme", "NDCriterion", "SpectralForm", "build_ideal",
    "build_nondemolition", "build_premeasurement", "classify",
    "coherence_report", "evolve", "extract_state_transformers", "is_ideal",
    "make_scheme", "make_spectral_form", "overmeasure", "ready_subspace",
    "schmidt", "spectral_decompose", "verify_all_general", "verify_all_nd",
    "verify_general", "verify_nd", "__version__",
]
