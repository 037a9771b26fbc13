"""Iterated integrals of modular 1-forms, higher-order modular forms and twisted Poincare series."""
from ._kernels import BACKEND
from .chen import (IteratedIntegralFunctional, LoopTable, Path, QuadratureError, Signature, deconcatenate, pair,
                   path_signature, segment_signature, shuffle_product)
from .formbank import FormLetter, builtin_letters, evaluate_form, letter
from .groupring import GroupRingElement, j_power_element, parse_xi
from .hodge import FiltrationDegree, functional_degree, primitive_space_table
from .hoforms import HigherOrderForm, verify_cuspidal, verify_order
from .modgroup import GAMMA0_11, GAMMA2, GroupElement, coset_reps, get_preset
from .poincare import PoincareSpec, convergence_profile, evaluate_series, transformation_residual

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "IteratedIntegralFunctional", "LoopTable", "Path", "QuadratureError", "Signature", "deconcatenate",
    "pair", "path_signature", "segment_signature", "shuffle_product", "FormLetter", "builtin_letters",
    "evaluate_form", "letter", "GroupRingElement", "j_power_element", "parse_xi", "FiltrationDegree",
    "functional_degree", "primitive_space_table", "HigherOrderForm", "verify_cuspidal", "verify_order",
    "GAMMA0_11", "GAMMA2", "GroupElement", "coset_reps", "get_preset", "PoincareSpec", "convergence_profile",
    "evaluate_series", "transformation_residual",
]
