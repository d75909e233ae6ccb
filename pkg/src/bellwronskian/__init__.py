"""Noncommutative Bell polynomials and generalized Wronskians of vector functions."""
from .errors import *  # noqa: F401,F403
from .exprlang import FunctionSpec, MatrixFunctionSpec, VectorFunctionSpec, eval_jet, parse, unparse
from .jets import (
    Jet,
    MatrixOfJets,
    det_jets,
    jet_add,
    jet_differentiate,
    jet_elementary,
    jet_mul,
    jet_scale,
    matrix_jet_derivative,
)
from .ncbell import (
    MAX_ORDER,
    NCPolynomial,
    bell_eval,
    bell_eval_jets,
    bell_expand,
    commutative_bell,
    format_polynomial,
)
from .verify import (
    EquivalenceResult,
    VerificationReport,
    range_equivalent,
    verify_abel_liouville,
    verify_corollary0,
    verify_corollary1,
    verify_lemma0,
    verify_lemma2,
    verify_theorem1,
)
from .wronskian import (
    CoefficientVector,
    Frame,
    MultiIndex,
    companion_matrix,
    frame_matrix,
    phi,
    reconstruct_coefficients,
    wronskian,
    wronskian_direct,
    wronskian_via_bell,
    wronskian_via_bell_auto,
)

__version__ = "0.1.0"
