"""Genus symbols of integral quadratic forms and construction of forms in a given genus."""

from .errors import (
    EquivalenceNotFound,
    GenerationFailed,
    InvalidSymbol,
    InvariantViolation,
    NegativeResult,
    NotEquivalent,
    QFGenusError,
    RetryableFailure,
    SchemaError,
)
from .findt import TargetPlan, find_t
from .forms import QuadForm, Transform, det, form_from_json, form_to_json, signature
from .generate import (
    find_equivalence_mod_pk,
    qfgen_poly,
    trace_blowup,
    verify_membership,
)
from .jordan import block_diagonalize, constituents
from .localform import local_form_p, local_form_q
from .symbol import (
    GenusSymbol,
    det_of_symbol,
    genus_symbol,
    reduce_symbol,
    validate_symbol,
)
from .zmod import LocalContext

__version__ = "0.1.0"

__all__ = [
    "EquivalenceNotFound",
    "GenerationFailed",
    "GenusSymbol",
    "InvalidSymbol",
    "InvariantViolation",
    "LocalContext",
    "NegativeResult",
    "NotEquivalent",
    "QFGenusError",
    "QuadForm",
    "RetryableFailure",
    "SchemaError",
    "TargetPlan",
    "Transform",
    "block_diagonalize",
    "constituents",
    "det",
    "det_of_symbol",
    "find_equivalence_mod_pk",
    "find_t",
    "form_from_json",
    "form_to_json",
    "genus_symbol",
    "local_form_p",
    "local_form_q",
    "qfgen_poly",
    "reduce_symbol",
    "signature",
    "trace_blowup",
    "validate_symbol",
    "verify_membership",
]
