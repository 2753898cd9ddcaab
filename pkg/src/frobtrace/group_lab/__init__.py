"""Exact arithmetic in GL2(F_ell)^g and brute-force checks of its subgroup lemmas."""

from .conjsets import ConjSetKind, conj_set, conj_set_array
from .groups import DEFAULT_CAP, Kind, element_array, enumerate_group, generators, group_order, membership
from .matrices import (
    CharPoly,
    EigenStatus,
    GTuple,
    Gl2Mat,
    borel_conjugator,
    char_poly_gl2,
    char_poly_tuple,
)
from .verify import LEMMAS, LemmaReport, borel_sweep, verify_lemma

__all__ = [
    "CharPoly", "ConjSetKind", "DEFAULT_CAP", "EigenStatus", "GTuple", "Gl2Mat", "Kind",
    "LEMMAS", "LemmaReport", "borel_conjugator", "borel_sweep", "char_poly_gl2",
    "char_poly_tuple", "conj_set", "conj_set_array", "element_array", "enumerate_group",
    "generators", "group_order", "membership", "verify_lemma",
]
