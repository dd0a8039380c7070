"""Exact formality certification for finite-dimensional DG algebras."""

__version__ = "0.1.0"

from .errors import (
    DGFormalError,
    DomainError,
    DegreeError,
    InputError,
    InvariantError,
)
from .scalars import QQ, QQ_T, QQ_T_FRAC, domain_from_tag
from .dga import DGAlgebra, validate, cohomology
from .filtration import canonical_filtration, associated_graded, rees_expansion
from .hochschild import cochain_space, hh_component, hochschild_differential
from .formality import certify, ks_cocycle, obstruction_test, vanishing_bound
from .extensions import extension_cocycle, first_order_cocycle
from .massey import massey_triple
from .family import FamilyAlgebra, fiber, generic_fiber, flatness_check, hh_module, theorem_q_scan
from .document import load, parse, serialize

__all__ = [
    "DGFormalError",
    "DomainError",
    "DegreeError",
    "InputError",
    "InvariantError",
    "QQ",
    "QQ_T",
    "QQ_T_FRAC",
    "domain_from_tag",
    "DGAlgebra",
    "validate",
    "cohomology",
    "canonical_filtration",
    "associated_graded",
    "rees_expansion",
    "cochain_space",
    "hh_component",
    "hochschild_differential",
    "extension_cocycle",
    "first_order_cocycle",
    "certify",
    "ks_cocycle",
    "obstruction_test",
    "vanishing_bound",
    "massey_triple",
    "FamilyAlgebra",
    "fiber",
    "generic_fiber",
    "flatness_check",
    "hh_module",
    "theorem_q_scan",
    "parse",
    "serialize",
    "load",
]
