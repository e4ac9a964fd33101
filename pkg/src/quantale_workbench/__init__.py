"""Finite quantales, their modules, tensor products and Morita equivalence."""

from .errors import (
    NotFree,
    NotProgenerator,
    ParseError,
    SizeCapExceeded,
    UnknownName,
    ValidationError,
    WorkbenchError,
)
from .homs import dual_basis, dual_module, end_quantale, enumerate_homs, hom_module
from .lattice import SupLattice, validate_suplattice
from .limits import size_cap
from .morita import (
    alpha_map,
    beta_map,
    is_generator,
    is_progenerator,
    is_projective,
    is_separator_on,
    morita_equivalent,
    prog_isomorphisms,
    trace,
    verify_certificate,
)
from .qmodule import Hom, Module, free_module, regular, validate_bimodule, validate_module
from .quantale import Quantale, powerset_quantale, quantale_isomorphic, validate_quantale
from .tensor import adjunction_phi, assoc_iso, tensor_of_morphisms, tensor_product, unit_iso

__version__ = "0.1.0"

__all__ = [
    "Hom",
    "Module",
    "NotFree",
    "NotProgenerator",
    "ParseError",
    "Quantale",
    "SizeCapExceeded",
    "SupLattice",
    "UnknownName",
    "ValidationError",
    "WorkbenchError",
    "adjunction_phi",
    "alpha_map",
    "assoc_iso",
    "beta_map",
    "dual_basis",
    "dual_module",
    "end_quantale",
    "enumerate_homs",
    "free_module",
    "hom_module",
    "is_generator",
    "is_progenerator",
    "is_projective",
    "is_separator_on",
    "morita_equivalent",
    "powerset_quantale",
    "prog_isomorphisms",
    "quantale_isomorphic",
    "regular",
    "size_cap",
    "tensor_of_morphisms",
    "tensor_product",
    "trace",
    "unit_iso",
    "validate_bimodule",
    "validate_module",
    "validate_quantale",
    "validate_suplattice",
    "verify_certificate",
]
