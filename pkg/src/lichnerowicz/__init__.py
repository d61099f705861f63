"""Exact operator algebra on symmetric tensors over flat and hyperbolic space."""

from .depth import (
    DenominatorSingularOnSpectrum,
    apply_cas,
    apply_kappa,
    apply_ncal,
    div_tilde,
    grad_tilde,
    reconstruct_div,
    reconstruct_grad,
    trace_decompose,
)
from .exact import LaurentPoly, NCFunction
from .geometry import Geometry, flat, hyperbolic, make_geometry
from .language import parse, pretty_print
from .operators import (
    apply_div,
    apply_g,
    apply_grad,
    apply_N,
    apply_tr,
    bochner_laplacian,
    casimir_c,
    curvature_op,
    lichnerowicz_box,
)
from .rewrite import NormalForm, apply_expr, normalize, ord_degree
from .tensors import SymTensorField, load_tensor, make_tensor, random_tensor

__all__ = [
    "DenominatorSingularOnSpectrum",
    "Geometry",
    "LaurentPoly",
    "NCFunction",
    "NormalForm",
    "SymTensorField",
    "apply_N",
    "apply_cas",
    "apply_div",
    "apply_expr",
    "apply_g",
    "apply_grad",
    "apply_kappa",
    "apply_ncal",
    "apply_tr",
    "bochner_laplacian",
    "casimir_c",
    "curvature_op",
    "div_tilde",
    "flat",
    "grad_tilde",
    "hyperbolic",
    "lichnerowicz_box",
    "load_tensor",
    "make_geometry",
    "make_tensor",
    "normalize",
    "ord_degree",
    "parse",
    "pretty_print",
    "random_tensor",
    "reconstruct_div",
    "reconstruct_grad",
    "trace_decompose",
]
