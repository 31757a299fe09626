"""Exact calculus of weighted polyhedral currents with superform coefficients.

Everything is computed over the rationals: polyhedra are canonical
constraint systems, coefficients are polynomial superforms written in cell
charts, and all operators, pairings, and products return exact results.
"""

from .currents import (
    AffineMap,
    BalancingError,
    DeltaForm,
    PreconditionError,
    as_piecewise_form,
    boundary_prime_via_contraction,
    boundary_second_via_contraction,
    exterior_product,
    fundamental_cycle,
    piecewise_to_delta,
    ps_multiply,
    pullback_surjective,
    pushforward,
    translate_delta,
)
from .intersection import (
    NonGenericError,
    TransversalityError,
    corner_locus,
    corner_locus_identity_check,
    displacement_product,
    divisor_commutes_check,
    divisor_intersect,
    generic_vector,
    gradient_second_form,
    is_generic,
    pl_max,
    product_property_suite,
    pullback_general,
    transversal_product,
    value_form,
    wedge_diagonal,
)
from .io import (
    DocumentError,
    deltaform_json,
    dumps_canonical,
    load_document,
    map_json,
    parse_deltaform,
    parse_map,
    parse_plfunction,
    parse_polyhedron,
    parse_superform,
    plfunction_json,
    polyhedron_json,
    superform_json,
)
from .polyhedra import (
    Chart,
    Complex,
    ComplexError,
    Polyhedron,
    WeightedCell,
    box,
    intersect,
    polyhedron,
    ray_from,
    segment,
    single_point,
    whole_space,
)
from .superforms import (
    ContinuityError,
    PiecewiseForm,
    PLFunction,
    Poly,
    SuperForm,
    boundary_integral,
    integrate_top,
    stokes_check,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "BalancingError",
    "Chart",
    "Complex",
    "ComplexError",
    "ContinuityError",
    "DeltaForm",
    "DocumentError",
    "NonGenericError",
    "PLFunction",
    "PiecewiseForm",
    "Poly",
    "Polyhedron",
    "PreconditionError",
    "SuperForm",
    "TransversalityError",
    "WeightedCell",
    "as_piecewise_form",
    "boundary_integral",
    "boundary_prime_via_contraction",
    "boundary_second_via_contraction",
    "box",
    "corner_locus",
    "corner_locus_identity_check",
    "deltaform_json",
    "displacement_product",
    "divisor_commutes_check",
    "divisor_intersect",
    "dumps_canonical",
    "exterior_product",
    "fundamental_cycle",
    "generic_vector",
    "gradient_second_form",
    "integrate_top",
    "intersect",
    "is_generic",
    "load_document",
    "map_json",
    "parse_deltaform",
    "parse_map",
    "parse_plfunction",
    "parse_polyhedron",
    "parse_superform",
    "piecewise_to_delta",
    "pl_max",
    "plfunction_json",
    "polyhedron",
    "polyhedron_json",
    "product_property_suite",
    "ps_multiply",
    "pullback_general",
    "pullback_surjective",
    "pushforward",
    "ray_from",
    "segment",
    "single_point",
    "stokes_check",
    "superform_json",
    "translate_delta",
    "transversal_product",
    "value_form",
    "wedge_diagonal",
    "whole_space",
]
