"""Quasi-relative entropies, generator functions and closest separable states."""

from .closest import (
    Certificate,
    ClosestResult,
    HypothesisError,
    SolveError,
    certify,
    closest_maxent,
    closest_pure_flatH,
    closest_separable,
    closest_two_qubit,
    directional_derivative,
    solve_q,
)
from .fgen import GeneratorFunction, classify_hf, gf, hf, make_builtin, parse_spec, verify_representation
from .qre import (
    alpha_divergence,
    divergence,
    modular_operator,
    qre_modular,
    qre_spectral,
    renyi_relative,
    tsallis_relative,
    umegaki,
)
from .qstate import (
    DensityMatrix,
    PureState,
    SchmidtForm,
    StateError,
    bell_state,
    is_ppt,
    partial_trace,
    partial_transpose,
    random_state,
    schmidt_decompose,
    schmidt_state,
    tensor_product,
)
from .quadrature import QuadratureError, QuadratureSpec
from .sepopt import OptimizerConfig, ProductEnsemble, assemble, minimize

__version__ = "0.1.0"
