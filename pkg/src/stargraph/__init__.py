"""Diffusion semigroups with Gaussian weight on a star of half-lines.

The package models two Markov semigroups on a star-shaped metric graph: a
drift diffusion that is symmetric for the Gaussian invariant measure, and
its unitary image, an oscillator semigroup on flat space.  Closed-form
kernels, a reflection construction that reduces the star to the line, exact
spectral data, a finite-difference reference solver and a command-line
front end are provided.
"""

from .errors import (
    AssemblyError,
    DomainError,
    ExtensionError,
    FoldError,
    InvalidGraphError,
    InvalidPointError,
    NumericalInputError,
    ShapeError,
    StabilityError,
    StarGraphError,
    StencilError,
    VertexContinuityError,
)
from .extension import (
    CoefficientTriple,
    LineCoefficients,
    LineFunction,
    even_odd_split,
    extend_coefficients,
    fold_to_star,
    ho_coefficients,
    ou_coefficients,
    reflect_extend,
    symmetric_line_grid,
)
from .geometry import (
    GridSpec,
    MeasureKind,
    StarFunction,
    StarGraph,
    StarPoint,
    integrate_star,
    mu_density,
    simpson_weights,
    sup_distance,
)
from .kernels import (
    HARMONIC,
    MIN_TIME,
    OU,
    KernelSpec,
    TabulatedLineKernel,
    ho_line_kernel,
    line_kernel,
    ou_line_kernel,
    scattering_matrix,
    star_kernel,
)
from .oracle import (
    LineEvolution,
    OracleConfig,
    StarEvolution,
    TruncationRow,
    solve_line_dirichlet,
    solve_star,
    tabulate_kernel,
    truncation_study,
    worker_count,
)
from .semigroup import VertexDefect, apply, evolve_sequence, vertex_defect
from .spectral import (
    PolyGauss,
    RotationOperator,
    SpectralDatum,
    TracePair,
    apply_generator,
    eigenbasis,
    form_matrix,
    form_spectrum,
    hermite,
    hermite_coefficients,
    multiplicity,
    trace_closed_form,
    trace_partial,
)
from .transform import (
    TRUST_RADIUS,
    flat_factor,
    from_flat,
    ground_state,
    similarity_defect,
    to_flat,
)

__version__ = "0.1.0"

__all__ = [
    "AssemblyError",
    "CoefficientTriple",
    "DomainError",
    "ExtensionError",
    "FoldError",
    "GridSpec",
    "HARMONIC",
    "InvalidGraphError",
    "InvalidPointError",
    "KernelSpec",
    "LineCoefficients",
    "LineEvolution",
    "LineFunction",
    "MIN_TIME",
    "MeasureKind",
    "NumericalInputError",
    "OU",
    "OracleConfig",
    "PolyGauss",
    "RotationOperator",
    "ShapeError",
    "SpectralDatum",
    "StabilityError",
    "StarEvolution",
    "StarFunction",
    "StarGraph",
    "StarGraphError",
    "StarPoint",
    "StencilError",
    "TRUST_RADIUS",
    "TabulatedLineKernel",
    "TracePair",
    "TruncationRow",
    "VertexContinuityError",
    "VertexDefect",
    "apply",
    "apply_generator",
    "eigenbasis",
    "evolve_sequence",
    "even_odd_split",
    "extend_coefficients",
    "flat_factor",
    "fold_to_star",
    "form_matrix",
    "form_spectrum",
    "from_flat",
    "ground_state",
    "hermite",
    "hermite_coefficients",
    "ho_coefficients",
    "ho_line_kernel",
    "integrate_star",
    "line_kernel",
    "mu_density",
    "multiplicity",
    "ou_coefficients",
    "ou_line_kernel",
    "reflect_extend",
    "scattering_matrix",
    "similarity_defect",
    "simpson_weights",
    "solve_line_dirichlet",
    "solve_star",
    "star_kernel",
    "sup_distance",
    "symmetric_line_grid",
    "tabulate_kernel",
    "to_flat",
    "trace_closed_form",
    "trace_partial",
    "truncation_study",
    "vertex_defect",
    "worker_count",
]
