"""Symmetry algebra of the lognormal pricing equation.

Exact construction and verification of the six-dimensional isovector algebra
of the pricing equation (plus its infinite solution ideal), the induced
one-parameter transformation groups acting on option-price surfaces, and a
numerical harness that certifies transformed solutions by interior PDE
residuals.

Layers:

- exact: :mod:`bssym.model`, :mod:`bssym.exppoly`, :mod:`bssym.forms`,
  :mod:`bssym.ideal`, :mod:`bssym.isovectors` (rational arithmetic
  throughout, no floats).
- numeric: :mod:`bssym.pricing`, :mod:`bssym.grids`, :mod:`bssym.transforms`
  (closed forms, finite differences, finite flows, residual certification).
- batch: :mod:`bssym.cli`.
"""

from .model import ModelContext, format_rational, make_context, parse_rational
from .exppoly import ExpPoly, differentiate
from .forms import (
    DiffForm,
    contract,
    exterior_derivative,
    lie_derivative,
    structural_forms,
    wedge,
)
from .ideal import MembershipCertificate, ideal_membership
from .isovectors import (
    DispersionError,
    Generator,
    GHPair,
    Isovector,
    NotInFamilyError,
    SolutionSpec,
    VerificationReport,
    basis_isovector,
    bracket,
    bracket_gh,
    decompose,
    generator_of,
    gh_of,
    in_solution_ideal,
    isovector_from_constants,
    isovector_from_generator,
    pde_defect,
    pretty_combination,
    solution_isovector,
    structure_constants,
    verify_isovector,
)
from .pricing import (
    ClosedFormSolution,
    LogClosedForm,
    OptionSpec,
    bs_delta,
    bs_price,
    bs_theta,
    normal_cdf,
    normal_pdf,
)
from .grids import (
    Grid,
    GridSolution,
    ResidualReport,
    fd_solve,
    make_grid,
    read_csv,
    residual_e,
    residual_e2,
    write_csv,
)
from .transforms import (
    ActionSurface,
    CertificationResult,
    FiniteTransform,
    InfinitesimalAction,
    Pipeline,
    TransformDomainError,
    apply_transform,
    as_surface,
    certify_transform,
    compose,
    infinitesimal_action,
    sample_surface,
)

__version__ = "0.1.0"

__all__ = [
    "ModelContext", "make_context", "parse_rational", "format_rational",
    "ExpPoly", "differentiate",
    "DiffForm", "wedge", "exterior_derivative", "contract", "lie_derivative",
    "structural_forms",
    "MembershipCertificate", "ideal_membership",
    "Isovector", "Generator", "GHPair", "SolutionSpec", "VerificationReport",
    "DispersionError", "NotInFamilyError",
    "basis_isovector", "solution_isovector", "isovector_from_constants",
    "isovector_from_generator", "generator_of", "verify_isovector",
    "bracket", "bracket_gh", "gh_of", "decompose", "structure_constants",
    "pretty_combination", "pde_defect", "in_solution_ideal",
    "OptionSpec", "ClosedFormSolution", "LogClosedForm",
    "bs_price", "bs_delta", "bs_theta", "normal_cdf", "normal_pdf",
    "Grid", "GridSolution", "ResidualReport", "make_grid", "fd_solve",
    "residual_e", "residual_e2", "read_csv", "write_csv",
    "FiniteTransform", "Pipeline", "TransformDomainError",
    "apply_transform", "compose", "as_surface", "sample_surface",
    "certify_transform", "CertificationResult",
    "InfinitesimalAction", "ActionSurface", "infinitesimal_action",
    "__version__",
]
