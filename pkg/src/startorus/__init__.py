"""Numerical toolkit for star-product reductions of self-dual gravity data.

Exact Moyal algebra on torus Fourier modes, the trigonometric matrix basis
of sl(N, C) with its folding homomorphism, a deformed heavenly-equation
solution with series and residual verification, curvature of the induced
metric, and the finite-rank chiral-field sequence with its large-N limit.
"""

from .fourier import (
    DEFAULT_PRUNE,
    FourierField,
    eval_on_torus,
    fft_project,
    moyal_bracket,
    poisson_bracket,
    sample_on_grid,
    star_product,
)
from .grids import GriddedFourierField, SpacetimeGrid, torus_nodes
from .numerics import SingularMetricError, richardson_order
from .sine_basis import (
    BasisPropertyReport,
    SuNBasisElement,
    basis_matrix,
    clock_matrix,
    det_closed_form,
    fold_mode,
    fundamental_window,
    matrix_from_json,
    matrix_to_json,
    shift_matrix,
    structure_constant,
    su_n_basis,
    verify_basis_properties,
)
from .projection import (
    MatrixField,
    chi_project,
    chi_project_gridded,
    commutator_defect,
    matched_hbar,
)
from .master_equation import (
    ClosedFormSolution,
    KahlerBackground,
    ResidualReport,
    SeriesSolution,
    WPolyField,
    example_cauchy_data,
    example_solution,
    freq_factor,
    kowalewska_series,
    residual_me_flat,
    residual_me_kahler,
    residual_moyal_hp,
)
from .geometry import (
    FRAME_METRIC,
    ConnectionForms,
    MetricField,
    TetradFrame,
    ThetaDerivatives,
    WeylReport,
    admissible_points,
    cartan_first,
    example_connection,
    example_metric,
    example_tetrad,
    example_theta,
    fd_theta_derivatives,
    hp_metric,
    metric_from_tetrad,
    pp_wave_check,
    weyl_c1,
    weyl_report,
    weyl_sample,
)
from .chiral import (
    BesselIdentityReport,
    ChiralModel,
    ConvergenceReport,
    ExpansionResult,
    bessel_identity_check,
    bessel_integral,
    chiral_model,
    chiral_system_check,
    convergence_study,
    fourier_expansion_theta,
    residual_chiral,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
