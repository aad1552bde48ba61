"""Exact and approximate rank distortions of least-squares residuals."""

__version__ = "0.1.0"

from .approx import (
    ApproxReport,
    approx_cov,
    approx_matrix,
    approx_report,
    contrast_sum_identity,
    gaussian_density_constants,
    heuristic_cov,
    rms_lines,
)
from .design import DesignMatrix, equispaced, load_csv, polynomial_design, save_csv
from .exact import (
    ClampCounter,
    DistortionMatrix,
    arcsin_holder_gap,
    exact_cov,
    exact_matrix,
    exact_var,
    orthant_prob,
)
from .montecarlo import SimulationConfig, SimulationResult, rank_of, residual_tie_scan, simulate
from .projection import (
    HatMatrix,
    compute_hat_matrix,
    delta,
    h_contrast,
    tie_condition,
    tie_free,
    tie_report,
)
