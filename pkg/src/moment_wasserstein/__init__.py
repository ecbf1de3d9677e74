"""Moment-driven W1 concentration: certified polynomial approximation, Orlicz norms, exact W1 and a Monte Carlo harness."""

from .chebyshev import MonomialCoeffs, chebyshev_monomial, verify_coeff_bound
from .errors import MomentWassersteinError
from .generators import ArraySpec, generate_row, generate_rows, parse_generator
from .harness import ExperimentConfig, ExperimentReport, certify, run_experiment, run_vector_experiment
from .jackson import CertifiedApprox, approximate_lipschitz, jackson_damping
from .measure import EmpiricalMeasure, w1_distance
from .orlicz import orlicz_norm_empirical, psi_value
from .sliced import VectorMeasure, build_sphere_net, sliced_sup_w1

__all__ = [
    "ArraySpec", "CertifiedApprox", "EmpiricalMeasure", "ExperimentConfig", "ExperimentReport",
    "MomentWassersteinError", "MonomialCoeffs", "VectorMeasure", "approximate_lipschitz",
    "build_sphere_net", "certify", "chebyshev_monomial", "generate_row", "generate_rows",
    "jackson_damping", "orlicz_norm_empirical", "parse_generator", "psi_value", "run_experiment",
    "run_vector_experiment", "sliced_sup_w1", "verify_coeff_bound", "w1_distance",
]
