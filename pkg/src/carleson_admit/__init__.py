"""Carleson intensities, Laplace-Carleson embeddings and admissibility of diagonal systems."""

__version__ = "0.1.0"

from .errors import DomainError, UnboundedNormError
from .measure import (
    CarlesonSquare,
    DiscreteMeasure,
    ImaginaryInterval,
    alpha_intensity,
    best_square,
    intensity_table,
    summability_functionals,
)
from .signals import InputSignal, grid_signal, kernel_signal, modulated_indicator, weighted_sum
from .orlicz import (
    L1,
    LINF,
    ExpAlphaYoung,
    ExpYoung,
    PowerYoung,
    TabulatedYoung,
    complementary,
    exp_orlicz_integral,
    luxemburg_norm,
)
from .laplace import hardy_norm, kernel, kernel_norm, laplace
from .embedding import (
    embedding_estimate,
    embedding_lower_bound,
    embedding_upper_bound,
    exp_orlicz_embedding_check,
    finite_time_check,
    psi_integral_limit_check,
    strip_embedding_check,
)
from .admissibility import (
    DiagonalSystem,
    decide_finite_time_admissible,
    decide_linf_admissible,
    decide_phi_exp_admissible,
    input_to_state,
    propequiv_crosscheck,
    witness_orlicz,
    zero_class_report,
)

__all__ = [
    "DomainError",
    "UnboundedNormError",
    "CarlesonSquare",
    "DiscreteMeasure",
    "ImaginaryInterval",
    "alpha_intensity",
    "best_square",
    "intensity_table",
    "summability_functionals",
    "InputSignal",
    "grid_signal",
    "kernel_signal",
    "modulated_indicator",
    "weighted_sum",
    "L1",
    "LINF",
    "ExpAlphaYoung",
    "ExpYoung",
    "PowerYoung",
    "TabulatedYoung",
    "complementary",
    "exp_orlicz_integral",
    "luxemburg_norm",
    "hardy_norm",
    "kernel",
    "kernel_norm",
    "laplace",
    "embedding_estimate",
    "embedding_lower_bound",
    "embedding_upper_bound",
    "exp_orlicz_embedding_check",
    "finite_time_check",
    "psi_integral_limit_check",
    "strip_embedding_check",
    "DiagonalSystem",
    "decide_finite_time_admissible",
    "decide_linf_admissible",
    "decide_phi_exp_admissible",
    "input_to_state",
    "propequiv_crosscheck",
    "witness_orlicz",
    "zero_class_report",
]
