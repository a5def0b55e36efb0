"""RIS-assisted link performance under additive white generalized Gaussian noise.

Closed-form symbol error rates built on a numerical Meijer G-function engine,
with independent Monte Carlo oracles, diversity-order analysis, and a CLI that
reproduces the SER/diversity/distance experiment curves.
"""

from .exceptions import (
    AsymptoticPoleError,
    DegenerateFitError,
    MeijerConvergenceError,
    PoleCollisionError,
)
from .ggn import GgnModel, ggn_pdf, ggn_sample, lambda0, preset
from .montecarlo import McConfig, SerEstimate, moment_estimate, ser_semi_analytic, ser_symbol_level
from .ris_channel import RisLink, avg_snr, instantaneous_snr, sample_composite_gain
from .ser import (
    GAMMA_NOISE,
    GAUSSIAN,
    LAPLACIAN,
    ApproximationWarning,
    Modulation,
    NoiseCase,
    bpsk,
    conditional_ser,
    diversity_asymptotic,
    diversity_empirical,
    general,
    mpsk,
    noise_case,
    qpsk,
    rect_mqam,
    ser_asymptotic,
    ser_closed_form,
    ser_special,
)
from .snr_stats import MomentSet, PdfParams, fit_pdf_params, moments, snr_pdf
from .specfun import MeijerGSpec, generalized_q, generalized_q_meijer, ln_gamma, meijer_g

__version__ = "0.1.0"

__all__ = [
    "ApproximationWarning", "AsymptoticPoleError", "DegenerateFitError",
    "GAMMA_NOISE", "GAUSSIAN", "GgnModel", "LAPLACIAN", "McConfig",
    "MeijerConvergenceError", "MeijerGSpec", "Modulation", "MomentSet",
    "NoiseCase", "PdfParams", "PoleCollisionError", "RisLink", "SerEstimate",
    "avg_snr", "bpsk", "conditional_ser", "diversity_asymptotic",
    "diversity_empirical", "fit_pdf_params", "general", "generalized_q",
    "generalized_q_meijer", "ggn_pdf", "ggn_sample", "instantaneous_snr",
    "lambda0", "ln_gamma", "meijer_g", "moment_estimate", "moments", "mpsk",
    "noise_case", "preset", "qpsk", "rect_mqam", "sample_composite_gain",
    "ser_asymptotic", "ser_closed_form", "ser_semi_analytic", "ser_special",
    "ser_symbol_level", "snr_pdf",
]
