"""Hybrid cat-code fusion analytics, loss modelling and MBQC threshold tools."""

__version__ = "0.1.0"

from .analytics import (CVOutcome, CVRateTable, DVTag, HybridOutcome, Letter, Parity, Scheme,
                        Sign, classify_dv, classify_ha, classify_hybrid, classify_sdr, cv_rates)
from .loss_model import FusionErrorRates, fusion_error_rates, loss_coefficients
from .resources import generation_costs, overhead_estimate

__all__ = [
    "__version__",
    "CVOutcome",
    "CVRateTable",
    "DVTag",
    "HybridOutcome",
    "Letter",
    "Parity",
    "Scheme",
    "Sign",
    "classify_dv",
    "classify_ha",
    "classify_hybrid",
    "classify_sdr",
    "cv_rates",
    "FusionErrorRates",
    "fusion_error_rates",
    "loss_coefficients",
    "generation_costs",
    "overhead_estimate",
]
