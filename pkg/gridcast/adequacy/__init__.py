"""Storage adequacy: erf lower bound, Wiener-path simulation and curve tables."""

from .bound import NoiseParams, StorageSpec, adequacy_lower_bound
from .curves import CSV_COLUMNS, AdequacyCurve, MonteCarloSettings, curve_table, curves_frame, write_curves_csv
from .paths import sample_wiener_paths, simulate_storage_paths, survival_curve


__all__ = [
    "CSV_COLUMNS",
    "AdequacyCurve",
    "MonteCarloSettings",
    "NoiseParams",
    "StorageSpec",
    "adequacy_lower_bound",
    "curve_table",
    "curves_frame",
    "sample_wiener_paths",
    "simulate_storage_paths",
    "survival_curve",
    "write_curves_csv",
]
