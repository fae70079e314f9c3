"""gridcast - demand/generation forecasting and storage adequacy for community power grids"""

from ._version import version as __version__
from .adequacy import NoiseParams, StorageSpec, adequacy_lower_bound, curve_table, simulate_storage_paths
from .errors import DatasetError, SeriesError, SingularDesignError
from .forecasting import ArModel, DiffArModel, MleFit, fit_ar, fit_diff_ar, fit_mle, multi_step
from .simulation import BulkPolicy, Community, SimConfig, run_simulation, step_llmu
from .store import DirectoryBackend, RecordKey, RecordStore
from .timegrid import GridConfig, Observation, load_csv, partition_key


__all__ = [
    "ArModel",
    "BulkPolicy",
    "Community",
    "DatasetError",
    "DiffArModel",
    "DirectoryBackend",
    "GridConfig",
    "RecordKey",
    "MleFit",
    "NoiseParams",
    "Observation",
    "RecordStore",
    "SeriesError",
    "SimConfig",
    "SingularDesignError",
    "StorageSpec",
    "__version__",
    "adequacy_lower_bound",
    "curve_table",
    "fit_ar",
    "fit_diff_ar",
    "fit_mle",
    "load_csv",
    "multi_step",
    "partition_key",
    "run_simulation",
    "simulate_storage_paths",
    "step_llmu",
]
