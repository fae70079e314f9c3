"""Persistence of fitted models and run records."""

from .directory import DirectoryBackend
from .keys import RecordKey, longterm_key, realtime_key, sweep_key
from .nested import nest_records
from .protocol import Backend
from .records import RecordStore


__all__ = [
    "Backend",
    "DirectoryBackend",
    "RecordKey",
    "RecordStore",
    "longterm_key",
    "nest_records",
    "realtime_key",
    "sweep_key",
]
