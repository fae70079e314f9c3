"""Backend interface for persisted model and run records."""

from __future__ import annotations

import asyncio
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING


if TYPE_CHECKING:
    from collections.abc import Iterable


class Backend(ABC):
    """Async store of JSON-encoded records addressed by separator-joined keys."""

    @abstractmethod
    async def read(self, key: str) -> str | None:
        """Return the encoded record at ``key``, or None when there is none."""

    @abstractmethod
    async def write(self, key: str, record: str) -> None:
        """Store ``record`` at ``key``, replacing any previous record."""

    @abstractmethod
    async def remove(self, key: str) -> bool:
        """Remove the record at ``key``; return whether one existed."""

    @abstractmethod
    async def scan(self, prefix: str) -> list[str]:
        """Return the sorted keys that start with ``prefix``."""

    async def read_many(self, keys: Iterable[str]) -> dict[str, str]:
        """Read several records concurrently, skipping keys removed in the meantime."""
        wanted = list(keys)
        records = await asyncio.gather(*(self.read(key) for key in wanted))
        return {key: record for key, record in zip(wanted, records, strict=True) if record is not None}

    async def close(self) -> None:  # noqa: B027
        """Release backend resources."""
