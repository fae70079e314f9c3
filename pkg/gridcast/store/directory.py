"""Filesystem backend writing one JSON file per record."""

from __future__ import annotations

import asyncio
import os
import tempfile
from pathlib import Path
from typing import override

from .protocol import Backend


_SUFFIX = ".json"


class DirectoryBackend(Backend):
    """Backend mapping ``ns:a:b`` to ``<root>/ns/a/b.json``.

    File I/O runs in worker threads so the event loop of the record store stays responsive.
    Writes go through a temporary file and an atomic rename.
    """

    def __init__(self, root: str | os.PathLike[str], sep: str = ":") -> None:
        """Create a backend rooted at ``root``.

        Parameters
        ----------
        root
            Directory that receives the record tree. Created on first write.
        sep
            Key separator; every separated part becomes one path component.
        """
        super().__init__()
        if not sep or sep in {"/", "\\", "."}:
            msg = f"separator {sep!r} cannot be mapped onto file paths"
            raise ValueError(msg)
        self._root = Path(root)
        self._sep = sep

    @property
    def root(self) -> Path:
        return self._root

    def path_for(self, key: str) -> Path:
        """Return the file path that stores ``key``."""
        parts = key.split(self._sep)
        if any(not part or part in {".", ".."} for part in parts):
            msg = f"key cannot be mapped onto a file path: {key}"
            raise ValueError(msg)
        *dirs, leaf = parts
        return self._root.joinpath(*dirs, leaf + _SUFFIX)

    def _key_for(self, path: Path) -> str:
        relative = path.relative_to(self._root).with_suffix("")
        return self._sep.join(relative.parts)

    def _read(self, key: str) -> str | None:
        path = self.path_for(key)
        if not path.is_file():
            return None
        return path.read_text(encoding="utf-8")

    def _write(self, key: str, value: str) -> None:
        path = self.path_for(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                _ = handle.write(value)
            _ = Path(tmp_name).replace(path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise

    def _remove(self, key: str) -> bool:
        try:
            self.path_for(key).unlink()
        except FileNotFoundError:
            return False
        return True

    def _scan(self, prefix: str) -> list[str]:
        if not self._root.is_dir():
            return []
        keys = (self._key_for(path) for path in self._root.rglob(f"*{_SUFFIX}") if not path.name.startswith("."))
        return sorted(key for key in keys if key.startswith(prefix))

    @override
    async def read(self, key: str) -> str | None:
        return await asyncio.to_thread(self._read, key)

    @override
    async def write(self, key: str, record: str) -> None:
        await asyncio.to_thread(self._write, key, record)

    @override
    async def remove(self, key: str) -> bool:
        return await asyncio.to_thread(self._remove, key)

    @override
    async def scan(self, prefix: str) -> list[str]:
        return await asyncio.to_thread(self._scan, prefix)
