"""Synchronous record store over an async backend."""

from __future__ import annotations

import asyncio
import json
import threading
from collections.abc import Callable, Iterator, MutableMapping
from typing import TYPE_CHECKING, Any, Self, TypeVar, override

from .keys import SEP, RecordKey, check_part
from .nested import nest_records


if TYPE_CHECKING:
    from collections.abc import Coroutine
    from concurrent.futures import Future
    from types import TracebackType

    from .protocol import Backend


_T = TypeVar("_T")


class _AsyncLoopBridge:
    """Bridge sync calls to async backend operations on a dedicated loop."""

    def __init__(self) -> None:
        super().__init__()
        self._loop_ready = threading.Event()
        self._loop: asyncio.AbstractEventLoop | None = None
        self._thread = threading.Thread(target=self._run, name="gridcast-record-store", daemon=True)
        self._thread.start()
        _ = self._loop_ready.wait()

    def _run(self) -> None:
        loop = asyncio.new_event_loop()
        asyncio.set_event_loop(loop)
        self._loop = loop
        self._loop_ready.set()
        loop.run_forever()
        loop.close()

    def run(self, coroutine: Coroutine[Any, Any, _T]) -> _T:
        if self._loop is None or not self._thread.is_alive():
            coroutine.close()
            msg = "record store event loop is not running"
            raise RuntimeError(msg)
        future: Future[_T] = asyncio.run_coroutine_threadsafe(coroutine, self._loop)
        return future.result()

    def close(self) -> None:
        if self._loop is None or not self._thread.is_alive():
            return
        _ = self._loop.call_soon_threadsafe(self._loop.stop)
        self._thread.join(timeout=5)


class RecordStore(MutableMapping[str, Any]):
    """Dict-like sync API over the JSON records of one namespace.

    ``store["demand"]`` returns the nested tree of every record below ``<namespace>:demand``;
    :meth:`put` and :meth:`fetch` address single records by their parts below the namespace.
    Calls from several threads are safe: they are funnelled through one event loop.
    """

    def __init__(
        self,
        backend: Backend,
        namespace: str,
        json_encoder: Callable[[Any], str] = json.dumps,
        json_decoder: Callable[[str], Any] = json.loads,
    ) -> None:
        super().__init__()
        self._backend = backend
        self._namespace = check_part(namespace)
        self._json_encoder = json_encoder
        self._json_decoder = json_decoder
        self._bridge = _AsyncLoopBridge()

    @property
    def namespace(self) -> str:
        return self._namespace

    def key(self, *parts: str) -> RecordKey:
        return RecordKey(self._namespace, parts)

    def keys_below(self, *parts: str) -> list[RecordKey]:
        """Return the keys of every record at or below ``parts`` (all records when empty)."""
        prefix = SEP.join((self._namespace, *parts))
        found = self._bridge.run(self._backend.scan(prefix))
        keys = [RecordKey.parse(text) for text in found if SEP in text]
        return [key for key in keys if key.startswith(self._namespace, *parts)]

    def put(self, *parts: str, value: Any) -> RecordKey:
        """Store ``value`` at ``parts`` and return the record's key."""
        key = self.key(*parts)
        self._bridge.run(self._backend.write(str(key), self._json_encoder(value)))
        return key

    def fetch(self, *parts: str) -> Any:
        """Return the single record stored at ``parts``."""
        key = self.key(*parts)
        encoded = self._bridge.run(self._backend.read(str(key)))
        if encoded is None:
            raise KeyError(str(key))
        return self._json_decoder(encoded)

    @override
    def __getitem__(self, group: str) -> Any:
        """Return the record tree stored below ``group``."""
        keys = self.keys_below(group)
        records = self._bridge.run(self._backend.read_many(str(key) for key in keys))
        pairs = [(key.parts[1:], self._json_decoder(records[str(key)])) for key in keys if str(key) in records]
        if not pairs:
            raise KeyError(group)
        return nest_records(pairs)

    @override
    def __setitem__(self, group: str, value: Any) -> None:
        """Store a record directly below the namespace."""
        _ = self.put(group, value=value)

    @override
    def __delitem__(self, group: str) -> None:
        """Delete a record and every record below it."""
        removed = [self._bridge.run(self._backend.remove(str(key))) for key in self.keys_below(group)]
        if not any(removed):
            raise KeyError(group)

    @override
    def __iter__(self) -> Iterator[str]:
        """Iterate sorted top-level groups."""
        return iter(sorted({key.parts[0] for key in self.keys_below()}))

    @override
    def __len__(self) -> int:
        return len({key.parts[0] for key in self.keys_below()})

    @override
    def __repr__(self) -> str:
        return f"{type(self).__name__}(namespace={self._namespace!r}, groups={list(self)})"

    def close(self) -> None:
        """Close backend and bridge resources."""
        self._bridge.run(self._backend.close())
        self._bridge.close()

    def __enter__(self) -> Self:
        return self

    def __exit__(
        self, exc_type: type[BaseException] | None, exc: BaseException | None, traceback: TracebackType | None
    ) -> None:
        self.close()
