"""Addresses of stored records.

A record key is a namespace followed by one or more name parts, written ``ns:part:part``. The
conventions used by the commands are:

- ``longterm:<quantity>:q<q>:<cell label>``: one fitted long-term regression
- ``realtime:<quantity>:q<q>``: one fitted real-time forecaster
- ``sweep:seed<n>``: the per-community summary of one simulated seed
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING


if TYPE_CHECKING:
    from gridcast.timegrid import Quantity


SEP = ":"

_NAME = re.compile(r"[A-Za-z0-9_.+-]+")


def check_part(part: str) -> str:
    """Return ``part`` when it can be used as a key part, raise ``ValueError`` otherwise."""
    if not _NAME.fullmatch(part) or part in {".", ".."}:
        msg = f"unsupported key part: {part!r}"
        raise ValueError(msg)
    return part


@dataclass(frozen=True, slots=True)
class RecordKey:
    namespace: str
    parts: tuple[str, ...]

    def __post_init__(self) -> None:
        _ = check_part(self.namespace)
        if not self.parts:
            msg = f"record key below {self.namespace!r} needs at least one part"
            raise ValueError(msg)
        for part in self.parts:
            _ = check_part(part)

    def __str__(self) -> str:
        return SEP.join((self.namespace, *self.parts))

    @classmethod
    def parse(cls, text: str) -> RecordKey:
        """Read a key from its ``ns:part:part`` form."""
        namespace, *parts = text.split(SEP)
        return cls(namespace, tuple(parts))

    def startswith(self, namespace: str, *parts: str) -> bool:
        """Return True when this key lies at or below ``namespace:parts``."""
        return self.namespace == namespace and self.parts[: len(parts)] == parts


def longterm_key(quantity: Quantity, q: int, label: str) -> RecordKey:
    return RecordKey("longterm", (quantity, f"q{q}", label))


def realtime_key(quantity: Quantity, q: int) -> RecordKey:
    return RecordKey("realtime", (quantity, f"q{q}"))


def sweep_key(seed: int) -> RecordKey:
    return RecordKey("sweep", (f"seed{seed}",))
