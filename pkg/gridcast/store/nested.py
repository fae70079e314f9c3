"""Nested record tree reconstruction from flattened key paths."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any


if TYPE_CHECKING:
    from collections.abc import Iterable


def nest_records(items: Iterable[tuple[tuple[str, ...], Any]]) -> Any:
    """Build a nested dict from ``(path, record)`` pairs.

    The empty path is the record stored at the root itself. A path cannot hold a record and
    child records at the same time: model records are leaves, groups are directories.
    """
    pairs = sorted(items, key=lambda item: item[0])
    if not pairs:
        msg = "cannot nest an empty record set"
        raise ValueError(msg)
    if pairs[0][0] == ():
        if len(pairs) > 1:
            msg = "root path holds a record and child records"
            raise ValueError(msg)
        return pairs[0][1]

    tree: dict[str, Any] = {}
    leaves: set[tuple[str, ...]] = set()
    for path, record in pairs:
        node = tree
        for depth, part in enumerate(path[:-1]):
            if path[: depth + 1] in leaves:
                msg = f"path {'/'.join(path[: depth + 1])} holds a record and child records"
                raise ValueError(msg)
            node = node.setdefault(part, {})
        if path[-1] in node:
            msg = f"path {'/'.join(path)} holds a record and child records"
            raise ValueError(msg)
        node[path[-1]] = record
        leaves.add(path)
    return tree
