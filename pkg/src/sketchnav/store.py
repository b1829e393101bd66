"""JSON-file-backed path database with a load / add / clear / send lifecycle.

The file holds every stored path in drawing-frame coordinates plus the anchor
transform; points are converted to the map frame only when fetched for a send.
Every mutation reloads the file, applies the change, and rewrites the whole
file atomically (write temp, fsync, rename), so a reboot restores the previous
state and a crash mid-write never leaves a hybrid file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

from .drawing import DrawnPath
from .errors import (
    DatabaseFormatError,
    DuplicatePathIdError,
    NothingToSendError,
    PathNotFoundError,
    PersistenceError,
    UnsupportedVersionError,
)
from .geometry import AnchorTransform, Point2D

DB_VERSION = 1


@dataclass(frozen=True)
class PathDatabase:
    """In-memory image of the database file."""

    version: int = DB_VERSION
    anchor: AnchorTransform = AnchorTransform()
    paths: tuple[DrawnPath, ...] = ()

    def __post_init__(self):
        ids = [p.id for p in self.paths]
        if len(ids) != len(set(ids)):
            raise ValueError("path ids must be unique")

    def find(self, path_id: str) -> Optional[DrawnPath]:
        for p in self.paths:
            if p.id == path_id:
                return p
        return None


def serialize(db: PathDatabase) -> str:
    """Render the database in its canonical byte-stable form."""
    doc = {
        "version": db.version,
        "anchor": {
            "x": db.anchor.translation.x,
            "y": db.anchor.translation.y,
            "theta": db.anchor.rotation,
        },
        "paths": [
            {
                "id": p.id,
                "created_at": p.created_at.isoformat(),
                "points": [[pt.x, pt.y] for pt in p.points],
            }
            for p in db.paths
        ],
    }
    return json.dumps(doc, separators=(",", ":"))


def deserialize(text: str) -> PathDatabase:
    """Parse database text; raises DatabaseFormatError with line/column on bad input."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatabaseFormatError(
            f"database does not parse: {exc.msg} (line {exc.lineno} column {exc.colno})"
        ) from exc
    if not isinstance(doc, dict):
        raise DatabaseFormatError("database root must be an object")
    version = doc.get("version")
    if version != DB_VERSION:
        raise UnsupportedVersionError(f"unsupported database version {version!r}")
    try:
        anchor_doc = doc["anchor"]
        anchor = AnchorTransform(
            translation=Point2D(float(anchor_doc["x"]), float(anchor_doc["y"])),
            rotation=float(anchor_doc["theta"]),
        )
        paths = []
        for entry in doc["paths"]:
            paths.append(
                DrawnPath(
                    id=str(entry["id"]),
                    points=tuple(Point2D(float(x), float(y)) for x, y in entry["points"]),
                    created_at=datetime.fromisoformat(entry["created_at"]),
                )
            )
        return PathDatabase(version=version, anchor=anchor, paths=tuple(paths))
    except (KeyError, TypeError, ValueError) as exc:
        raise DatabaseFormatError(f"database failed validation: {exc}") from exc


def load(file: Union[str, Path], anchor: Optional[AnchorTransform] = None) -> PathDatabase:
    """Load a database file; a missing file yields an empty database.

    `anchor` seeds the empty database when the file does not exist yet.
    """
    file = Path(file)
    if not file.exists():
        return PathDatabase(anchor=anchor if anchor is not None else AnchorTransform())
    return deserialize(file.read_text(encoding="utf-8"))


def save_atomic(db: PathDatabase, file: Union[str, Path]) -> None:
    """Write the database via temp-file-then-rename; raises PersistenceError on I/O failure."""
    file = Path(file)
    tmp = file.with_name(file.name + ".tmp")
    data = serialize(db)
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, file)
    except OSError as exc:
        raise PersistenceError(f"could not persist database to {file}: {exc}") from exc


class PathStore:
    """Owns one database file. Single-writer: exactly one session mutates it."""

    def __init__(self, file: Union[str, Path], anchor: Optional[AnchorTransform] = None):
        self.file = Path(file)
        self.db = load(self.file, anchor=anchor)

    def reload(self) -> PathDatabase:
        self.db = load(self.file, anchor=self.db.anchor)
        return self.db

    def add(self, path: DrawnPath) -> PathDatabase:
        """Append a path and persist. The file is reloaded first so an external
        writer's paths survive; on I/O failure the in-memory view is unchanged."""
        disk = load(self.file, anchor=self.db.anchor)
        if disk.find(path.id) is not None:
            raise DuplicatePathIdError(f"path id {path.id!r} already stored")
        updated = replace(disk, paths=disk.paths + (path,))
        save_atomic(updated, self.file)
        self.db = updated
        return updated

    def clear(self) -> PathDatabase:
        """Delete all paths (anchor retained) and persist the empty database."""
        emptied = replace(self.db, paths=())
        save_atomic(emptied, self.file)
        self.db = emptied
        return emptied

    def fetch_for_send(self, path_id: Optional[str] = None) -> list[Point2D]:
        """Return one path's waypoints transformed into the map frame.

        Defaults to the most recently added path; `path_id` overrides.
        """
        disk = load(self.file, anchor=self.db.anchor)
        self.db = disk
        if not disk.paths:
            raise NothingToSendError("the database holds no paths")
        if path_id is None:
            chosen = disk.paths[-1]
        else:
            found = disk.find(path_id)
            if found is None:
                raise PathNotFoundError(f"no stored path with id {path_id!r}")
            chosen = found
        return disk.anchor.apply_all(chosen.points)
