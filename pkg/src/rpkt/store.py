"""Durable session storage: one JSON document per session.

Documents hold a schema version, a state snapshot, and the full event log.
Writes are atomic (temp file then rename).  Loads replay the event log and
refuse the document if the replayed state disagrees with the stored snapshot,
so silent corruption cannot come back as a healthy session.
"""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Callable

from .engine import (
    Session,
    SessionEvent,
    check_invariants,
    replay,
    snapshot,
)
from .errors import (
    CorruptLog,
    InvalidSession,
    NotFound,
    SchemaVersionUnsupported,
    StorageFailure,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_MIGRATIONS: dict[int, Callable[[dict], dict]] = {}

_SESSION_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


def register_migration(from_version: int, migrate: Callable[[dict], dict]) -> None:
    """Register a one-step document upgrade from ``from_version``."""
    _MIGRATIONS[from_version] = migrate


def migrate_document(doc: dict) -> dict:
    """Upgrade a stored document to the current schema, one version at a time."""
    version = doc.get("schema_version")
    if not isinstance(version, int):
        raise StorageFailure("document has no schema_version")
    while version < SCHEMA_VERSION:
        step = _MIGRATIONS.get(version)
        if step is None:
            raise SchemaVersionUnsupported(
                f"no migration from schema version {version} to {version + 1}"
            )
        doc = step(doc)
        new_version = doc.get("schema_version")
        if new_version != version + 1:
            raise StorageFailure(
                f"migration from {version} produced schema_version {new_version!r}"
            )
        version = new_version
    if version > SCHEMA_VERSION:
        raise SchemaVersionUnsupported(
            f"document schema version {version} is newer than supported {SCHEMA_VERSION}"
        )
    return doc


class SessionStore:
    """Directory of session documents, one ``<session_id>.json`` each."""

    def __init__(self, root: str | Path):
        self.root = Path(root).expanduser()
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot create session directory {self.root}: {exc}") from exc

    def path_for(self, session_id: str) -> Path:
        if not _SESSION_ID_RE.match(session_id):
            raise NotFound(f"invalid session id {session_id!r}")
        return self.root / f"{session_id}.json"

    def exists(self, session_id: str) -> bool:
        try:
            return self.path_for(session_id).exists()
        except NotFound:
            return False

    def save(self, session: Session) -> Path:
        """Validate and persist the session atomically."""
        problems = check_invariants(session)
        if problems:
            raise InvalidSession(
                f"refusing to persist session {session.session_id}: " + "; ".join(problems)
            )
        doc = {
            "schema_version": SCHEMA_VERSION,
            "snapshot": snapshot(session),
            "events": [event.as_dict() for event in session.event_log],
        }
        target = self.path_for(session.session_id)
        payload = json.dumps(doc, sort_keys=True, indent=2) + "\n"
        try:
            fd, tmp_name = tempfile.mkstemp(
                dir=self.root, prefix=f".{session.session_id}.", suffix=".tmp"
            )
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(payload)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(tmp_name, target)
            except BaseException:
                try:
                    os.unlink(tmp_name)
                except OSError:
                    pass
                raise
        except OSError as exc:
            raise StorageFailure(f"cannot write session {session.session_id}: {exc}") from exc
        return target

    def load(self, session_id: str) -> Session:
        """Read, migrate, replay, and cross-check one session."""
        path = self.path_for(session_id)
        try:
            raw = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFound(f"no session {session_id!r}") from None
        except OSError as exc:
            raise StorageFailure(f"cannot read session {session_id}: {exc}") from exc
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorruptLog(f"session {session_id} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise CorruptLog(f"session {session_id} document must be an object")

        doc = migrate_document(doc)
        events_raw = doc.get("events")
        if not isinstance(events_raw, list):
            raise CorruptLog(f"session {session_id} has no event list")
        events = [SessionEvent.from_dict(entry) for entry in events_raw]
        session = replay(events)
        replayed = snapshot(session)
        stored = doc.get("snapshot")
        if replayed != stored:
            raise CorruptLog(
                f"session {session_id}: replayed state disagrees with the stored snapshot"
            )
        return session

    def delete(self, session_id: str) -> None:
        path = self.path_for(session_id)
        try:
            path.unlink()
        except FileNotFoundError:
            raise NotFound(f"no session {session_id!r}") from None
        except OSError as exc:
            raise StorageFailure(f"cannot delete session {session_id}: {exc}") from exc

    def list_sessions(self) -> list[dict]:
        """Lightweight listing: id, question, phase, timestamps."""
        out: list[dict] = []
        for path in sorted(self.root.glob("*.json")):
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
                snap = doc["snapshot"]
                out.append(
                    {
                        "session_id": snap["session_id"],
                        "question": snap["question"],
                        "education_level": snap["education_level"],
                        "phase": snap["phase"],
                        "created_at": snap["created_at"],
                        "updated_at": snap["updated_at"],
                    }
                )
            except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
                logger.warning("skipping unreadable session file %s: %s", path.name, exc)
        out.sort(key=lambda item: (-item["updated_at"], item["session_id"]))
        return out
