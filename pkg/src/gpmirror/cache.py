"""Content-addressed report cache with atomic writes.

Entries live in ``<dir>/<key[:2]>/<key>.json`` and hold the key, a sha256
digest of the payload and the payload itself. Anything that fails to parse or
re-verify is renamed aside and treated as a miss, so a damaged cache never
changes a result or an exit code.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
from pathlib import Path
from typing import Any, Optional

log = logging.getLogger(__name__)


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def make_key(command: str, inputs: Any, order: Any, version: str) -> str:
    blob = canonical({"command": command, "inputs": inputs, "order": order, "version": version})
    return hashlib.sha256(blob.encode()).hexdigest()


def _digest(payload: str) -> str:
    return hashlib.sha256(payload.encode()).hexdigest()


class Cache:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> Optional[str]:
        path = self.path(key)
        try:
            raw = path.read_text()
        except FileNotFoundError:
            return None
        except OSError as exc:
            log.warning("cache read failed for %s: %s", key, exc)
            return None
        try:
            entry = json.loads(raw)
            payload = entry["payload"]
            ok = entry["key"] == key and entry["digest"] == _digest(payload)
        except (ValueError, KeyError, TypeError):
            ok = False
        if not ok:
            self.quarantine(path)
            return None
        return payload

    def put(self, key: str, payload: str) -> None:
        path = self.path(key)
        entry = {"key": key, "digest": _digest(payload), "payload": payload,
                 "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
            with os.fdopen(fd, "w") as fh:
                fh.write(json.dumps(entry, sort_keys=True))
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except OSError as exc:
            log.warning("cache write failed for %s: %s", key, exc)

    def quarantine(self, path: Path) -> None:
        target = path.with_name(f"{path.name}.corrupt-{time.time_ns()}")
        try:
            os.replace(path, target)
            log.warning("quarantined corrupt cache entry %s", path.name)
        except OSError:
            pass
