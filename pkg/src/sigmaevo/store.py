"""Append-only JSON-lines record log keyed by config hash."""
from __future__ import annotations

import hashlib
import json
import os
import threading


def config_key(config) -> str:
    """sha256 of the canonical (sorted, compact) JSON encoding."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=float)
    return hashlib.sha256(blob.encode()).hexdigest()


class SweepStore:
    """One JSON object per line: ``{"key": ..., "record": ...}``.

    A torn final line (process killed mid-write) is skipped on load, so the
    file stays usable after an abrupt stop. Writing an existing key is a no-op.
    """

    def __init__(self, path):
        self.path = os.fspath(path)
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}
        self._load()

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path, "rb") as fh:
            data = fh.read()
        for line in data.split(b"\n"):
            if not line.strip():
                continue
            try:
                item = json.loads(line)
            except json.JSONDecodeError:
                continue
            if isinstance(item, dict) and "key" in item:
                self._records.setdefault(item["key"], item["record"])

    def __len__(self):
        return len(self._records)

    def __contains__(self, config):
        return config_key(config) in self._records

    def get(self, config):
        return self._records.get(config_key(config))

    def put(self, config, record) -> bool:
        """Append ``record`` unless its key is already stored; returns whether it was written."""
        key = config_key(config)
        with self._lock:
            if key in self._records:
                return False
            line = json.dumps({"key": key, "record": record}, sort_keys=True) + "\n"
            # a torn tail from an earlier crash must not swallow the new record
            needs_nl = os.path.exists(self.path) and os.path.getsize(self.path) > 0 and not self._ends_with_newline()
            with open(self.path, "a") as fh:
                if needs_nl:
                    fh.write("\n")
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            self._records[key] = record
            return True

    def _ends_with_newline(self) -> bool:
        with open(self.path, "rb") as fh:
            fh.seek(-1, os.SEEK_END)
            return fh.read(1) == b"\n"

    def records(self):
        return list(self._records.values())
