#!/usr/bin/env python
"""
CSV and JSON writers for experiment results.

Writes go to a temporary sibling first and are moved into place under the
output directory's file lock, so concurrent runs never interleave partial
files. Floats are rendered with 17 significant digits and JSON keys are
sorted, which makes reruns with identical inputs byte-identical. Failures
to write surface as OutputError.
"""
from __future__ import annotations
import csv
import io
import json
import os
import math
import time
import logging
import pathlib
import threading
import typing as _t
from contextlib import contextmanager, suppress

import filelock
import numpy as np

try:
    from .errors import OutputError
except ImportError:
    from errors import OutputError

DEFAULT_FLOAT_FORMAT = "%.17g"
LOCK_TIMEOUT = 30
DIRECTORY_LOCK_NAME = ".results"


class ResultStoreLock:
    """
    Serializes writes to one output path.
    Combines an in-process lock with a file lock on <path>.lock.
    """

    def __init__(self, path: pathlib.Path, timeout: float = LOCK_TIMEOUT):
        self._thread_lock = threading.RLock()
        self._lock_file_path = pathlib.Path(f"{path}.lock")
        self._file_lock = filelock.FileLock(str(self._lock_file_path), timeout=timeout)
        self._timeout = timeout
        self._stats = {'write_operations': 0, 'lock_wait_time': 0.0, 'errors': 0}

    @contextmanager
    def write_lock(self):
        """Exclusive lock for the duration of one write."""
        start_time = time.time()
        try:
            with self._thread_lock:
                with self._file_lock.acquire(timeout=self._timeout):
                    self._stats['lock_wait_time'] += time.time() - start_time
                    self._stats['write_operations'] += 1
                    yield
        except filelock.Timeout:
            self._stats['errors'] += 1
            logging.error(f"Timeout acquiring file lock {self._lock_file_path}")
            raise TimeoutError(f"Could not acquire {self._lock_file_path} within {self._timeout} s")

    def get_stats(self) -> dict:
        return dict(self._stats)


def format_value(value: _t.Any, float_format: str = DEFAULT_FLOAT_FORMAT) -> str:
    """Render one CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float_format % value
    if value is None:
        return ""
    return str(value)


def _jsonable(value: _t.Any) -> _t.Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    return value


_LOCKS: _t.Dict[pathlib.Path, ResultStoreLock] = {}
_LOCKS_GUARD = threading.Lock()


def get_directory_lock(directory: pathlib.Path) -> ResultStoreLock:
    """Shared lock for every result file in one output directory."""
    directory = pathlib.Path(directory).resolve()
    with _LOCKS_GUARD:
        lock = _LOCKS.get(directory)
        if lock is None:
            lock = _LOCKS[directory] = ResultStoreLock(directory / DIRECTORY_LOCK_NAME)
        return lock


def _atomic_write(path: pathlib.Path, text: str):
    tmp = path.with_name(f".{path.name}.tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with get_directory_lock(path.parent).write_lock():
            with tmp.open("w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp, path)
    except OSError as e:
        # TimeoutError from the lock lands here too
        logging.error(f"Failed to write {path}: {e}")
        with suppress(OSError):
            tmp.unlink()
        raise OutputError(f"Cannot write {path}: {e}", path=str(path)) from e


def render_csv(rows: _t.Sequence[dict], columns: _t.Optional[_t.Sequence[str]] = None,
               float_format: str = DEFAULT_FLOAT_FORMAT) -> str:
    """Header row plus one line per row; columns default to the first row's keys."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(col), float_format) for col in columns])
    return buffer.getvalue()


def write_csv(path: pathlib.Path, rows: _t.Sequence[dict], columns: _t.Optional[_t.Sequence[str]] = None,
              float_format: str = DEFAULT_FLOAT_FORMAT) -> pathlib.Path:
    path = pathlib.Path(path)
    _atomic_write(path, render_csv(rows, columns, float_format))
    logging.info(f"Wrote {len(rows)} rows to {path}")
    return path


def render_json(data: _t.Any) -> str:
    return json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n"


def write_json(path: pathlib.Path, data: _t.Any) -> pathlib.Path:
    path = pathlib.Path(path)
    _atomic_write(path, render_json(data))
    logging.info(f"Wrote summary to {path}")
    return path


def write_text(path: pathlib.Path, text: str) -> pathlib.Path:
    path = pathlib.Path(path)
    _atomic_write(path, text)
    return path
