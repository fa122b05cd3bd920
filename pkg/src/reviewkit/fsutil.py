"""Filesystem helpers: atomic writes and a coarse pipeline lock."""

from __future__ import annotations

import os
from contextlib import contextmanager
from pathlib import Path

from .errors import ReviewKitError


def atomic_write_text(path, text):
    """Write a file via temp-and-rename so readers never see partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.parent / f".{path.name}.tmp"
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


class LockHeldError(ReviewKitError):
    """Another process holds the pipeline lock for this output directory."""

    def __init__(self, lock_path):
        super().__init__(
            f"lock file {lock_path} exists; another run may be writing here "
            "(delete it if that run is dead)"
        )
        self.lock_path = str(lock_path)


@contextmanager
def output_lock(directory):
    """Exclusive advisory lock on one output directory via a lock file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lock_path = directory / ".reviewkit.lock"
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise LockHeldError(lock_path) from None
    try:
        os.write(fd, str(os.getpid()).encode("ascii"))
        os.close(fd)
        yield
    finally:
        try:
            os.unlink(lock_path)
        except FileNotFoundError:
            pass
