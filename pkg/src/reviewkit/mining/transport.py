"""HTTP and fixture-replay transports shared by the review API clients.

Each client talks to a Transport rather than the network directly, so any
run can be replayed from a directory of canned responses. Fixture mode is
not a test hack but a supported execution mode (`--fixture-dir`).
"""

from __future__ import annotations

import os
import re
import time
from pathlib import Path
from typing import Mapping, Protocol
from urllib.parse import urlencode

import requests

from ..errors import FetchError

RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})


class Transport(Protocol):
    """Read-only GET access to a review API."""

    def get(self, path: str, params: Mapping | None = None) -> bytes:
        """Fetch one resource; raises FetchError on failure.

        A FetchError with status 404 means the resource does not exist,
        which callers may treat as absence rather than failure.
        """
        ...


class HttpTransport:
    """requests-backed transport with bounded backoff on throttling.

    Sends ``Authorization: Bearer <token>`` when ``token_env`` names a set
    environment variable. Retries 429 and 5xx responses and connection
    errors up to ``max_retries`` times with doubling sleeps, honoring a
    numeric Retry-After header when present.
    """

    def __init__(
        self,
        base_url,
        token_env=None,
        max_retries=3,
        backoff_base=0.5,
        session=None,
        sleeper=time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.token_env = token_env
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.session = session or requests.Session()
        self.sleeper = sleeper

    def _headers(self):
        headers = {"Accept": "application/json"}
        if self.token_env and os.environ.get(self.token_env):
            headers["Authorization"] = f"Bearer {os.environ[self.token_env]}"
        return headers

    def get(self, path, params=None):
        url = f"{self.base_url}/{path.lstrip('/')}"
        last_error = None
        for attempt in range(self.max_retries + 1):
            try:
                response = self.session.get(
                    url, params=params, headers=self._headers(), timeout=30
                )
            except requests.RequestException as exc:
                last_error = FetchError(f"GET {url}: {exc}", retryable=True)
            else:
                if response.status_code == 200:
                    return response.content
                error = FetchError(
                    f"GET {url}: HTTP {response.status_code}",
                    retryable=response.status_code in RETRYABLE_STATUSES,
                    status=response.status_code,
                )
                if not error.retryable:
                    raise error
                last_error = error
                retry_after = response.headers.get("Retry-After")
                if retry_after and retry_after.isdigit():
                    self.sleeper(int(retry_after))
                    continue
            if attempt < self.max_retries:
                self.sleeper(self.backoff_base * (2**attempt))
        raise last_error


_UNSAFE_RE = re.compile(r"[^A-Za-z0-9._-]")


def fixture_name(path, params=None):
    """Deterministic file name for one request: path?query, sanitized."""
    key = path.lstrip("/")
    if params:
        key += "?" + urlencode(params, doseq=True)
    return _UNSAFE_RE.sub("_", key)


class FixtureTransport:
    """Replays API responses from files named after the request."""

    def __init__(self, fixture_dir):
        self.fixture_dir = Path(fixture_dir)

    def get(self, path, params=None):
        target = self.fixture_dir / fixture_name(path, params)
        if not target.is_file():
            raise FetchError(
                f"no fixture for GET {path}: {target}", retryable=False, status=404
            )
        return target.read_bytes()

    def write(self, path, params, body):
        """Record a canned response; used by fixture generators."""
        target = self.fixture_dir / fixture_name(path, params)
        target.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(body, str):
            body = body.encode("utf-8")
        target.write_bytes(body)
        return target
