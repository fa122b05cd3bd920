"""Declarative pipeline configuration.

Validation is exhaustive: every problem in the file is reported in one
ConfigError rather than stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlparse

import yaml

from .errors import ConfigError
from .types import ProjectRef

DEFAULT_IDIOM_TOP_N = 300
DEFAULT_MAX_TOKENS = 100
DEFAULT_SPLIT = (0.8, 0.1, 0.1)
DEFAULT_BEAM_SIZES = (1, 3, 5, 10)
DEFAULT_MINE_LIMIT = 25

DEFAULT_PATHS = {
    "archive": "rounds.jsonl",
    "idioms": "idioms.txt",
    "bundle": "bundle",
    "predictions": "predictions.txt",
    "relevance": "relevance.tsv",
    "report_json": "report.json",
    "report_txt": "report.txt",
}

_KNOWN_KEYS = {
    "sources",
    "idiom_top_n",
    "max_tokens",
    "split",
    "beam_sizes",
    "seed",
    "limit",
    "paths",
}


@dataclass
class PipelineConfig:
    sources: tuple[ProjectRef, ...] = ()
    idiom_top_n: int = DEFAULT_IDIOM_TOP_N
    max_tokens: int = DEFAULT_MAX_TOKENS
    split: tuple[float, float, float] = DEFAULT_SPLIT
    beam_sizes: tuple[int, ...] = DEFAULT_BEAM_SIZES
    seed: int = 0
    limit: int = DEFAULT_MINE_LIMIT
    paths: dict = field(default_factory=lambda: dict(DEFAULT_PATHS))

    def path(self, name, out_dir):
        """Artifact path, resolved against the output directory."""
        raw = Path(self.paths[name])
        return raw if raw.is_absolute() else Path(out_dir) / raw


def _check_source(entry, index, problems):
    if not isinstance(entry, dict):
        problems.append(f"sources[{index}]: expected a mapping")
        return None
    host_kind = entry.get("host_kind")
    base_url = entry.get("base_url")
    project_id = entry.get("project_id")
    ok = True
    if host_kind not in ("gerrit", "github"):
        problems.append(
            f"sources[{index}].host_kind: expected gerrit or github, got {host_kind!r}"
        )
        ok = False
    if not isinstance(base_url, str) or not urlparse(base_url).scheme:
        problems.append(f"sources[{index}].base_url: not a valid URL: {base_url!r}")
        ok = False
    if not isinstance(project_id, str) or not project_id:
        problems.append(f"sources[{index}].project_id: must be a non-empty string")
        ok = False
    if not ok:
        return None
    return ProjectRef(host_kind=host_kind, base_url=base_url, project_id=project_id)


def parse_config(data):
    """Validate a raw mapping into a PipelineConfig; lists every problem."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(["config root: expected a mapping"])
    problems = []
    for key in sorted(set(data) - _KNOWN_KEYS):
        problems.append(f"unknown config key {key!r}")

    sources = []
    raw_sources = data.get("sources", [])
    if not isinstance(raw_sources, list):
        problems.append("sources: expected a list")
    else:
        for i, entry in enumerate(raw_sources):
            ref = _check_source(entry, i, problems)
            if ref is not None:
                sources.append(ref)

    def positive_int(key, default):
        value = data.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            problems.append(f"{key}: expected a positive integer, got {value!r}")
            return default
        return value

    idiom_top_n = positive_int("idiom_top_n", DEFAULT_IDIOM_TOP_N)
    max_tokens = positive_int("max_tokens", DEFAULT_MAX_TOKENS)
    limit = positive_int("limit", DEFAULT_MINE_LIMIT)

    split = data.get("split", list(DEFAULT_SPLIT))
    if (
        not isinstance(split, (list, tuple))
        or len(split) != 3
        or not all(isinstance(r, (int, float)) and not isinstance(r, bool) for r in split)
    ):
        problems.append(f"split: expected three numbers, got {split!r}")
        split = DEFAULT_SPLIT
    elif any(r < 0 for r in split) or abs(sum(split) - 1.0) > 1e-9:
        problems.append(f"split: ratios must be non-negative and sum to 1, got {split!r}")
        split = DEFAULT_SPLIT

    beam_sizes = data.get("beam_sizes", list(DEFAULT_BEAM_SIZES))
    if not isinstance(beam_sizes, (list, tuple)) or not beam_sizes:
        problems.append(f"beam_sizes: expected a non-empty list, got {beam_sizes!r}")
        beam_sizes = DEFAULT_BEAM_SIZES
    elif not all(
        isinstance(k, int) and not isinstance(k, bool) and k >= 1 for k in beam_sizes
    ):
        problems.append(f"beam_sizes: every entry must be a positive integer: {beam_sizes!r}")
        beam_sizes = DEFAULT_BEAM_SIZES
    elif list(beam_sizes) != sorted(set(beam_sizes)):
        problems.append(f"beam_sizes: must be strictly ascending: {beam_sizes!r}")
        beam_sizes = DEFAULT_BEAM_SIZES

    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        problems.append(f"seed: expected an integer, got {seed!r}")
        seed = 0

    paths = dict(DEFAULT_PATHS)
    raw_paths = data.get("paths", {})
    if not isinstance(raw_paths, dict):
        problems.append("paths: expected a mapping")
    else:
        for key, value in sorted(raw_paths.items()):
            if key not in DEFAULT_PATHS:
                problems.append(f"paths.{key}: unknown artifact name")
            elif not isinstance(value, str) or not value:
                problems.append(f"paths.{key}: expected a non-empty string")
            else:
                paths[key] = value

    if problems:
        raise ConfigError(problems)
    return PipelineConfig(
        sources=tuple(sources),
        idiom_top_n=idiom_top_n,
        max_tokens=max_tokens,
        split=tuple(float(r) for r in split),
        beam_sizes=tuple(beam_sizes),
        seed=seed,
        limit=limit,
        paths=paths,
    )


def load_config(path=None, seed_override=None):
    """Load a YAML config file; no file means all defaults."""
    if path is None:
        config = parse_config({})
    else:
        path = Path(path)
        if not path.is_file():
            raise ConfigError([f"config file not found: {path}"])
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError([f"config file is not valid YAML: {exc}"]) from None
        config = parse_config(data)
    if seed_override is not None:
        config.seed = seed_override
    return config
