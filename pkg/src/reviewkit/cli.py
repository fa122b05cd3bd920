"""Command-line pipeline driver.

Every subcommand reads its inputs from the output directory, holds an
exclusive lock on it while writing, and writes artifacts atomically, so a
rerun with unchanged inputs reproduces the same bytes. Exit codes: 0 on
success, 2 for configuration problems, 3 for a missing input artifact, and
4 for runtime failures.
"""

from __future__ import annotations

import functools
import io
import itertools
import json
import sys
from pathlib import Path

import click

from . import dataset as ds
from .abstraction import IdiomSet
from .comments.heuristics import heuristic_relevance, load_rules
from .config import load_config
from .decoding import beam_search, copy_baseline, load_external_predictions, render_predictions
from .errors import ConfigError, MissingArtifactError, ReviewKitError
from .fsutil import atomic_write_text, output_lock
from .metrics import MetricsReport, MetricsRow, build_report, render_report
from .mining import (
    FixtureTransport,
    fetch_gerrit_rounds,
    fetch_github_rounds,
    load_rounds,
    persist_rounds,
)

DEFAULT_OUT_DIR = "reviewkit-out"
DEFAULT_DECODE_MAX_LEN = 110

EXIT_CONFIG = 2
EXIT_MISSING_ARTIFACT = 3
EXIT_RUNTIME = 4


def common_options(fn):
    @click.option(
        "--config",
        "config_path",
        type=click.Path(path_type=Path),
        default=None,
        help="Pipeline config file (YAML); defaults apply without one.",
    )
    @click.option(
        "--fixture-dir",
        type=click.Path(path_type=Path),
        default=None,
        help="Serve host API responses from canned files instead of HTTP.",
    )
    @click.option("--seed", type=int, default=None, help="Override the config seed.")
    @click.option(
        "--out",
        "out_dir",
        type=click.Path(path_type=Path),
        default=Path(DEFAULT_OUT_DIR),
        show_default=True,
        help="Directory holding all pipeline artifacts.",
    )
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo("config error:", err=True)
            for problem in exc.problems:
                click.echo(f"  - {problem}", err=True)
            sys.exit(EXIT_CONFIG)
        except MissingArtifactError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_MISSING_ARTIFACT)
        except (ReviewKitError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)

    return wrapper


def _require(path, producer):
    if not Path(path).exists():
        raise MissingArtifactError(path, producer)
    return Path(path)


def _load_archive(config, out_dir):
    archive = _require(config.path("archive", out_dir), "mine")
    return load_rounds(archive)


def _test_references(config, out_dir):
    bundle_dir = config.path("bundle", out_dir)
    _require(Path(bundle_dir) / ds.MANIFEST_NAME, "build-dataset")
    instances = ds.load_split(bundle_dir, "d_t", "test")
    return instances, {inst.instance_id: inst.target for inst in instances}


@click.group()
@click.version_option(package_name="reviewkit")
def main():
    """Mine review rounds, build method-change datasets, score predictions."""


@main.command()
@common_options
def mine(config_path, fixture_dir, seed, out_dir):
    """Fetch review rounds from the configured projects into an archive."""
    config = load_config(config_path, seed_override=seed)
    if not config.sources:
        raise ConfigError(["sources: at least one source is required to mine"])
    rounds = []
    for source in config.sources:
        transport = None
        if fixture_dir is not None:
            transport = FixtureTransport(Path(fixture_dir) / source.host_kind)
        fetch = fetch_gerrit_rounds if source.host_kind == "gerrit" else fetch_github_rounds
        rounds.extend(fetch(source, limit=config.limit, transport=transport))
    with output_lock(out_dir):
        buffer = io.StringIO()
        count = persist_rounds(rounds, buffer)
        archive = config.path("archive", out_dir)
        atomic_write_text(archive, buffer.getvalue())
    click.echo(f"mined {count} rounds from {len(config.sources)} source(s) -> {archive}")


@main.command("compute-idioms")
@common_options
def compute_idioms_cmd(config_path, fixture_dir, seed, out_dir):
    """Rank identifiers and literals across the archive; keep the top n."""
    config = load_config(config_path, seed_override=seed)
    rounds = _load_archive(config, out_dir)
    idioms = ds.corpus_idioms(rounds, top_n=config.idiom_top_n)
    with output_lock(out_dir):
        path = config.path("idioms", out_dir)
        atomic_write_text(path, idioms.dump())
    click.echo(f"kept {len(idioms)} idioms (top {config.idiom_top_n}) -> {path}")


@main.command("filter-comments")
@common_options
def filter_comments_cmd(config_path, fixture_dir, seed, out_dir):
    """Label every archived comment with the heuristic relevance verdict."""
    config = load_config(config_path, seed_override=seed)
    rounds = _load_archive(config, out_dir)
    rules = load_rules()
    lines = []
    kept = 0
    for review_round in rounds:
        for comment in review_round.comments:
            label, rule_id = heuristic_relevance(comment.body, rules)
            kept += rule_id is None
            body = " ".join(comment.body.split())
            lines.append(
                "\t".join(
                    (
                        label,
                        rule_id or "-",
                        review_round.change_id,
                        str(review_round.round_index),
                        comment.path,
                        body,
                    )
                )
            )
    with output_lock(out_dir):
        path = config.path("relevance", out_dir)
        atomic_write_text(path, "".join(line + "\n" for line in lines))
    click.echo(f"labelled {len(lines)} comments ({kept} relevant) -> {path}")


@main.command("build-dataset")
@common_options
def build_dataset_cmd(config_path, fixture_dir, seed, out_dir):
    """Assemble, filter, deduplicate, and split the method-change dataset."""
    config = load_config(config_path, seed_override=seed)
    rounds = _load_archive(config, out_dir)
    idioms_path = _require(config.path("idioms", out_dir), "compute-idioms")
    idioms = IdiomSet.parse(idioms_path.read_text(encoding="utf-8"))
    triplets, stats = ds.build_triplets(
        rounds, max_tokens=config.max_tokens, idioms=idioms
    )
    bundle = ds.split_and_dedup(
        triplets,
        ratios=config.split,
        seed=config.seed,
        idiom_set=idioms,
        stats=stats,
    )
    with output_lock(out_dir):
        bundle_dir = ds.write_bundle(bundle, config.path("bundle", out_dir))
    counts = bundle.counts()
    click.echo(
        f"dataset: {stats.candidates} candidates -> {stats.emitted} kept, "
        f"{bundle.dedup_removed} duplicates dropped, splits {counts} -> {bundle_dir}"
    )


@main.command("decode-baseline")
@common_options
@click.option(
    "--max-len",
    type=int,
    default=DEFAULT_DECODE_MAX_LEN,
    show_default=True,
    help="Longest candidate (in tokens) the decoder may emit.",
)
def decode_baseline_cmd(config_path, fixture_dir, seed, out_dir, max_len):
    """Decode the copy baseline over the test split at every beam size."""
    config = load_config(config_path, seed_override=seed)
    instances, _ = _test_references(config, out_dir)
    blocks = {}
    for beam_size in config.beam_sizes:
        block = {}
        for inst in instances:
            model = copy_baseline(inst.source)
            hypotheses = beam_search(model, inst.source, k=beam_size, max_len=max_len)
            block[inst.instance_id] = [h.body for h in hypotheses]
        blocks[beam_size] = block
    with output_lock(out_dir):
        path = config.path("predictions", out_dir)
        atomic_write_text(path, render_predictions(blocks))
    click.echo(
        f"decoded {len(instances)} instances at beams "
        f"{list(config.beam_sizes)} -> {path}"
    )


@main.command()
@common_options
def evaluate(config_path, fixture_dir, seed, out_dir):
    """Score a prediction file against the test split references."""
    config = load_config(config_path, seed_override=seed)
    _, references = _test_references(config, out_dir)
    predictions = _require(config.path("predictions", out_dir), "decode-baseline")
    instances = load_external_predictions(predictions, references)
    groups = [
        list(group)
        for _, group in itertools.groupby(instances, key=lambda i: i.beam_size)
    ]
    report = build_report(groups)
    with output_lock(out_dir):
        path = config.path("report_json", out_dir)
        atomic_write_text(
            path, json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
        )
    click.echo(
        f"evaluated {len(instances)} predictions in {len(groups)} beam group(s) -> {path}"
    )


def _report_from_dict(payload):
    if payload.get("schema_version") != 1:
        raise ReviewKitError(
            f"unsupported report schema_version {payload.get('schema_version')!r}"
        )
    rows = [
        MetricsRow(
            beam_size=row["beam_size"],
            instance_count=row["instances"],
            perfect_count=row["perfect_count"],
            perfect_pct=row["perfect_pct"],
            bleu_mean=row["bleu"]["mean"],
            bleu_median=row["bleu"]["median"],
            bleu_stdev=row["bleu"]["stdev"],
            lev_mean=row["levenshtein"]["mean"],
            lev_median=row["levenshtein"]["median"],
            lev_stdev=row["levenshtein"]["stdev"],
        )
        for row in payload["rows"]
    ]
    return MetricsReport(rows=rows, scoring=payload["scoring"])


@main.command()
@common_options
def report(config_path, fixture_dir, seed, out_dir):
    """Render the evaluation report as a per-beam results table."""
    config = load_config(config_path, seed_override=seed)
    report_path = _require(config.path("report_json", out_dir), "evaluate")
    try:
        payload = json.loads(report_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ReviewKitError(f"unreadable report {report_path}: {exc}") from None
    text = render_report(_report_from_dict(payload))
    with output_lock(out_dir):
        path = config.path("report_txt", out_dir)
        atomic_write_text(path, text)
    click.echo(text, nl=False)


if __name__ == "__main__":
    main()
