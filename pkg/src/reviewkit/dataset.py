"""Builds the triplet (D_t) and pair (D_p) datasets from review rounds.

One triplet candidate is a (method pairing, review round) unit carrying the
reviewer comments linked to the submitted method. Candidates pass a fixed
filter chain; the attrition stats attribute each drop to the first stage
whose test failed, and always sum back to the candidate count.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .abstraction import (
    END_TEXT,
    START_TEXT,
    AbstractedMethod,
    AbstractionError,
    AbstractionMap,
    IdiomSet,
    abstract_comment,
    abstract_pair,
    compute_idioms,
    normalize_comment,
    span_indices,
)
from .comments.heuristics import heuristic_relevance
from .comments.linking import RELEVANCE_IRRELEVANT, link_comments
from .errors import DatasetError, LexError, MethodExtractionError
from .fsutil import atomic_write_text
from .java.lexer import line_kinds
from .java.methods import extract_methods, match_methods
from .resources import load_stopwords
from .types import AttritionStats, SkipRecord

DEFAULT_MAX_TOKENS = 100
DEFAULT_SPLIT = (0.8, 0.1, 0.1)
SPLIT_NAMES = ("train", "eval", "test")
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class TripletProvenance:
    """Where a triplet came from, plus the span-fallback flag."""

    project_id: str
    change_id: str
    round_index: int
    file_path: str
    signature_key: str
    span_fallback: bool = False

    def sort_key(self):
        return (
            self.project_id,
            self.change_id,
            self.round_index,
            self.file_path,
            self.signature_key,
        )


@dataclass(frozen=True)
class MethodTriplet:
    """One abstracted (submitted method, comment, revised method) instance.

    ``m_s`` holds the unmarked submitted tokens; ``span`` gives the
    commented token range that the markers wrap in the D_t rendering.
    """

    m_s: AbstractedMethod
    m_r: AbstractedMethod
    r_nl: tuple[str, ...]
    map: AbstractionMap
    span: tuple[int, int]
    provenance: TripletProvenance

    def source_tokens(self):
        return tuple(self.m_s.texts())

    def marked_source_tokens(self):
        texts = list(self.m_s.texts())
        first, last = self.span
        return tuple(
            texts[:first] + [START_TEXT] + texts[first : last + 1] + [END_TEXT] + texts[last + 1 :]
        )

    def target_tokens(self):
        return tuple(self.m_r.texts())

    def identity(self):
        """Dedup key: the three rendered D_t fields."""
        return (self.marked_source_tokens(), self.r_nl, self.target_tokens())


def _label_of(result):
    return result[0] if isinstance(result, tuple) else result


def _has_code_line(comment, code_lines):
    return any(
        line in code_lines for line in range(comment.line_start, comment.line_end + 1)
    )


def build_triplets(
    rounds,
    extractor=None,
    abstractor=None,
    relevance_filter=None,
    max_tokens=DEFAULT_MAX_TOKENS,
    idioms=None,
    stopwords=None,
):
    """Assemble triplets from review rounds; returns (triplets, stats).

    The filter chain runs per candidate, in order: comment linking,
    heuristic relevance, contributor-comment removal, code-comment-line
    removal, pair abstraction, abstracted-equality, length, new-identifier,
    singleton, empty-after-normalization. ``comments_unlinked`` counts
    comments that attached to no paired method. Nothing here is fatal:
    extraction and abstraction failures land in the skip log.
    """
    if max_tokens < 1:
        raise DatasetError("max_tokens must be positive")
    if extractor is None:
        extractor = extract_methods
    if relevance_filter is None:
        relevance_filter = heuristic_relevance
    if stopwords is None:
        stopwords = load_stopwords()
    if abstractor is None:
        if idioms is None:
            idioms = corpus_idioms(rounds, extractor)
        abstractor = pair_abstractor(idioms)

    stats = AttritionStats()
    triplets = []
    for review_round in rounds:
        stats.comments_seen += len(review_round.comments)
        if not review_round.comments:
            continue
        after_by_path = {f.path: f for f in review_round.revised}
        comments_by_path = {}
        for comment in review_round.comments:
            comments_by_path.setdefault(comment.path, []).append(comment)

        for path in sorted(comments_by_path):
            comments = comments_by_path[path]
            before_file = next(
                (f for f in review_round.submitted if f.path == path), None
            )
            after_file = after_by_path.get(path)
            if before_file is None or after_file is None:
                stats.comments_unlinked += len(comments)
                continue
            try:
                before_methods = extractor(before_file)
                after_methods = extractor(after_file)
            except MethodExtractionError as exc:
                stats.skips.append(SkipRecord(path=exc.path, reason=str(exc)))
                stats.comments_unlinked += len(comments)
                continue

            pairings, _, _ = match_methods(before_methods, after_methods)
            pairing_index = {id(p.before): i for i, p in enumerate(pairings)}
            linked, unlinked = link_comments(comments, {path: before_methods})
            stats.comments_unlinked += len(unlinked)

            by_pairing = {}
            for item in linked:
                index = pairing_index.get(id(item.method))
                if index is None:
                    stats.comments_unlinked += 1
                    continue
                by_pairing.setdefault(index, []).append(item.comment)

            code_lines, _ = line_kinds(before_file.content)

            for index in sorted(by_pairing):
                pairing = pairings[index]
                linked_comments = by_pairing[index]
                stats.candidates += 1
                survivors = [
                    c
                    for c in linked_comments
                    if _label_of(relevance_filter(c.body)) != RELEVANCE_IRRELEVANT
                ]
                if not survivors:
                    stats.removed_relevance += 1
                    continue
                survivors = [c for c in survivors if not c.is_contributor]
                if not survivors:
                    stats.removed_contributor += 1
                    continue
                survivors = [c for c in survivors if _has_code_line(c, code_lines)]
                if not survivors:
                    stats.removed_comment_lines += 1
                    continue

                try:
                    m_s, m_r, amap = abstractor(pairing.before, pairing.after)
                except (AbstractionError, LexError) as exc:
                    stats.removed_abstraction_error += 1
                    stats.skips.append(
                        SkipRecord(path=before_file.path, reason=str(exc))
                    )
                    continue
                if list(m_s.texts()) == list(m_r.texts()):
                    stats.removed_equal_after_abstraction += 1
                    continue
                if m_s.token_count > max_tokens or m_r.token_count > max_tokens:
                    stats.removed_too_long += 1
                    continue
                if not set(m_r.abstract_ids()) <= set(m_s.abstract_ids()):
                    stats.removed_new_identifiers += 1
                    continue
                if len(survivors) != 1:
                    stats.removed_multi_comment += 1
                    continue
                comment = survivors[0]
                r_nl = normalize_comment(
                    abstract_comment(comment.body, amap), stopwords
                )
                if not r_nl:
                    stats.removed_empty_comment += 1
                    continue
                first, last, fallback = span_indices(
                    m_s, comment.line_start, comment.line_end
                )
                triplets.append(
                    MethodTriplet(
                        m_s=m_s,
                        m_r=m_r,
                        r_nl=tuple(r_nl),
                        map=amap,
                        span=(first, last),
                        provenance=TripletProvenance(
                            project_id=review_round.project.project_id,
                            change_id=review_round.change_id,
                            round_index=review_round.round_index,
                            file_path=path,
                            signature_key=pairing.before.signature_key,
                            span_fallback=fallback,
                        ),
                    )
                )
                stats.emitted += 1

    triplets.sort(key=lambda t: t.provenance.sort_key())
    return triplets, stats


def pair_abstractor(idioms):
    """Abstractor over a fixed idiom set, for build_triplets injection."""

    def run(before_record, after_record):
        return abstract_pair(
            before_record.source_text,
            after_record.source_text,
            idioms,
            before_offset=before_record.line_start - 1,
            after_offset=after_record.line_start - 1,
        )

    return run


def corpus_idioms(rounds, extractor=None, top_n=300):
    """Idioms computed over every extractable method in the rounds."""
    if extractor is None:
        extractor = extract_methods
    records = []
    for review_round in rounds:
        for file_version in (*review_round.submitted, *review_round.revised):
            try:
                records.extend(extractor(file_version))
            except MethodExtractionError:
                continue
    if not records:
        raise AbstractionError("no extractable methods in the given rounds")
    return compute_idioms(records, top_n)


@dataclass
class DatasetBundle:
    """Split triplets plus everything needed to reproduce and consume them."""

    splits: dict
    idiom_set: IdiomSet
    stats: AttritionStats
    seed: int
    ratios: tuple
    dedup_removed: int = 0

    @property
    def triplets(self):
        return self.splits

    @property
    def pairs(self):
        """D_p view: same instances, comment and markers dropped."""
        return {
            name: [(t.source_tokens(), t.target_tokens()) for t in items]
            for name, items in self.splits.items()
        }

    def counts(self):
        return {name: len(items) for name, items in self.splits.items()}


def split_and_dedup(triplets, ratios=DEFAULT_SPLIT, seed=0, idiom_set=None, stats=None):
    """Deduplicate, then split deterministically into train/eval/test.

    Duplicates (same marked source, comment, target) collapse to their first
    occurrence before splitting. Eval and test sizes are floored; the
    remainder goes to train. Raises on fewer than 3 unique instances.
    """
    if len(ratios) != 3:
        raise DatasetError("ratios must have exactly three entries")
    if any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise DatasetError(f"split ratios must be non-negative and sum to 1: {ratios}")

    unique = []
    seen = set()
    for triplet in triplets:
        key = triplet.identity()
        if key in seen:
            continue
        seen.add(key)
        unique.append(triplet)
    dedup_removed = len(triplets) - len(unique)

    n = len(unique)
    if n < 3:
        raise DatasetError(f"need at least 3 unique instances to split, got {n}")

    n_eval = int(n * ratios[1])
    n_test = int(n * ratios[2])
    order = random.Random(seed).sample(range(n), n)
    eval_ids = sorted(order[:n_eval])
    test_ids = sorted(order[n_eval : n_eval + n_test])
    train_ids = sorted(order[n_eval + n_test :])
    splits = {
        "train": [unique[i] for i in train_ids],
        "eval": [unique[i] for i in eval_ids],
        "test": [unique[i] for i in test_ids],
    }
    return DatasetBundle(
        splits=splits,
        idiom_set=idiom_set if idiom_set is not None else IdiomSet(),
        stats=stats if stats is not None else AttritionStats(),
        seed=seed,
        ratios=tuple(ratios),
        dedup_removed=dedup_removed,
    )


def instance_id(split_name, index):
    """Stable instance identifier shared with prediction files."""
    return f"{split_name}-{index}"


def _dataset_vocabulary(splits):
    vocab = set()
    for items in splits.values():
        for t in items:
            vocab.update(t.marked_source_tokens())
            vocab.update(t.r_nl)
            vocab.update(t.target_tokens())
    return sorted(vocab)


def write_bundle(bundle, out_dir):
    """Write D_t, D_p, idioms, and the manifest under one directory.

    Same bundle, same bytes: file contents are pure functions of the bundle.
    """
    out_dir = Path(out_dir)
    for name in SPLIT_NAMES:
        items = bundle.splits[name]
        d_t_lines = [
            "\t".join(
                (
                    " ".join(t.marked_source_tokens()),
                    " ".join(t.r_nl),
                    " ".join(t.target_tokens()),
                )
            )
            for t in items
        ]
        d_p_lines = [
            "\t".join((" ".join(t.source_tokens()), " ".join(t.target_tokens())))
            for t in items
        ]
        atomic_write_text(out_dir / "d_t" / f"{name}.tsv", "".join(l + "\n" for l in d_t_lines))
        atomic_write_text(out_dir / "d_p" / f"{name}.tsv", "".join(l + "\n" for l in d_p_lines))
    atomic_write_text(out_dir / "idioms.txt", bundle.idiom_set.dump())
    manifest = {
        "schema_version": 1,
        "seed": bundle.seed,
        "ratios": list(bundle.ratios),
        "counts": bundle.counts(),
        "dedup_removed": bundle.dedup_removed,
        "idiom_digest": bundle.idiom_set.digest(),
        "attrition": bundle.stats.as_dict(),
        "skips": [s.as_dict() for s in bundle.stats.skips],
        "vocabulary": _dataset_vocabulary(bundle.splits),
    }
    atomic_write_text(
        out_dir / MANIFEST_NAME, json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    return out_dir


@dataclass(frozen=True)
class LoadedInstance:
    """One dataset line as token tuples, keyed like prediction files."""

    instance_id: str
    source: tuple[str, ...]
    comment: tuple[str, ...] | None
    target: tuple[str, ...]


def load_split(out_dir, dataset, split_name):
    """Read one split of d_t or d_p back as LoadedInstances."""
    if dataset not in ("d_t", "d_p"):
        raise DatasetError(f"dataset must be d_t or d_p, not {dataset!r}")
    if split_name not in SPLIT_NAMES:
        raise DatasetError(f"unknown split {split_name!r}")
    path = Path(out_dir) / dataset / f"{split_name}.tsv"
    if not path.is_file():
        raise DatasetError(f"missing dataset file {path}")
    expected_fields = 3 if dataset == "d_t" else 2
    instances = []
    for index, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
        fields = line.split("\t")
        if len(fields) != expected_fields:
            raise DatasetError(
                f"{path}:{index + 1}: expected {expected_fields} fields, "
                f"got {len(fields)}"
            )
        source = tuple(fields[0].split())
        target = tuple(fields[-1].split())
        comment = tuple(fields[1].split()) if dataset == "d_t" else None
        instances.append(
            LoadedInstance(
                instance_id=instance_id(split_name, index),
                source=source,
                comment=comment,
                target=target,
            )
        )
    return instances


def load_manifest(out_dir):
    path = Path(out_dir) / MANIFEST_NAME
    if not path.is_file():
        raise DatasetError(f"missing manifest {path}")
    manifest = json.loads(path.read_text(encoding="utf-8"))
    if manifest.get("schema_version") != 1:
        raise DatasetError(
            f"unsupported bundle schema_version {manifest.get('schema_version')!r}"
        )
    return manifest
