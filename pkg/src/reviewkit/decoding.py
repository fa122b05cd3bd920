"""Beam-search decoding, the copy baseline, and the prediction wire format.

The decoder works against any stepwise model that exposes a vocabulary
(including its end-of-sequence token) and conditional next-token
log-probabilities. Hypotheses that finish take their beam slot permanently:
search proceeds with the remaining width and stops once all slots are spent,
so beam size 1 is exactly greedy decoding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

from .abstraction import END_TEXT, START_TEXT
from .errors import DatasetError, DecodingError, PredictionFormatError

END_OF_SEQUENCE = "<eos>"

NEG_INF = float("-inf")


class SequenceModel(Protocol):
    """Stepwise conditional sequence model."""

    vocabulary: Sequence[str]
    eos_token: str

    def log_probs(
        self, inputs: Sequence[str], prefix: Sequence[str]
    ) -> Mapping[str, float]:
        """Log-probability of each vocabulary token following the prefix."""
        ...


@dataclass(frozen=True)
class BeamHypothesis:
    """One decoded sequence with its accumulated log-probability.

    A hypothesis finished by end-of-sequence carries that token last;
    one finished by hitting the length cap does not. ``body`` is the
    sequence without the terminator, which is what gets compared against
    references and written to prediction files.
    """

    tokens: tuple[str, ...]
    log_prob: float
    finished: bool
    eos_token: str = END_OF_SEQUENCE

    def sort_key(self):
        return (-self.log_prob, self.tokens)

    @property
    def body(self):
        if self.tokens and self.tokens[-1] == self.eos_token:
            return self.tokens[:-1]
        return self.tokens


def beam_search(model, inputs, k, max_len):
    """Decode up to ``k`` complete sequences, best first.

    Each step expands every live hypothesis with every vocabulary token,
    drops impossible continuations, and keeps the highest-scoring ones by
    (total log-prob, then lexicographic tokens) up to the remaining width.
    A kept hypothesis that emitted end-of-sequence or reached ``max_len``
    tokens is frozen into the result pool and reduces the width for all
    later steps; it can never be displaced. No length normalization.
    """
    if k < 1:
        raise ValueError("beam width k must be at least 1")
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    inputs = tuple(inputs)
    eos = model.eos_token
    live = [BeamHypothesis((), 0.0, False, eos)]
    pool = []
    step = 0
    while live and len(pool) < k:
        grown = []
        for hyp in live:
            try:
                scores = model.log_probs(inputs, hyp.tokens)
            except Exception as exc:
                raise DecodingError(str(exc), step) from exc
            for token in model.vocabulary:
                log_prob = scores.get(token, NEG_INF)
                if log_prob == NEG_INF:
                    continue
                tokens = hyp.tokens + (token,)
                finished = token == eos or len(tokens) >= max_len
                grown.append(
                    BeamHypothesis(tokens, hyp.log_prob + log_prob, finished, eos)
                )
        grown.sort(key=BeamHypothesis.sort_key)
        kept = grown[: k - len(pool)]
        pool.extend(h for h in kept if h.finished)
        live = [h for h in kept if not h.finished]
        step += 1
    pool.sort(key=BeamHypothesis.sort_key)
    return pool


class CopyModel:
    """Deterministic model that replays its input and then stops.

    Span markers are not replayed: they delimit the commented region on the
    input side and never occur in targets, so a fair copy drops them.
    """

    def __init__(self, source_tokens):
        self.source = tuple(
            t for t in source_tokens if t not in (START_TEXT, END_TEXT)
        )
        if END_OF_SEQUENCE in self.source:
            raise ValueError(f"source contains reserved token {END_OF_SEQUENCE!r}")
        self.eos_token = END_OF_SEQUENCE
        seen = dict.fromkeys(self.source)
        self.vocabulary = (*seen, END_OF_SEQUENCE)

    def log_probs(self, inputs, prefix):
        prefix = tuple(prefix)
        if prefix == self.source:
            target = END_OF_SEQUENCE
        elif prefix == self.source[: len(prefix)]:
            target = self.source[len(prefix)]
        else:
            target = END_OF_SEQUENCE
        return {t: (0.0 if t == target else NEG_INF) for t in self.vocabulary}


def copy_baseline(inputs):
    """Model that emits the input tokens then end-of-sequence."""
    return CopyModel(inputs)


_BEAM_HEADER_RE = re.compile(r"^#beam=([0-9]+)$")


def parse_predictions(text):
    """Parse the prediction exchange format into per-beam candidate maps.

    Returns ``{beam_size: {instance_id: [candidates in rank order]}}``.
    Lines read ``instance_id<TAB>rank<TAB>space-separated tokens``; a
    ``#beam=K`` header opens the block for beam size K. Files with no header
    form a single block whose beam size is the largest rank present. Empty
    input parses to an empty map.
    """
    blocks = {}
    current = None  # {instance_id: {rank: tokens}} for the open block
    headerless = None
    saw_header = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _BEAM_HEADER_RE.match(line)
            if not match:
                raise PredictionFormatError(f"unrecognized directive {line!r}", line_no)
            if headerless is not None:
                raise PredictionFormatError(
                    "beam header after headerless prediction lines", line_no
                )
            beam_size = int(match.group(1))
            if beam_size < 1:
                raise PredictionFormatError("beam size must be positive", line_no)
            if beam_size in blocks:
                raise PredictionFormatError(
                    f"duplicate block for beam size {beam_size}", line_no
                )
            blocks[beam_size] = {}
            current = blocks[beam_size]
            saw_header = True
            continue
        fields = raw.rstrip("\r\n").split("\t")
        if len(fields) != 3:
            raise PredictionFormatError(
                f"expected 3 tab-separated fields, got {len(fields)}", line_no
            )
        instance_id, rank_text, token_text = fields
        if not instance_id.strip():
            raise PredictionFormatError("empty instance id", line_no)
        try:
            rank = int(rank_text)
        except ValueError:
            raise PredictionFormatError(
                f"rank {rank_text!r} is not an integer", line_no
            ) from None
        if rank < 1:
            raise PredictionFormatError(f"rank must be >= 1, got {rank}", line_no)
        if current is None:
            if saw_header:
                raise PredictionFormatError(
                    "prediction line outside any beam block", line_no
                )
            headerless = {}
            current = headerless
        ranks = current.setdefault(instance_id.strip(), {})
        if rank in ranks:
            raise PredictionFormatError(
                f"duplicate rank {rank} for instance {instance_id!r}", line_no
            )
        ranks[rank] = (line_no, tuple(token_text.split()))

    if headerless:
        inferred = max(max(ranks) for ranks in headerless.values())
        blocks[inferred] = headerless

    result = {}
    for beam_size, by_instance in blocks.items():
        instances = {}
        for instance_id, ranks in by_instance.items():
            ordered = sorted(ranks)
            last_line = ranks[ordered[-1]][0]
            if ordered != list(range(1, len(ordered) + 1)):
                raise PredictionFormatError(
                    f"instance {instance_id!r} has ranks {ordered}, "
                    f"expected 1..{len(ordered)}",
                    last_line,
                )
            if len(ordered) > beam_size:
                raise PredictionFormatError(
                    f"instance {instance_id!r} has {len(ordered)} candidates "
                    f"for beam size {beam_size}",
                    last_line,
                )
            candidates = []
            seen = set()
            for r in ordered:
                cand_line, tokens = ranks[r]
                if tokens in seen:
                    raise PredictionFormatError(
                        f"instance {instance_id!r} repeats a candidate", cand_line
                    )
                seen.add(tokens)
                candidates.append(tokens)
            instances[instance_id] = candidates
        result[beam_size] = instances
    return result


def load_external_predictions(path, references):
    """Read a prediction file and join it with reference targets.

    ``references`` maps instance id to the reference token sequence. Returns
    evaluation instances for every block in the file, ascending by beam
    size; an empty file yields an empty list.
    """
    with open(path, encoding="utf-8") as handle:
        blocks = parse_predictions(handle.read())
    instances = []
    for beam_size in sorted(blocks):
        instances.extend(
            pair_with_references(blocks[beam_size], references, beam_size)
        )
    return instances


def render_predictions(blocks):
    """Serialize ``{beam_size: {instance_id: [candidates]}}`` to text.

    Blocks are written in ascending beam order, each under its header, and
    the output round-trips through parse_predictions.
    """
    lines = []
    for beam_size in sorted(blocks):
        lines.append(f"#beam={beam_size}")
        for instance_id, candidates in blocks[beam_size].items():
            for rank, tokens in enumerate(candidates, start=1):
                lines.append(f"{instance_id}\t{rank}\t{' '.join(tokens)}")
    return "\n".join(lines) + "\n"


def pair_with_references(candidate_map, references, beam_size):
    """Join one beam block with reference targets into evaluation instances.

    Every predicted instance must have a reference.
    """
    from .metrics import EvalInstance

    instances = []
    for instance_id, candidates in candidate_map.items():
        if instance_id not in references:
            raise DatasetError(
                f"prediction for unknown instance {instance_id!r}: "
                "no matching reference"
            )
        instances.append(
            EvalInstance(
                instance_id=instance_id,
                reference=tuple(references[instance_id]),
                candidates=tuple(tuple(c) for c in candidates),
                beam_size=beam_size,
            )
        )
    return instances
