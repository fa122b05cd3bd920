"""Sequence-prediction metrics: perfect predictions, BLEU-4, Levenshtein.

Scores at beam sizes above 1 use the best candidate per instance (highest
BLEU; lowest Levenshtein, chosen independently), and every report records
that choice in its header.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass, field


@dataclass(frozen=True)
class EvalInstance:
    """One reference sequence with the ranked candidates decoded for it."""

    instance_id: str
    reference: tuple[str, ...]
    candidates: tuple[tuple[str, ...], ...]
    beam_size: int

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError(f"{self.instance_id}: beam_size must be positive")
        if not (1 <= len(self.candidates) <= self.beam_size):
            raise ValueError(
                f"{self.instance_id}: expected 1..{self.beam_size} candidates, "
                f"got {len(self.candidates)}"
            )
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError(f"{self.instance_id}: candidates must be distinct")


def _ngram_counts(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidate, reference):
    """BLEU-4 on token sequences.

    Geometric mean of clipped n-gram precisions (n = 1..4) times the brevity
    penalty. Identical sequences score exactly 1.0 and nothing else does. An
    empty candidate, or zero unigram overlap, scores 0. Zero precisions at
    orders 2..4 are smoothed to 1/(2*len(candidate)) since short sequences
    have no higher-order n-grams at all.
    """
    candidate = tuple(candidate)
    reference = tuple(reference)
    if not reference:
        raise ValueError("reference sequence is empty")
    if candidate == reference:
        return 1.0
    if not candidate:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        cand = _ngram_counts(candidate, n)
        total = sum(cand.values())
        matched = sum((cand & _ngram_counts(reference, n)).values()) if total else 0
        precision = matched / total if total else 0.0
        if precision == 0.0:
            if n == 1:
                return 0.0
            precision = 1.0 / (2 * len(candidate))
        log_sum += math.log(precision)
    brevity = (
        1.0
        if len(candidate) >= len(reference)
        else math.exp(1.0 - len(reference) / len(candidate))
    )
    return brevity * math.exp(log_sum / 4.0)


def levenshtein(a, b):
    """Token-level edit distance (insert, delete, substitute), two-row DP."""
    a = tuple(a)
    b = tuple(b)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            current[j] = min(
                previous[j] + 1,  # delete
                current[j - 1] + 1,  # insert
                previous[j - 1] + cost,  # substitute
            )
        previous = current
    return previous[len(b)]


def normalized_levenshtein(candidate, reference):
    """Edit distance divided by the longer length; two empties score 0."""
    candidate = tuple(candidate)
    reference = tuple(reference)
    longest = max(len(candidate), len(reference))
    if longest == 0:
        return 0.0
    return levenshtein(candidate, reference) / longest


@dataclass(frozen=True)
class MetricsRow:
    """Aggregate results for one beam size, mirroring one report table row."""

    beam_size: int
    instance_count: int
    perfect_count: int
    perfect_pct: float
    bleu_mean: float
    bleu_median: float
    bleu_stdev: float
    lev_mean: float
    lev_median: float
    lev_stdev: float

    def as_dict(self):
        return {
            "beam_size": self.beam_size,
            "instances": self.instance_count,
            "perfect_count": self.perfect_count,
            "perfect_pct": self.perfect_pct,
            "bleu": {
                "mean": self.bleu_mean,
                "median": self.bleu_median,
                "stdev": self.bleu_stdev,
            },
            "levenshtein": {
                "mean": self.lev_mean,
                "median": self.lev_median,
                "stdev": self.lev_stdev,
            },
        }


@dataclass
class MetricsReport:
    """Rows per beam size plus the scoring convention used to build them."""

    rows: list[MetricsRow] = field(default_factory=list)
    scoring: str = "best-of-beam"

    def as_dict(self):
        return {
            "schema_version": 1,
            "scoring": self.scoring,
            "rows": [row.as_dict() for row in self.rows],
        }


def _stats(values):
    mean = statistics.fmean(values)
    median = statistics.median(values)
    stdev = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, median, stdev


def evaluate(instances):
    """Score one group of instances sharing a beam size into a MetricsRow."""
    instances = list(instances)
    if not instances:
        raise ValueError("cannot evaluate an empty instance set")
    beam_sizes = {inst.beam_size for inst in instances}
    if len(beam_sizes) != 1:
        raise ValueError(f"instances mix beam sizes {sorted(beam_sizes)}")
    beam_size = beam_sizes.pop()
    perfect = 0
    best_bleu = []
    best_lev = []
    for inst in instances:
        if inst.reference == ():
            raise ValueError(f"{inst.instance_id}: no reference sequence attached")
        if any(cand == inst.reference for cand in inst.candidates):
            perfect += 1
        best_bleu.append(max(bleu4(c, inst.reference) for c in inst.candidates))
        best_lev.append(
            min(normalized_levenshtein(c, inst.reference) for c in inst.candidates)
        )
    bleu_mean, bleu_median, bleu_stdev = _stats(best_bleu)
    lev_mean, lev_median, lev_stdev = _stats(best_lev)
    return MetricsRow(
        beam_size=beam_size,
        instance_count=len(instances),
        perfect_count=perfect,
        perfect_pct=perfect / len(instances),
        bleu_mean=bleu_mean,
        bleu_median=bleu_median,
        bleu_stdev=bleu_stdev,
        lev_mean=lev_mean,
        lev_median=lev_median,
        lev_stdev=lev_stdev,
    )


def build_report(instance_groups):
    """Evaluate several beam-size groups into one report, ascending by beam."""
    rows = [evaluate(group) for group in instance_groups if group]
    rows.sort(key=lambda row: row.beam_size)
    return MetricsReport(rows=rows)


def render_report(report):
    """Render a report as a fixed-width text table."""
    header = (
        f"{'Beam':>4}  {'#':>6}  {'%':>7}  "
        f"{'BLEU mean':>9}  {'median':>7}  {'st.dev.':>7}  "
        f"{'Lev mean':>8}  {'median':>7}  {'st.dev.':>7}"
    )
    lines = [f"scoring: {report.scoring}", header, "-" * len(header)]
    for row in report.rows:
        lines.append(
            f"{row.beam_size:>4}  {row.perfect_count:>6}  "
            f"{row.perfect_pct * 100:>6.2f}%  "
            f"{row.bleu_mean:>9.4f}  {row.bleu_median:>7.4f}  {row.bleu_stdev:>7.4f}  "
            f"{row.lev_mean:>8.4f}  {row.lev_median:>7.4f}  {row.lev_stdev:>7.4f}"
        )
    return "\n".join(lines) + "\n"
