"""Top-level guarantees of the toolkit, one test per guarantee.

Each test prints a single PASS line with its measured numbers once its
assertions hold, so a verbose run reads as a checklist. Tolerances are part
of the contract: exact equality where the docstring says exact, explicit
epsilons everywhere else.
"""

from __future__ import annotations

import itertools
import math
import random
import time

import pytest

from conftest import FIXTURE_DIR, SeededModel
from genjava import random_pair
from oracles import (
    exhaustive_top_k,
    greedy_decode,
    recursive_levenshtein,
    reference_bleu4,
)
from reviewkit.abstraction import (
    ABSTRACT_ID_RE,
    AbstractionMap,
    IdiomSet,
    abstract_pair,
    abstract_source,
    concretize,
)
from reviewkit.comments.heuristics import heuristic_relevance
from reviewkit.comments.model import constant_relevant_precision
from reviewkit.comments.selection import InformationGainSelector, information_gain
from reviewkit.dataset import build_triplets, load_split, split_and_dedup, write_bundle
from reviewkit.decoding import beam_search, copy_baseline
from reviewkit.java.lexer import lex
from reviewkit.java.methods import extract_methods
from reviewkit.metrics import EvalInstance, bleu4, evaluate, normalized_levenshtein
from reviewkit.types import FileVersion, ProjectRef, ReviewComment, ReviewRound

CORPUS_DIR = FIXTURE_DIR / "corpus"


def report_pass(name, detail):
    print(f"ACCEPTANCE {name}: PASS ({detail})")


# ---------------------------------------------------------------------------
# 1. Abstraction round-trip over the bundled method corpus.


def test_abstraction_round_trip_on_bundled_corpus():
    methods = []
    for path in sorted(CORPUS_DIR.glob("*.java")):
        content = path.read_text(encoding="utf-8")
        methods.extend(extract_methods(FileVersion(path.name, content, "r1")))
    assert len(methods) >= 100, "corpus must bundle at least 100 methods"

    started = time.perf_counter()
    mismatches = 0
    for method in methods:
        amap = AbstractionMap()
        abstracted = abstract_source(method.source_text, IdiomSet(), amap)
        recovered = concretize(abstracted.tokens, amap)
        expected = [tok.text for tok in lex(method.source_text)]
        if recovered != expected:
            mismatches += 1
    elapsed = time.perf_counter() - started

    assert mismatches == 0
    assert elapsed < 5.0
    report_pass(
        "abstraction-round-trip",
        f"{len(methods)} methods, 0 mismatches, {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 2. Abstraction consistency across generated before/after pairs.


def test_shared_tokens_get_identical_ids_across_1000_pairs():
    rng = random.Random(1729)
    pairs = 1000
    for _ in range(pairs):
        before, after = random_pair(rng)
        m_s, m_r, amap = abstract_pair(before, after, IdiomSet())

        # One raw token, one ID, on whichever side it appears.
        raw_to_id = {}
        id_to_raw = {}
        for side, source in ((m_s, before), (m_r, after)):
            raw_tokens = [tok.text for tok in lex(source)]
            assert len(raw_tokens) == len(side.tokens)
            for raw, tok in zip(raw_tokens, side.tokens):
                if not ABSTRACT_ID_RE.match(tok.text):
                    continue
                assert raw_to_id.setdefault(raw, tok.text) == tok.text
                assert id_to_raw.setdefault(tok.text, raw) == raw

        # Indices dense per category and ordered by first occurrence over
        # the submitted-then-revised scan.
        first_seen = {}
        order = 0
        for tok in (*m_s.tokens, *m_r.tokens):
            if ABSTRACT_ID_RE.match(tok.text) and tok.text not in first_seen:
                first_seen[tok.text] = order
                order += 1
        by_category = {}
        for abstract_id in first_seen:
            category, index = abstract_id.rsplit("_", 1)
            by_category.setdefault(category, []).append(int(index))
        for category, indices in by_category.items():
            assert sorted(indices) == list(range(1, len(indices) + 1)), category
            seen_order = [first_seen[f"{category}_{i}"] for i in indices]
            assert seen_order == sorted(seen_order), category

    report_pass(
        "pair-consistency",
        f"{pairs} generated pairs, IDs shared, dense, first-occurrence ordered",
    )


# ---------------------------------------------------------------------------
# 3. Metric implementations against independent oracles.


def test_metrics_match_independent_oracles():
    rng = random.Random(8128)
    vocab = ["a", "b", "c", "d", "e", "f"]
    checked = 50
    for _ in range(checked):
        cand = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 12)))
        ref = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 12)))
        assert bleu4(cand, ref) == pytest.approx(reference_bleu4(cand, ref), abs=1e-9)

    alphabet = ("x", "y", "z")
    exhaustive = 0
    for total in range(0, 9):
        for len_a in range(0, total + 1):
            len_b = total - len_a
            for a in itertools.product(alphabet, repeat=len_a):
                for b in itertools.product(alphabet, repeat=len_b):
                    expected = recursive_levenshtein(a, b)
                    maxlen = max(len(a), len(b))
                    want = 0.0 if maxlen == 0 else expected / maxlen
                    assert normalized_levenshtein(a, b) == want
                    exhaustive += 1

    report_pass(
        "metrics-oracle-equivalence",
        f"{checked} random BLEU pairs within 1e-9; "
        f"{exhaustive} exhaustive edit-distance pairs exact",
    )


# ---------------------------------------------------------------------------
# 4. Beam search against exhaustive and greedy oracles.


def test_beam_search_matches_exhaustive_and_greedy_oracles():
    models = 20
    horizon = 3
    for seed in range(models):
        model = SeededModel(seed, vocab=("a", "b"))  # 3 tokens with eos
        inputs = ("src", str(seed))
        assert len(model.vocabulary) == 3

        # 15 complete sequences exist at this horizon; k=15 is full width.
        hypotheses = beam_search(model, inputs, k=15, max_len=horizon)
        oracle = exhaustive_top_k(
            model, inputs, model.vocabulary, model.eos_token, horizon, 15
        )
        assert [(h.body, h.log_prob) for h in hypotheses] == oracle

        best = beam_search(model, inputs, k=1, max_len=horizon)[0]
        greedy_tokens, greedy_lp = greedy_decode(
            model, inputs, model.vocabulary, model.eos_token, horizon
        )
        assert best.body == greedy_tokens
        assert best.log_prob == pytest.approx(greedy_lp, abs=1e-12)

    report_pass(
        "beam-search-oracle-equivalence",
        f"{models} random models, full width == exhaustive, k=1 == greedy",
    )


# ---------------------------------------------------------------------------
# 5 & 8. Adversarial filter soundness and the copy-baseline null result.

PROJECT = ProjectRef("gerrit", "https://g.example", "adversarial")
OPS = ("+", "-", "*", "/", "%", "&", "|")


def _round(change_id, before_body, after_body, comments):
    before = "class T {\n" + before_body + "\n}\n"
    after = "class T {\n" + after_body + "\n}\n"
    return ReviewRound(
        project=PROJECT,
        change_id=change_id,
        round_index=0,
        submitted=(FileVersion("T.java", before, "r1"),),
        comments=tuple(comments),
        revised=(FileVersion("T.java", after, "r2"),),
    )


def _comment(body="Use a instead of b here.", start=4, contributor=False):
    return ReviewComment(
        author_id="author" if contributor else "reviewer",
        is_contributor=contributor,
        path="T.java",
        line_start=start,
        line_end=start,
        body=body,
        round_index=0,
    )


def _clean_bodies(i):
    op1 = OPS[i % len(OPS)]
    op2 = OPS[(i // len(OPS)) % len(OPS)]
    template = (
        "    int f(int a, int b) {\n"
        f"        int t = a {op1} 1;\n"
        f"        return t {op2} OPERAND;\n"
        "    }"
    )
    return template.replace("OPERAND", "b"), template.replace("OPERAND", "a")


def _forge_round(kind, i, change_id):
    """A review round that, were the ``kind`` filter broken, would emit."""
    before, after = _clean_bodies(i)
    if kind == "clean":
        return _round(change_id, before, after, [_comment()])
    if kind == "irrelevant":
        return _round(change_id, before, after, [_comment(body="thanks!")])
    if kind == "contributor":
        return _round(change_id, before, after, [_comment(contributor=True)])
    if kind == "comment_line":
        with_note = before.replace(
            "    int f(int a, int b) {\n",
            "    int f(int a, int b) {\n        // accumulator note\n",
        )
        with_note_after = after.replace(
            "    int f(int a, int b) {\n",
            "    int f(int a, int b) {\n        // accumulator note\n",
        )
        return _round(change_id, with_note, with_note_after, [_comment(start=3)])
    if kind == "equal":
        base = "    int f(int a) {\n        return a;\n    }"
        indented = "    int f(int a) {\n            return a;\n    }"
        return _round(change_id, base, indented, [_comment(start=3)])
    if kind == "too_long":
        decls = "".join(f"        int v{j} = {j};\n" for j in range(25))
        long_before = (
            "    int f(int a, int b) {\n" + decls + "        return v0 + b;\n    }"
        )
        long_after = (
            "    int f(int a, int b) {\n" + decls + "        return v0 + a;\n    }"
        )
        return _round(change_id, long_before, long_after, [_comment(start=28)])
    if kind == "new_ident":
        base = "    int f(int a, int b) {\n        int NAME = a;\n        return NAME + b;\n    }"
        return _round(
            change_id,
            base.replace("NAME", "t"),
            base.replace("NAME", "fresh"),
            [_comment()],
        )
    if kind == "multi":
        return _round(
            change_id,
            before,
            after,
            [_comment(start=3), _comment(body="Also rename t for clarity.", start=4)],
        )
    assert kind == "empty_comment"
    return _round(change_id, before, after, [_comment(body="Would you?")])


VIOLATIONS = (
    "irrelevant",
    "contributor",
    "comment_line",
    "equal",
    "too_long",
    "new_ident",
    "multi",
    "empty_comment",
)


@pytest.fixture(scope="module")
def adversarial_corpus():
    rng = random.Random(31337)
    rounds = []
    kinds = {}
    clean_index = 0
    for i in range(140):
        kind = "clean" if rng.random() < 0.4 else rng.choice(VIOLATIONS)
        if kind == "clean":
            forged = _forge_round(kind, clean_index, f"C{i}")
            clean_index += 1
        else:
            forged = _forge_round(kind, i, f"C{i}")
        rounds.append(forged)
        kinds[f"C{i}"] = kind
    triplets, stats = build_triplets(rounds, idioms=IdiomSet())
    return rounds, kinds, triplets, stats


def test_filter_chain_soundness_under_adversarial_rounds(adversarial_corpus):
    rounds, kinds, triplets, stats = adversarial_corpus
    planted = {kind: 0 for kind in ("clean", *VIOLATIONS)}
    for kind in kinds.values():
        planted[kind] += 1

    # Every forged round produced exactly one candidate.
    assert stats.candidates == len(rounds)

    # No emitted triplet originates from a round built to violate a filter.
    for triplet in triplets:
        assert kinds[triplet.provenance.change_id] == "clean"
    assert len(triplets) == planted["clean"]

    # Emitted triplets satisfy the directly checkable filter properties.
    for triplet in triplets:
        assert triplet.m_s.texts() != triplet.m_r.texts()
        assert triplet.m_s.token_count <= 100
        assert triplet.m_r.token_count <= 100
        assert set(triplet.m_r.abstract_ids()) <= set(triplet.m_s.abstract_ids())
        assert triplet.r_nl

    # Each planted violation landed in its own attrition bucket, and the
    # buckets sum back to the candidate count exactly.
    bucket_of = {
        "irrelevant": "removed_relevance",
        "contributor": "removed_contributor",
        "comment_line": "removed_comment_lines",
        "equal": "removed_equal_after_abstraction",
        "too_long": "removed_too_long",
        "new_ident": "removed_new_identifiers",
        "multi": "removed_multi_comment",
        "empty_comment": "removed_empty_comment",
    }
    for kind, bucket in bucket_of.items():
        assert getattr(stats, bucket) == planted[kind], kind
    assert stats.candidates - stats.total_removed() == stats.emitted == len(triplets)

    # Split sizes are exact up to the floor remainder, which goes to train.
    bundle = split_and_dedup(triplets, seed=7, idiom_set=IdiomSet(), stats=stats)
    n = sum(bundle.counts().values())
    expected_eval = math.floor(n * 0.1)
    expected_test = math.floor(n * 0.1)
    assert bundle.counts() == {
        "train": n - expected_eval - expected_test,
        "eval": expected_eval,
        "test": expected_test,
    }

    report_pass(
        "dataset-filter-soundness",
        f"{len(rounds)} adversarial rounds, {len(triplets)} emitted, "
        f"0 violations, attrition sums exact, splits {bundle.counts()}",
    )


def test_copy_baseline_never_perfect_with_nonzero_bleu(
    adversarial_corpus, tmp_path
):
    _, _, triplets, stats = adversarial_corpus
    bundle = split_and_dedup(triplets, seed=7, idiom_set=IdiomSet(), stats=stats)
    out = write_bundle(bundle, tmp_path / "bundle")

    rows = []
    for split in ("train", "eval", "test"):
        instances = load_split(out, "d_t", split)
        if not instances:
            continue
        for beam_size in (1, 3):
            evaluated = []
            for inst in instances:
                model = copy_baseline(inst.source)
                hypotheses = beam_search(model, inst.source, k=beam_size, max_len=110)
                evaluated.append(
                    EvalInstance(
                        instance_id=inst.instance_id,
                        reference=inst.target,
                        candidates=tuple(h.body for h in hypotheses),
                        beam_size=beam_size,
                    )
                )
            rows.append(evaluate(evaluated))

    assert rows, "bundle produced no scoreable split"
    for row in rows:
        assert row.perfect_count == 0
        assert row.bleu_mean > 0.0

    report_pass(
        "copy-baseline-null-result",
        f"{len(rows)} split/beam rows, 0 perfect everywhere, "
        f"mean BLEU up to {max(r.bleu_mean for r in rows):.3f}",
    )


# ---------------------------------------------------------------------------
# 6. Relevance heuristics and the constant-relevant baseline.


def test_relevance_rules_and_constant_baseline():
    for body in ("nice", "please fix indentation"):
        label, rule_id = heuristic_relevance(body)
        assert label == "irrelevant", body
        assert rule_id is not None

    label, rule_id = heuristic_relevance("please make this method static")
    assert label == "relevant"
    assert rule_id is None

    labels = ["relevant"] * 89 + ["irrelevant"] * 11
    assert constant_relevant_precision(labels) == 0.89

    report_pass(
        "heuristic-filter-fidelity",
        "noise examples irrelevant, actionable example relevant, "
        "constant baseline 0.89 exact",
    )


# ---------------------------------------------------------------------------
# 7. Information gain behavior.


def test_information_gain_properties():
    labels = [1, 1, 1, 1, 0, 0, 0, 0]

    # Label-independent columns carry exactly zero gain.
    assert information_gain([1, 0, 1, 0, 1, 0, 1, 0], labels) == 0.0
    assert information_gain([1, 1, 1, 1, 1, 1, 1, 1], labels) == 0.0

    # Hand-computed gain on an 8-sample fixture: the feature fires on all
    # four positives plus one negative, so H(Y)=1 and
    # H(Y|X) = (5/8)*H(4/5) + (3/8)*0.
    column = [1, 1, 1, 1, 1, 0, 0, 0]
    conditional = (5 / 8) * -(
        (4 / 5) * math.log2(4 / 5) + (1 / 5) * math.log2(1 / 5)
    )
    expected = 1.0 - conditional
    assert information_gain(column, labels) == pytest.approx(expected, abs=1e-9)

    # Features under the 0.01 gain threshold are dropped by the selector.
    X = [[informative, noise] for informative, noise in zip(column, [1, 0, 1, 0, 1, 0, 1, 0])]
    selector = InformationGainSelector(threshold=0.01).fit(X, labels)
    assert list(selector.support_) == [True, False]
    assert selector.transform(X)[0].tolist() == [1]

    report_pass(
        "information-gain",
        f"independent features 0 exactly, fixture gain {expected:.6f} within 1e-9, "
        "sub-threshold feature removed",
    )
