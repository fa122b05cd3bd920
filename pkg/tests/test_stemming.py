"""Suffix-stripping stemmer, step by step and end to end."""

from __future__ import annotations

import pytest

from reviewkit.comments.stemming import (
    _apply_group,
    _STEP2,
    _ends_cvc,
    _ends_double_consonant,
    _measure,
    _step1a,
    _step1b,
    _step1c,
    _step5a,
    _step5b,
    porter_stem,
)


class TestPrimitives:
    @pytest.mark.parametrize(
        "word,m",
        [("tr", 0), ("ee", 0), ("tree", 0), ("y", 0), ("by", 0),
         ("trouble", 1), ("oats", 1), ("trees", 1), ("ivy", 1),
         ("troubles", 2), ("private", 2), ("oaten", 2), ("orrery", 2)],
    )
    def test_measure_reference_values(self, word, m):
        assert _measure(word) == m

    def test_y_is_contextual(self):
        # y after a consonant acts as a vowel, after a vowel as a consonant
        assert _measure("toy") == 1
        assert _measure("syzygy") == 2

    def test_cvc_excludes_w_x_y_endings(self):
        assert _ends_cvc("hop")
        assert not _ends_cvc("bow")
        assert not _ends_cvc("box")
        assert not _ends_cvc("say")

    def test_double_consonant(self):
        assert _ends_double_consonant("hiss")
        assert not _ends_double_consonant("his")
        assert not _ends_double_consonant("ee")


class TestSteps:
    def test_step1a(self):
        assert _step1a("caresses") == "caress"
        assert _step1a("ponies") == "poni"
        assert _step1a("caress") == "caress"
        assert _step1a("cats") == "cat"

    def test_step1b_eed_needs_measure(self):
        assert _step1b("feed") == "feed"
        assert _step1b("agreed") == "agree"

    def test_step1b_cleanup(self):
        assert _step1b("conflated") == "conflate"
        assert _step1b("hopping") == "hop"
        assert _step1b("falling") == "fall"
        assert _step1b("fizzed") == "fizz"
        assert _step1b("failing") == "fail"
        assert _step1b("filing") == "file"

    def test_step1b_needs_vowel_in_stem(self):
        assert _step1b("bled") == "bled"
        assert _step1b("sing") == "sing"

    def test_step1c(self):
        assert _step1c("happy") == "happi"
        assert _step1c("sky") == "sky"

    def test_group_consumes_longest_suffix_even_if_condition_fails(self):
        # 'ation' matches ahead of shorter candidates; measure gates rewrite
        assert _apply_group("predication", _STEP2) == "predicate"

    def test_step5a(self):
        assert _step5a("probate") == "probat"
        assert _step5a("rate") == "rate"
        assert _step5a("cease") == "ceas"

    def test_step5b(self):
        assert _step5b("controll") == "control"
        assert _step5b("roll") == "roll"


# Full-run pairs checked against the reference implementation's demo
# vocabulary. Note "agreed": step 1b leaves "agree", then step 5a strips
# the final e (m=1, stem not ending cvc), so the stem is "agre".
REFERENCE = {
    "caresses": "caress", "ponies": "poni", "ties": "ti", "cats": "cat",
    "feed": "feed", "agreed": "agre", "plastered": "plaster", "bled": "bled",
    "motoring": "motor", "sing": "sing", "sized": "size", "hopping": "hop",
    "tanned": "tan", "hissing": "hiss", "happy": "happi", "sky": "sky",
    "relational": "relat", "conditional": "condit", "rational": "ration",
    "valenci": "valenc", "hesitanci": "hesit", "digitizer": "digit",
    "conformabli": "conform", "radicalli": "radic", "differentli": "differ",
    "vileli": "vile", "analogousli": "analog", "vietnamization": "vietnam",
    "predication": "predic", "operator": "oper", "feudalism": "feudal",
    "decisiveness": "decis", "hopefulness": "hope", "callousness": "callous",
    "formaliti": "formal", "sensitiviti": "sensit", "sensibiliti": "sensibl",
    "triplicate": "triplic", "formative": "form", "formalize": "formal",
    "electriciti": "electr", "electrical": "electr", "hopeful": "hope",
    "goodness": "good", "revival": "reviv", "allowance": "allow",
    "inference": "infer", "airliner": "airlin", "gyroscopic": "gyroscop",
    "adjustable": "adjust", "defensible": "defens", "irritant": "irrit",
    "replacement": "replac", "adjustment": "adjust", "dependent": "depend",
    "adoption": "adopt", "homologou": "homolog", "communism": "commun",
    "activate": "activ", "angulariti": "angular", "homologous": "homolog",
    "effective": "effect", "bowdlerize": "bowdler", "probate": "probat",
    "rate": "rate", "cease": "ceas", "controll": "control", "roll": "roll",
    "running": "run", "runs": "run", "runner": "runner",
}


class TestFullRun:
    @pytest.mark.parametrize("word,stem", sorted(REFERENCE.items()))
    def test_reference_vocabulary(self, word, stem):
        assert porter_stem(word) == stem

    def test_short_words_untouched(self):
        assert porter_stem("as") == "as"
        assert porter_stem("is") == "is"
        assert porter_stem("a") == "a"

    def test_idempotent_on_its_own_output(self):
        """Stems of this vocabulary are fixed points."""
        for stem in set(REFERENCE.values()):
            assert porter_stem(porter_stem(stem)) == porter_stem(stem)
