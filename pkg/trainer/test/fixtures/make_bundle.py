"""Regenerate the checked-in dataset bundle used by the trainer tests.

Builds a small corpus of synthetic review rounds through the reviewkit
public API and writes the resulting bundle (d_t, d_p, manifest, idioms)
into ./bundle. Each round differs in its operator pair so the abstracted
token streams stay distinct and survive dedup.

Run from this directory:  python3 make_bundle.py
"""

from __future__ import annotations

from pathlib import Path

from reviewkit.dataset import build_triplets, split_and_dedup, write_bundle
from reviewkit.types import FileVersion, ProjectRef, ReviewComment, ReviewRound

PROJECT = ProjectRef("gerrit", "https://fixtures.example", "trainer-fixture")
OPERATORS = ["+", "-", "*", "/", "%", "&", "|", "^"]
ROUNDS = 49

BEFORE = """class T {{
    int f(int a, int b) {{
        int t = a {op1} 3;
        return t {op2} b;
    }}
}}
"""

AFTER = """class T {{
    int f(int a, int b) {{
        int t = a {op1} 3;
        return t {op2} a;
    }}
}}
"""


def make_round(index: int, op1: str, op2: str) -> ReviewRound:
    comment = ReviewComment(
        author_id="reviewer",
        is_contributor=False,
        path="T.java",
        line_start=4,
        line_end=4,
        body="Use a instead of b here.",
        round_index=0,
    )
    return ReviewRound(
        project=PROJECT,
        change_id=f"I{index}",
        round_index=0,
        submitted=(FileVersion("T.java", BEFORE.format(op1=op1, op2=op2), "r1"),),
        comments=(comment,),
        revised=(FileVersion("T.java", AFTER.format(op1=op1, op2=op2), "r2"),),
    )


def main() -> None:
    pairs = [(a, b) for a in OPERATORS for b in OPERATORS][:ROUNDS]
    rounds = [make_round(i, op1, op2) for i, (op1, op2) in enumerate(pairs)]
    triplets, stats = build_triplets(rounds)
    bundle = split_and_dedup(triplets, seed=13, stats=stats)
    out_dir = Path(__file__).parent / "bundle"
    write_bundle(bundle, out_dir)
    counts = bundle.counts()
    print(f"wrote {out_dir}: {counts}")


if __name__ == "__main__":
    main()
