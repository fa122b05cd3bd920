/**
 * Synthetic comment-conditional bundle generator.
 *
 * Every source sequence appears once per edit class, so the paired dataset
 * (source -> target, no comment) is ambiguous by construction: a model that
 * ignores the comment can match at most one of the six targets attached to
 * any given source. The comment names the edit, so the triplet dataset is
 * fully determined. This separation is what the conditioning checks in the
 * test suite lean on.
 */

import * as fs from "fs";
import * as path from "path";
import { SPLIT_NAMES, SplitName } from "./bundle";
import { Rng } from "./rng";

const START_MARK = "<START>";
const END_MARK = "<END>";
const CONTENT = ["a", "b", "c", "d", "e", "f", "g", "h"];

interface EditClass {
  comment: string[];
  apply(source: string[]): string[];
}

const EDIT_CLASSES: EditClass[] = [
  ...["v", "w", "x", "y", "z"].map((letter) => ({
    comment: ["add", letter],
    apply: (source: string[]) => [...source, letter],
  })),
  { comment: ["drop", "last"], apply: (source) => source.slice(0, -1) },
];

export interface SyntheticOptions {
  outDir: string;
  seed?: number;
  /** Distinct source sequences per split; each yields one row per edit class. */
  sources?: { train: number; eval: number; test: number };
  minLen?: number;
  maxLen?: number;
}

export interface SyntheticSummary {
  dir: string;
  counts: Record<SplitName, number>;
  vocabularySize: number;
  editClasses: number;
}

function distinctSources(rng: Rng, total: number, minLen: number, maxLen: number): string[][] {
  const seen = new Set<string>();
  const out: string[][] = [];
  while (out.length < total) {
    const len = minLen + rng.int(maxLen - minLen + 1);
    const tokens = Array.from({ length: len }, () => CONTENT[rng.int(CONTENT.length)]);
    const key = tokens.join(" ");
    if (seen.has(key)) {
      continue;
    }
    seen.add(key);
    out.push(tokens);
  }
  return out;
}

export function writeSyntheticBundle(options: SyntheticOptions): SyntheticSummary {
  const seed = options.seed ?? 2024;
  const sizes = options.sources ?? { train: 100, eval: 20, test: 10 };
  const minLen = options.minLen ?? 3;
  const maxLen = options.maxLen ?? 6;
  if (minLen < 2 || maxLen < minLen) {
    throw new RangeError(`bad length range [${minLen}, ${maxLen}]`);
  }

  const rng = new Rng(seed).child("synthetic");
  const total = sizes.train + sizes.eval + sizes.test;
  const sources = distinctSources(rng, total, minLen, maxLen);
  const yieldBySplit: Record<SplitName, string[][]> = {
    train: sources.slice(0, sizes.train),
    eval: sources.slice(sizes.train, sizes.train + sizes.eval),
    test: sources.slice(sizes.train + sizes.eval),
  };

  const dir = options.outDir;
  fs.mkdirSync(path.join(dir, "d_t"), { recursive: true });
  fs.mkdirSync(path.join(dir, "d_p"), { recursive: true });

  const vocabulary = new Set<string>();
  const counts = { train: 0, eval: 0, test: 0 };
  for (const split of SPLIT_NAMES) {
    const tripletLines: string[] = [];
    const pairedLines: string[] = [];
    for (const source of yieldBySplit[split]) {
      const marked = [START_MARK, ...source, END_MARK];
      for (const edit of EDIT_CLASSES) {
        const target = edit.apply(source);
        tripletLines.push([marked.join(" "), edit.comment.join(" "), target.join(" ")].join("\t"));
        pairedLines.push([source.join(" "), target.join(" ")].join("\t"));
        for (const token of [...marked, ...edit.comment, ...target]) {
          vocabulary.add(token);
        }
      }
    }
    counts[split] = tripletLines.length;
    fs.writeFileSync(path.join(dir, "d_t", `${split}.tsv`), tripletLines.join("\n") + "\n", "utf-8");
    fs.writeFileSync(path.join(dir, "d_p", `${split}.tsv`), pairedLines.join("\n") + "\n", "utf-8");
  }

  fs.writeFileSync(path.join(dir, "idioms.txt"), "", "utf-8");
  const manifest = {
    schema_version: 1,
    vocabulary: [...vocabulary].sort(),
    counts,
    seed,
  };
  fs.writeFileSync(path.join(dir, "manifest.json"), JSON.stringify(manifest, null, 2) + "\n", "utf-8");

  return {
    dir,
    counts,
    vocabularySize: vocabulary.size,
    editClasses: EDIT_CLASSES.length,
  };
}
