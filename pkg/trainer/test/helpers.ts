/** Shared scaffolding for the test suite: temp dirs and hand-rolled bundles. */

import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { SPLIT_NAMES, SplitName } from "../src/bundle";

export function makeTmpDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `${prefix}-`));
}

export function removeDir(dir: string): void {
  fs.rmSync(dir, { recursive: true, force: true });
}

export interface TestRow {
  source: string[];
  comment?: string[];
  target: string[];
}

export interface TestBundleSpec {
  vocabulary: string[];
  rows: Partial<Record<SplitName, TestRow[]>>;
  seed?: number;
  schemaVersion?: number;
}

/**
 * Write a complete bundle directory from explicit rows. Both datasets are
 * emitted from the same rows; d_p simply drops the comment field.
 */
export function writeTestBundle(dir: string, spec: TestBundleSpec): string {
  fs.mkdirSync(path.join(dir, "d_t"), { recursive: true });
  fs.mkdirSync(path.join(dir, "d_p"), { recursive: true });
  const counts: Record<string, number> = {};
  for (const split of SPLIT_NAMES) {
    const rows = spec.rows[split] ?? [];
    counts[split] = rows.length;
    const dt = rows
      .map((r) => [r.source.join(" "), (r.comment ?? []).join(" "), r.target.join(" ")].join("\t"))
      .join("\n");
    const dp = rows
      .map((r) => [r.source.join(" "), r.target.join(" ")].join("\t"))
      .join("\n");
    fs.writeFileSync(path.join(dir, "d_t", `${split}.tsv`), dt === "" ? "" : dt + "\n");
    fs.writeFileSync(path.join(dir, "d_p", `${split}.tsv`), dp === "" ? "" : dp + "\n");
  }
  fs.writeFileSync(path.join(dir, "idioms.txt"), "");
  const manifest = {
    schema_version: spec.schemaVersion ?? 1,
    vocabulary: spec.vocabulary,
    counts,
    seed: spec.seed ?? 0,
  };
  fs.writeFileSync(path.join(dir, "manifest.json"), JSON.stringify(manifest, null, 2) + "\n");
  return dir;
}

/** Checked-in bundle built by the review pipeline itself (see fixtures/). */
export const FIXTURE_BUNDLE = path.join(__dirname, "fixtures", "bundle");
