/**
 * Reader for dataset bundles produced by the pipeline's build-dataset step.
 *
 * Layout: `<dir>/manifest.json`, `<dir>/d_t/{train,eval,test}.tsv` with
 * three tab-separated fields (marked source, comment, target) and
 * `<dir>/d_p/{train,eval,test}.tsv` with two (source, target). Fields hold
 * space-separated tokens. Instance ids are `<split>-<line index>`, matching
 * what the evaluator expects in prediction files.
 */

import * as fs from "fs";
import * as path from "path";
import { z } from "zod";
import { BundleError } from "./errors";

export const SPLIT_NAMES = ["train", "eval", "test"] as const;
export type SplitName = (typeof SPLIT_NAMES)[number];
export type DatasetName = "d_t" | "d_p";

const ManifestSchema = z.object({
  schema_version: z.number(),
  vocabulary: z.array(z.string()),
  counts: z.record(z.string(), z.number()).optional(),
  seed: z.number().optional(),
});

export interface Manifest {
  schemaVersion: number;
  vocabulary: string[];
  counts: Record<string, number>;
  seed: number | null;
}

export interface BundleInstance {
  instanceId: string;
  source: string[];
  /** Reviewer comment tokens; null for d_p rows, which have none. */
  comment: string[] | null;
  target: string[];
}

export function loadManifest(bundleDir: string): Manifest {
  const file = path.join(bundleDir, "manifest.json");
  if (!fs.existsSync(file)) {
    throw new BundleError(`missing manifest ${file}`);
  }
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(file, "utf-8"));
  } catch (err) {
    throw new BundleError(`unreadable manifest ${file}: ${(err as Error).message}`);
  }
  const parsed = ManifestSchema.safeParse(raw);
  if (!parsed.success) {
    throw new BundleError(`malformed manifest ${file}: ${parsed.error.issues[0].message}`);
  }
  if (parsed.data.schema_version !== 1) {
    throw new BundleError(
      `unsupported bundle schema_version ${parsed.data.schema_version}`,
    );
  }
  return {
    schemaVersion: parsed.data.schema_version,
    vocabulary: parsed.data.vocabulary,
    counts: parsed.data.counts ?? {},
    seed: parsed.data.seed ?? null,
  };
}

export function loadSplit(
  bundleDir: string,
  dataset: DatasetName,
  split: SplitName,
): BundleInstance[] {
  const file = path.join(bundleDir, dataset, `${split}.tsv`);
  if (!fs.existsSync(file)) {
    throw new BundleError(`missing dataset file ${file}`);
  }
  const expected = dataset === "d_t" ? 3 : 2;
  const text = fs.readFileSync(file, "utf-8");
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") lines.pop();
  return lines.map((line, index) => {
    const fields = line.split("\t");
    if (fields.length !== expected) {
      throw new BundleError(
        `${file}:${index + 1}: expected ${expected} fields, got ${fields.length}`,
      );
    }
    const tokens = (f: string) => (f === "" ? [] : f.split(" "));
    return {
      instanceId: `${split}-${index}`,
      source: tokens(fields[0]),
      comment: dataset === "d_t" ? tokens(fields[1]) : null,
      target: tokens(fields[fields.length - 1]),
    };
  });
}
