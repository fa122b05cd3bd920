import * as fs from "fs";
import * as path from "path";
import { afterEach, describe, expect, it } from "vitest";
import { loadManifest, loadSplit, SPLIT_NAMES } from "../src/bundle";
import { BundleError } from "../src/errors";
import { FIXTURE_BUNDLE, makeTmpDir, removeDir, writeTestBundle } from "./helpers";

const cleanup: string[] = [];
afterEach(() => {
  while (cleanup.length) removeDir(cleanup.pop() as string);
});

function tmp(): string {
  const dir = makeTmpDir("bundle-test");
  cleanup.push(dir);
  return dir;
}

describe("loadManifest", () => {
  it("reads version, vocabulary, counts and seed", () => {
    const dir = writeTestBundle(tmp(), {
      vocabulary: ["a", "b"],
      seed: 77,
      rows: { train: [{ source: ["a"], target: ["b"] }] },
    });
    const manifest = loadManifest(dir);
    expect(manifest.schemaVersion).toBe(1);
    expect(manifest.vocabulary).toEqual(["a", "b"]);
    expect(manifest.counts.train).toBe(1);
    expect(manifest.seed).toBe(77);
  });

  it("fails clearly when the manifest is missing", () => {
    const dir = tmp();
    expect(() => loadManifest(dir)).toThrow(BundleError);
    expect(() => loadManifest(dir)).toThrow(
      `missing manifest ${path.join(dir, "manifest.json")}`,
    );
  });

  it("fails on unparseable JSON", () => {
    const dir = tmp();
    fs.writeFileSync(path.join(dir, "manifest.json"), "{nope");
    expect(() => loadManifest(dir)).toThrow(/unreadable manifest/);
  });

  it("fails on schema violations", () => {
    const dir = tmp();
    fs.writeFileSync(
      path.join(dir, "manifest.json"),
      JSON.stringify({ schema_version: 1, vocabulary: "not-a-list" }),
    );
    expect(() => loadManifest(dir)).toThrow(/malformed manifest/);
  });

  it("rejects unknown schema versions", () => {
    const dir = writeTestBundle(tmp(), { vocabulary: ["a"], rows: {}, schemaVersion: 2 });
    expect(() => loadManifest(dir)).toThrow("unsupported bundle schema_version 2");
  });

  it("defaults counts and seed when absent", () => {
    const dir = tmp();
    fs.writeFileSync(
      path.join(dir, "manifest.json"),
      JSON.stringify({ schema_version: 1, vocabulary: ["a"] }),
    );
    const manifest = loadManifest(dir);
    expect(manifest.counts).toEqual({});
    expect(manifest.seed).toBeNull();
  });
});

describe("loadSplit", () => {
  it("parses d_t rows into source, comment and target", () => {
    const dir = writeTestBundle(tmp(), {
      vocabulary: ["a", "b", "c", "fix", "this"],
      rows: {
        train: [
          { source: ["a", "b"], comment: ["fix", "this"], target: ["a", "c"] },
          { source: ["b"], comment: ["fix"], target: ["c"] },
        ],
      },
    });
    const rows = loadSplit(dir, "d_t", "train");
    expect(rows).toHaveLength(2);
    expect(rows[0]).toEqual({
      instanceId: "train-0",
      source: ["a", "b"],
      comment: ["fix", "this"],
      target: ["a", "c"],
    });
    expect(rows[1].instanceId).toBe("train-1");
  });

  it("parses d_p rows without a comment", () => {
    const dir = writeTestBundle(tmp(), {
      vocabulary: ["a", "b"],
      rows: { eval: [{ source: ["a"], target: ["b"] }] },
    });
    const rows = loadSplit(dir, "d_p", "eval");
    expect(rows[0].comment).toBeNull();
    expect(rows[0].instanceId).toBe("eval-0");
  });

  it("treats an empty field as an empty token list", () => {
    const dir = writeTestBundle(tmp(), {
      vocabulary: ["a"],
      rows: { test: [{ source: ["a"], comment: [], target: [] }] },
    });
    const rows = loadSplit(dir, "d_t", "test");
    expect(rows[0].comment).toEqual([]);
    expect(rows[0].target).toEqual([]);
  });

  it("an empty file yields no instances", () => {
    const dir = writeTestBundle(tmp(), { vocabulary: ["a"], rows: {} });
    for (const split of SPLIT_NAMES) {
      expect(loadSplit(dir, "d_t", split)).toEqual([]);
      expect(loadSplit(dir, "d_p", split)).toEqual([]);
    }
  });

  it("fails clearly when the file is missing", () => {
    const dir = tmp();
    expect(() => loadSplit(dir, "d_t", "train")).toThrow(
      `missing dataset file ${path.join(dir, "d_t", "train.tsv")}`,
    );
  });

  it("reports the line number on a field count mismatch", () => {
    const dir = writeTestBundle(tmp(), {
      vocabulary: ["a"],
      rows: { train: [{ source: ["a"], target: ["a"] }] },
    });
    const file = path.join(dir, "d_t", "train.tsv");
    fs.appendFileSync(file, "only-one-field\n");
    expect(() => loadSplit(dir, "d_t", "train")).toThrow(
      `${file}:2: expected 3 fields, got 1`,
    );
    const dpFile = path.join(dir, "d_p", "train.tsv");
    fs.writeFileSync(dpFile, "a\tb\tc\n");
    expect(() => loadSplit(dir, "d_p", "train")).toThrow(
      `${dpFile}:1: expected 2 fields, got 3`,
    );
  });
});

describe("checked-in pipeline bundle", () => {
  it("loads and is internally consistent", () => {
    const manifest = loadManifest(FIXTURE_BUNDLE);
    expect(manifest.schemaVersion).toBe(1);
    expect(manifest.vocabulary.length).toBeGreaterThan(0);
    const vocabSet = new Set(manifest.vocabulary);
    for (const split of SPLIT_NAMES) {
      const dt = loadSplit(FIXTURE_BUNDLE, "d_t", split);
      const dp = loadSplit(FIXTURE_BUNDLE, "d_p", split);
      expect(dt.length).toBe(manifest.counts[split]);
      expect(dp.length).toBe(manifest.counts[split]);
      for (const row of dt) {
        expect(row.comment).not.toBeNull();
        expect(row.source.length).toBeGreaterThan(0);
        expect(row.target.length).toBeGreaterThan(0);
        for (const tok of [...row.source, ...(row.comment as string[]), ...row.target]) {
          expect(vocabSet.has(tok)).toBe(true);
        }
      }
      for (const row of dp) expect(row.comment).toBeNull();
    }
  });

  it("marks the changed span in d_t sources", () => {
    const dt = loadSplit(FIXTURE_BUNDLE, "d_t", "train");
    for (const row of dt) {
      expect(row.source.filter((t) => t === "<START>")).toHaveLength(1);
      expect(row.source.filter((t) => t === "<END>")).toHaveLength(1);
      expect(row.source.indexOf("<START>")).toBeLessThan(row.source.indexOf("<END>"));
    }
  });
});
