/**
 * End-to-end acceptance: a two-encoder model trained on the synthetic
 * comment-conditional task must read the comment (eval exact-match well
 * above the structural ceiling of a source-only model), gradients must
 * match finite differences, and exported beams must round-trip through
 * the review pipeline's evaluate command without format errors.
 */

import { spawnSync } from "child_process";
import * as fs from "fs";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ensureBackend } from "../src/backend";
import { TOY_CONFIG } from "../src/config";
import { exportPredictions } from "../src/exportPredictions";
import { gradientCheck } from "../src/gradcheck";
import { writeSyntheticBundle } from "../src/synthetic";
import { Checkpoint, train } from "../src/train";
import { makeTmpDir, removeDir } from "./helpers";

const WALL_BUDGET_MS = 15 * 60 * 1000;
const TRAIN_STEPS = 400;
const SEED = 11;

let startedAt = 0;
let outDir: string;
let bundleDir: string;
let twoEncoder: Checkpoint | null = null;
let evalSize = 0;

beforeAll(async () => {
  startedAt = Date.now();
  await ensureBackend();
  outDir = makeTmpDir("acceptance");
  bundleDir = path.join(outDir, "bundle");
  writeSyntheticBundle({ outDir: bundleDir }); // 600/120/60 rows, seed 2024
});

afterAll(() => {
  twoEncoder?.dispose();
  removeDir(outDir);
});

describe("acceptance", () => {
  it(
    "backpropagation matches finite differences for both model kinds",
    async () => {
      const two = await gradientCheck({ kind: "two-encoder", seed: 7 });
      const one = await gradientCheck({ kind: "one-encoder", seed: 7 });
      expect(two.passed).toBe(true);
      expect(one.passed).toBe(true);
      expect(two.maxRelativeError).toBeLessThanOrEqual(1e-3);
      expect(one.maxRelativeError).toBeLessThanOrEqual(1e-3);
      console.log(
        `ACCEPTANCE gradient check: PASS (max relative error ` +
          `two-encoder ${two.maxRelativeError.toExponential(2)}, ` +
          `one-encoder ${one.maxRelativeError.toExponential(2)}, tolerance 1e-3)`,
      );
    },
    120_000,
  );

  it(
    "the two-encoder model learns the comment-conditional edit",
    async () => {
      const run = await train({
        bundleDir,
        modelKind: "two-encoder",
        config: TOY_CONFIG,
        maxSteps: TRAIN_STEPS,
        seed: SEED,
        batchSize: 32,
      });
      twoEncoder = run.checkpoint;
      evalSize = run.evalSize;
      expect(run.evalSize).toBe(120);
      const pct = run.evalPerfectPredictions / run.evalSize;
      expect(pct).toBeGreaterThanOrEqual(0.5);
      console.log(
        `ACCEPTANCE comment conditioning (two-encoder): PASS ` +
          `(${run.evalPerfectPredictions}/${run.evalSize} eval perfect = ` +
          `${(pct * 100).toFixed(1)}%, required >= 50%)`,
      );
    },
    600_000,
  );

  it(
    "the source-only model stays at its structural ceiling",
    async () => {
      const run = await train({
        bundleDir,
        modelKind: "one-encoder",
        config: TOY_CONFIG,
        maxSteps: TRAIN_STEPS,
        seed: SEED,
        batchSize: 32,
      });
      const pct = run.evalPerfectPredictions / run.evalSize;
      run.checkpoint.dispose();
      // every source carries all six edit classes, so a model that cannot
      // see the comment can satisfy at most one of them
      expect(pct).toBeLessThanOrEqual(0.2);
      console.log(
        `ACCEPTANCE structural baseline (one-encoder): PASS ` +
          `(${Math.round(pct * evalSize)}/${evalSize} eval perfect = ` +
          `${(pct * 100).toFixed(1)}%, required <= 20%)`,
      );
    },
    600_000,
  );

  it(
    "exported beams round-trip through the evaluate command",
    async () => {
      expect(twoEncoder).not.toBeNull();
      const predictions = path.join(outDir, "predictions.txt");
      const result = await exportPredictions(twoEncoder as Checkpoint, bundleDir, predictions, {
        beamSizes: [1, 3, 5, 10],
      });
      expect(result.instances).toBe(60);

      const proc = spawnSync("reviewkit", ["evaluate", "--out", outDir], {
        encoding: "utf-8",
      });
      expect(proc.status, proc.stderr).toBe(0);
      expect(proc.stdout).toMatch(/evaluated 240 predictions in 4 beam group\(s\) -> /);

      const report = JSON.parse(fs.readFileSync(path.join(outDir, "report.json"), "utf-8"));
      expect(report.rows.map((r: { beam_size: number }) => r.beam_size)).toEqual([1, 3, 5, 10]);
      for (const row of report.rows) {
        expect(row.instances).toBe(60);
      }
      const perfects = report.rows.map((r: { perfect_count: number }) => r.perfect_count);
      for (let i = 1; i < perfects.length; i++) {
        expect(perfects[i]).toBeGreaterThanOrEqual(perfects[i - 1]); // wider beams only help
      }
      console.log(
        `ACCEPTANCE evaluator round-trip: PASS (240 predictions, 4 beam groups, ` +
          `exit 0, test perfect by width: ${perfects.join("/")})`,
      );
    },
    600_000,
  );

  it("fits the wall-clock budget", () => {
    const elapsed = Date.now() - startedAt;
    expect(elapsed).toBeLessThan(WALL_BUDGET_MS);
    console.log(
      `ACCEPTANCE wall time: PASS (${(elapsed / 1000).toFixed(1)} s < ` +
        `${WALL_BUDGET_MS / 1000} s)`,
    );
  });
});
