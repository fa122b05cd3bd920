import * as fs from "fs";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ensureBackend } from "../src/backend";
import {
  BEST_TWO_ENCODER,
  HyperparameterConfig,
  pointSpace,
  SearchSpace,
  TOY_CONFIG,
} from "../src/config";
import { TrainerError } from "../src/errors";
import { writeSyntheticBundle } from "../src/synthetic";
import { tpeSearch } from "../src/tpe";
import { train } from "../src/train";
import { makeTmpDir, removeDir } from "./helpers";

const cleanup: string[] = [];
afterAll(() => {
  while (cleanup.length) removeDir(cleanup.pop() as string);
});

/** Point space with numUnits opened to two choices and a live learning rate. */
function twoPointSpace(): SearchSpace {
  return {
    ...pointSpace(TOY_CONFIG),
    numUnits: { kind: "choice", values: [32, 64] },
    learningRate: { kind: "uniform", lo: 0.001, hi: 0.1 },
  };
}

describe("tpeSearch", () => {
  it("rejects non-positive or fractional trial counts", async () => {
    const opts = { space: pointSpace(TOY_CONFIG), seed: 1, objective: () => 1 };
    await expect(tpeSearch({ ...opts, trials: 0 })).rejects.toThrow(RangeError);
    await expect(tpeSearch({ ...opts, trials: 2.5 })).rejects.toThrow(
      /trials must be a positive integer, got 2.5/,
    );
  });

  it("a single trial over a point space returns that point", async () => {
    const seen: HyperparameterConfig[] = [];
    const result = await tpeSearch({
      space: pointSpace(TOY_CONFIG),
      trials: 1,
      seed: 5,
      objective: (config) => {
        seen.push(config);
        return 42;
      },
    });
    expect(seen).toHaveLength(1);
    expect(result.bestConfig).toEqual(TOY_CONFIG);
    expect(result.bestMetric).toBe(42);
    expect(result.trials).toHaveLength(1);
    expect(result.trials[0]).toMatchObject({ index: 0, status: "ok", metric: 42 });
    expect(result.trials[0].wallTimeMs).toBeGreaterThanOrEqual(0);
  });

  it("sampling respects every dimension's domain", async () => {
    const result = await tpeSearch({
      space: twoPointSpace(),
      trials: 10,
      seed: 2,
      objective: (config) => config.learningRate,
    });
    for (const trial of result.trials) {
      expect([32, 64]).toContain(trial.config.numUnits);
      expect(trial.config.learningRate).toBeGreaterThan(0.001);
      expect(trial.config.learningRate).toBeLessThan(0.1);
      expect(trial.config.embeddingSize).toBe(TOY_CONFIG.embeddingSize);
    }
    const metrics = result.trials.map((t) => t.metric as number);
    expect(result.bestMetric).toBe(Math.max(...metrics));
  });

  it("is deterministic for a fixed seed and varies with it", async () => {
    const run = (seed: number) =>
      tpeSearch({
        space: twoPointSpace(),
        trials: 8,
        seed,
        objective: (config) => -Math.abs(config.learningRate - 0.05),
      });
    const a = await run(3);
    const b = await run(3);
    const c = await run(4);
    expect(a.trials.map((t) => t.config)).toEqual(b.trials.map((t) => t.config));
    expect(a.bestConfig).toEqual(b.bestConfig);
    expect(a.bestMetric).toBe(b.bestMetric);
    expect(a.trials.map((t) => t.config)).not.toEqual(c.trials.map((t) => t.config));
  });

  it("finds the better of two structural choices within ten trials", async () => {
    const result = await tpeSearch({
      space: twoPointSpace(),
      trials: 10,
      seed: 3,
      objective: (config) => (config.numUnits === 64 ? 1 : 0),
    });
    expect(result.bestConfig.numUnits).toBe(64);
    expect(result.bestMetric).toBe(1);
  });

  it("records failures and keeps searching", async () => {
    let calls = 0;
    const result = await tpeSearch({
      space: pointSpace(TOY_CONFIG),
      trials: 4,
      seed: 6,
      objective: () => {
        calls++;
        if (calls === 1) throw new Error("simulated trial crash");
        if (calls === 2) return Number.NaN;
        return calls;
      },
    });
    expect(result.trials.map((t) => t.status)).toEqual(["failed", "failed", "ok", "ok"]);
    expect(result.trials[0].error).toContain("simulated trial crash");
    expect(result.trials[1].error).toContain("non-finite metric NaN");
    expect(result.trials[0].metric).toBeNull();
    expect(result.bestMetric).toBe(4);
  });

  it("raises when every trial fails", async () => {
    await expect(
      tpeSearch({
        space: pointSpace(TOY_CONFIG),
        trials: 3,
        seed: 7,
        objective: () => {
          throw new Error("nope");
        },
      }),
    ).rejects.toThrow(TrainerError);
    await expect(
      tpeSearch({
        space: pointSpace(TOY_CONFIG),
        trials: 3,
        seed: 7,
        objective: () => {
          throw new Error("nope");
        },
      }),
    ).rejects.toThrow(/all 3 trials failed/);
  });

  it("persists the trial log after every trial, not just at the end", async () => {
    const dir = makeTmpDir("tpe-log");
    cleanup.push(dir);
    const logPath = path.join(dir, "search", "log.json");
    let midSearchTrials = -1;
    const result = await tpeSearch({
      space: pointSpace(TOY_CONFIG),
      trials: 3,
      seed: 8,
      logPath,
      objective: (config) => {
        if (midSearchTrials === -1 && fs.existsSync(logPath)) {
          midSearchTrials = JSON.parse(fs.readFileSync(logPath, "utf-8")).trials.length;
        }
        return config.numUnits;
      },
    });
    // by the second trial the log already held the first one
    expect(midSearchTrials).toBe(1);
    const payload = JSON.parse(fs.readFileSync(logPath, "utf-8"));
    expect(payload.trials).toHaveLength(3);
    expect(payload.best.config).toEqual(result.bestConfig);
    expect(payload.best.metric).toBe(result.bestMetric);
    expect(payload.trials[0]).toMatchObject({ index: 0, status: "ok" });
  });

  it("wires the published best configuration through a real training trial", async () => {
    await ensureBackend();
    const dir = makeTmpDir("tpe-bundle");
    cleanup.push(dir);
    writeSyntheticBundle({ outDir: dir, seed: 31, sources: { train: 4, eval: 2, test: 1 } });
    const seen: HyperparameterConfig[] = [];
    const result = await tpeSearch({
      space: pointSpace(BEST_TWO_ENCODER),
      trials: 2,
      seed: 9,
      objective: async (config) => {
        seen.push(config);
        const run = await train({
          bundleDir: dir,
          modelKind: "two-encoder",
          config,
          maxSteps: 1,
          seed: 1,
          batchSize: 4,
        });
        run.checkpoint.dispose();
        return -run.lossCurve[0];
      },
    });
    expect(seen).toHaveLength(2);
    for (const config of seen) expect(config).toEqual(BEST_TWO_ENCODER);
    expect(result.bestConfig).toEqual(BEST_TWO_ENCODER);
    expect(Number.isFinite(result.bestMetric)).toBe(true);
    expect(result.trials.every((t) => t.status === "ok")).toBe(true);
  }, 240_000);
});
