/**
 * Sequential tree-structured Parzen estimator over hyperparameter spaces.
 *
 * Trials run one at a time. The first few are uniform draws; after that,
 * finished trials are split into a good and a bad group by metric and each
 * candidate is scored by the density ratio between the two groups. Failed
 * objectives are recorded and skipped, never fatal, unless every trial
 * fails. The full trial log is kept in memory and, when a log path is
 * given, rewritten to disk after every trial.
 */

import * as fs from "fs";
import * as path from "path";
import { Dimension, HyperparameterConfig, SearchSpace } from "./config";
import { TrainerError } from "./errors";
import { Rng } from "./rng";

export interface TrialRecord {
  index: number;
  config: HyperparameterConfig;
  status: "ok" | "failed";
  metric: number | null;
  wallTimeMs: number;
  error?: string;
}

export interface SearchOptions {
  space: SearchSpace;
  trials: number;
  seed: number;
  objective: (config: HyperparameterConfig) => Promise<number> | number;
  /** When set, the trial log is serialized here after every trial. */
  logPath?: string;
  startupTrials?: number;
  /** Fraction of finished trials treated as the good group. */
  gamma?: number;
  /** Candidates drawn from the good density per non-startup trial. */
  candidates?: number;
  log?: (line: string) => void;
}

export interface SearchResult {
  bestConfig: HyperparameterConfig;
  bestMetric: number;
  trials: TrialRecord[];
}

function sampleUniform(rng: Rng, space: SearchSpace): HyperparameterConfig {
  const out: Record<string, number> = {};
  for (const [name, dim] of Object.entries(space)) {
    out[name] = dim.kind === "choice" ? rng.pick(dim.values) : rng.uniform(dim.lo, dim.hi);
  }
  return out as unknown as HyperparameterConfig;
}

function choiceLogDensity(value: number, observations: number[], optionCount: number): number {
  let count = 0;
  for (const obs of observations) {
    if (obs === value) {
      count += 1;
    }
  }
  return Math.log((count + 1) / (observations.length + optionCount));
}

function gaussianPdf(x: number, mu: number, sigma: number): number {
  const z = (x - mu) / sigma;
  return Math.exp(-0.5 * z * z) / (sigma * Math.sqrt(2 * Math.PI));
}

/** Parzen mixture over observations plus a uniform prior component. */
function parzenLogDensity(x: number, observations: number[], lo: number, hi: number): number {
  const width = hi - lo;
  const sigma = width * 0.25;
  let total = 1 / width;
  for (const mu of observations) {
    total += gaussianPdf(x, mu, sigma);
  }
  return Math.log(total / (observations.length + 1));
}

function sampleDimension(rng: Rng, dim: Dimension, good: number[]): number {
  if (dim.kind === "choice") {
    const weights = dim.values.map((v) => 1 + good.filter((g) => g === v).length);
    const total = weights.reduce((a, b) => a + b, 0);
    let r = rng.next() * total;
    for (let i = 0; i < dim.values.length; i += 1) {
      r -= weights[i];
      if (r < 0) {
        return dim.values[i];
      }
    }
    return dim.values[dim.values.length - 1];
  }
  const { lo, hi } = dim;
  // Mirror the mixture in parzenLogDensity: one part prior, rest kernels.
  if (good.length === 0 || rng.next() < 1 / (good.length + 1)) {
    return rng.uniform(lo, hi);
  }
  const mu = rng.pick(good);
  const sigma = (hi - lo) * 0.25;
  for (let i = 0; i < 100; i += 1) {
    const x = mu + rng.normal(0, sigma);
    if (x > lo && x < hi) {
      return x;
    }
  }
  return rng.uniform(lo, hi);
}

function logDensity(dim: Dimension, value: number, observations: number[]): number {
  if (dim.kind === "choice") {
    return choiceLogDensity(value, observations, dim.values.length);
  }
  return parzenLogDensity(value, observations, dim.lo, dim.hi);
}

function proposeConfig(
  rng: Rng,
  space: SearchSpace,
  okTrials: TrialRecord[],
  gamma: number,
  candidates: number,
): HyperparameterConfig {
  const sorted = [...okTrials].sort((a, b) => (b.metric as number) - (a.metric as number));
  const nGood = Math.max(1, Math.ceil(gamma * sorted.length));
  const good = sorted.slice(0, nGood);
  const bad = sorted.slice(nGood);
  const names = Object.keys(space) as (keyof HyperparameterConfig)[];
  const goodByDim = new Map(names.map((n) => [n, good.map((t) => t.config[n])]));
  const badByDim = new Map(names.map((n) => [n, bad.map((t) => t.config[n])]));

  let best: HyperparameterConfig | null = null;
  let bestScore = -Infinity;
  for (let c = 0; c < candidates; c += 1) {
    const draw: Record<string, number> = {};
    let score = 0;
    for (const name of names) {
      const dim = space[name];
      const value = sampleDimension(rng, dim, goodByDim.get(name) as number[]);
      draw[name] = value;
      score += logDensity(dim, value, goodByDim.get(name) as number[]);
      score -= logDensity(dim, value, badByDim.get(name) as number[]);
    }
    if (score > bestScore) {
      bestScore = score;
      best = draw as unknown as HyperparameterConfig;
    }
  }
  return best as HyperparameterConfig;
}

function persistLog(logPath: string | undefined, trials: TrialRecord[], best: TrialRecord | null): void {
  if (!logPath) {
    return;
  }
  fs.mkdirSync(path.dirname(path.resolve(logPath)), { recursive: true });
  const payload = {
    trials,
    best: best === null ? null : { config: best.config, metric: best.metric },
  };
  fs.writeFileSync(logPath, JSON.stringify(payload, null, 2) + "\n", "utf-8");
}

export async function tpeSearch(options: SearchOptions): Promise<SearchResult> {
  if (!Number.isInteger(options.trials) || options.trials < 1) {
    throw new RangeError(`trials must be a positive integer, got ${options.trials}`);
  }
  const gamma = options.gamma ?? 0.25;
  const startup = options.startupTrials ?? 5;
  const candidates = options.candidates ?? 24;
  const log = options.log ?? (() => undefined);
  const rng = new Rng(options.seed).child("tpe");

  const trials: TrialRecord[] = [];
  let best: TrialRecord | null = null;
  for (let index = 0; index < options.trials; index += 1) {
    const okTrials = trials.filter((t) => t.status === "ok");
    const config =
      okTrials.length < startup
        ? sampleUniform(rng.child(index), options.space)
        : proposeConfig(rng.child(index), options.space, okTrials, gamma, candidates);

    const started = Date.now();
    let record: TrialRecord;
    try {
      const metric = await options.objective(config);
      if (!Number.isFinite(metric)) {
        throw new TrainerError(`objective returned non-finite metric ${metric}`);
      }
      record = {
        index,
        config,
        status: "ok",
        metric,
        wallTimeMs: Date.now() - started,
      };
    } catch (err) {
      record = {
        index,
        config,
        status: "failed",
        metric: null,
        wallTimeMs: Date.now() - started,
        error: err instanceof Error ? err.message : String(err),
      };
    }
    trials.push(record);
    if (record.status === "ok" && (best === null || (record.metric as number) > (best.metric as number))) {
      best = record;
    }
    persistLog(options.logPath, trials, best);
    log(
      `trial ${index + 1}/${options.trials}: ${record.status}` +
        (record.status === "ok" ? ` metric=${record.metric}` : ` (${record.error})`),
    );
  }

  if (best === null) {
    throw new TrainerError(`all ${options.trials} trials failed`);
  }
  return { bestConfig: best.config, bestMetric: best.metric as number, trials };
}
