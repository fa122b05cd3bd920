/**
 * Teacher-forced training over a dataset bundle split.
 *
 * One-encoder models train on d_p (source -> target); two-encoder models
 * train on d_t (marked source + reviewer comment -> target). The run is a
 * pure function of (bundle, config, seed): weight init, batch order and
 * dropout masks all come from one seeded stream, so a repeated run
 * reproduces the loss curve.
 */

import * as tf from "@tensorflow/tfjs";
import { ensureBackend } from "./backend";
import { BundleInstance, loadManifest, loadSplit } from "./bundle";
import { HyperparameterConfig, ModelKind, validateConfig } from "./config";
import { EncodedInstance, encodeInstances, makeBatch } from "./data";
import { greedyDecodeBatch } from "./decode";
import { BundleError, DivergenceError } from "./errors";
import { ModelParams, createModel, disposeModel, modelLoss, modelVariables } from "./model";
import { Rng } from "./rng";
import { Vocabulary } from "./vocab";

const DEFAULT_BATCH = 32;
const DECODE_MARGIN = 2;

export interface Checkpoint {
  kind: ModelKind;
  config: HyperparameterConfig;
  vocab: Vocabulary;
  params: ModelParams;
  dispose(): void;
}

export interface TrainingRun {
  modelKind: ModelKind;
  config: HyperparameterConfig;
  maxSteps: number;
  /** Exact-match count under greedy decoding, eval split only. */
  evalPerfectPredictions: number;
  evalSize: number;
  checkpoint: Checkpoint;
  lossCurve: number[];
  epochMeanLosses: number[];
  wallTimeMs: number;
}

export interface TrainOptions {
  bundleDir: string;
  modelKind: ModelKind;
  config: HyperparameterConfig;
  maxSteps: number;
  seed: number;
  batchSize?: number;
  log?: (line: string) => void;
}

function datasetFor(kind: ModelKind): "d_t" | "d_p" {
  return kind === "two-encoder" ? "d_t" : "d_p";
}

/** Abort gate for non-finite losses; echoes the config for the trial log. */
export function assertFiniteLoss(
  loss: number,
  step: number,
  config: HyperparameterConfig,
): void {
  if (!Number.isFinite(loss)) {
    throw new DivergenceError(
      `training diverged at step ${step}: loss is ${loss}; config: ${JSON.stringify(config)}`,
      config,
    );
  }
}

/** Greedy exact-match count for a checkpoint over bundle instances. */
export function perfectPredictions(
  checkpoint: Checkpoint,
  instances: readonly BundleInstance[],
): number {
  if (instances.length === 0) return 0;
  const encoded = encodeInstances(
    checkpoint.vocab,
    instances,
    checkpoint.kind === "two-encoder",
  );
  const maxTgt = Math.max(...encoded.map((x) => x.tgt.length));
  const decoded = greedyDecodeBatch(
    checkpoint.params,
    checkpoint.vocab,
    encoded,
    maxTgt + DECODE_MARGIN,
  );
  let perfect = 0;
  for (let i = 0; i < encoded.length; i++) {
    const want = encoded[i].tgt;
    const got = decoded[i];
    if (got.length === want.length && got.every((id, j) => id === want[j])) perfect++;
  }
  return perfect;
}

export async function train(options: TrainOptions): Promise<TrainingRun> {
  const started = Date.now();
  await ensureBackend();
  const config = validateConfig(options.config);
  const { bundleDir, modelKind, maxSteps, seed } = options;
  const batchSize = options.batchSize ?? DEFAULT_BATCH;
  const log = options.log ?? (() => {});

  const manifest = loadManifest(bundleDir);
  const vocab = Vocabulary.fromManifest(manifest.vocabulary);
  const dataset = datasetFor(modelKind);
  const needComment = modelKind === "two-encoder";
  const trainSet = encodeInstances(vocab, loadSplit(bundleDir, dataset, "train"), needComment);
  if (trainSet.length === 0 && maxSteps > 0) {
    throw new BundleError(`train split of ${dataset} in ${bundleDir} is empty`);
  }
  const evalInstances = loadSplit(bundleDir, dataset, "eval");

  // The positional table must cover every sequence this checkpoint will
  // ever see, including beam decoding over the test split later on.
  const evalEncoded = encodeInstances(vocab, evalInstances, needComment);
  const testEncoded = encodeInstances(vocab, loadSplit(bundleDir, dataset, "test"), needComment);
  const all = [...trainSet, ...evalEncoded, ...testEncoded];
  const longest = (pick: (x: EncodedInstance) => number) =>
    all.length === 0 ? 0 : Math.max(...all.map(pick));
  const maxPositions =
    Math.max(
      longest((x) => x.src.length),
      longest((x) => (x.com ? x.com.length : 0)),
      longest((x) => x.tgt.length) + 1 + DECODE_MARGIN,
    ) + 8;

  const rng = new Rng(seed);
  const params = createModel({
    kind: modelKind,
    config,
    vocabSize: vocab.size,
    maxPositions,
    seed,
  });
  const variables = modelVariables(params);
  const optimizer = tf.train.adam(config.learningRate);
  const dropRoot = rng.child("dropout");
  const orderRng = rng.child("order");

  const lossCurve: number[] = [];
  const epochMeanLosses: number[] = [];
  const stepsPerEpoch = Math.max(1, Math.ceil(trainSet.length / batchSize));
  let order: number[] = [];
  let epochSum = 0;
  let epochCount = 0;

  try {
    for (let step = 0; step < maxSteps; step++) {
      const offset = step % stepsPerEpoch;
      if (offset === 0) {
        order = orderRng.shuffle(trainSet.map((_, i) => i));
      }
      const picked = order.slice(offset * batchSize, (offset + 1) * batchSize);
      const batchInstances = picked.map((i) => trainSet[i]);
      const drop = dropRoot.child(step);
      const loss = tf.tidy(() => {
        const batch = makeBatch(vocab, batchInstances);
        const { value, grads } = tf.variableGrads(
          () => modelLoss(params, batch, drop),
          variables,
        );
        optimizer.applyGradients(
          Object.entries(grads).map(([name, tensor]) => ({ name, tensor })),
        );
        return value.dataSync()[0];
      });
      assertFiniteLoss(loss, step, config);
      lossCurve.push(loss);
      epochSum += loss;
      epochCount++;
      if (offset === stepsPerEpoch - 1) {
        epochMeanLosses.push(epochSum / epochCount);
        epochSum = 0;
        epochCount = 0;
      }
      if (step % 100 === 0) {
        log(`step ${step} loss ${loss.toFixed(4)}`);
      }
    }
  } catch (err) {
    optimizer.dispose();
    disposeModel(params);
    throw err;
  }
  optimizer.dispose();

  const checkpoint: Checkpoint = {
    kind: modelKind,
    config,
    vocab,
    params,
    dispose: () => disposeModel(params),
  };
  const evalPerfectPredictions = perfectPredictions(checkpoint, evalInstances);
  log(
    `done: ${maxSteps} steps, eval perfect ${evalPerfectPredictions}/${evalInstances.length}`,
  );
  return {
    modelKind,
    config,
    maxSteps,
    evalPerfectPredictions,
    evalSize: evalInstances.length,
    checkpoint,
    lossCurve,
    epochMeanLosses,
    wallTimeMs: Date.now() - started,
  };
}
