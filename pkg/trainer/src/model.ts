/**
 * One-encoder and two-encoder transformer models over explicit variables.
 *
 * No tf.layers: every weight is a named tf.Variable held in a params record
 * and the forward passes are plain functions, so the training loop can hand
 * an exact variable list to variableGrads and the finite-difference check
 * can perturb single entries.
 *
 * Embedding lookups go through oneHot + matMul rather than tf.gather: the
 * wasm backend has no gradient kernel for gather, and at these vocabulary
 * sizes the dense product costs nothing.
 *
 * The two-encoder variant runs separate encoder stacks over the marked
 * source and the reviewer comment, adds a learned source-type embedding to
 * each side, and concatenates the two sequences into one memory that the
 * decoder cross-attends to.
 */

import * as tf from "@tensorflow/tfjs";
import { HyperparameterConfig, ModelKind } from "./config";
import { MASK_OFF } from "./data";
import { TrainerError } from "./errors";
import { Rng } from "./rng";

const LN_EPS = 1e-5;

export interface LayerNormParams {
  gain: tf.Variable;
  bias: tf.Variable;
}

export interface AttentionParams {
  wq: tf.Variable;
  wk: tf.Variable;
  wv: tf.Variable;
  wo: tf.Variable;
}

export interface FfnParams {
  w1: tf.Variable;
  b1: tf.Variable;
  w2: tf.Variable;
  b2: tf.Variable;
}

export interface EncoderLayerParams {
  ln1: LayerNormParams;
  attention: AttentionParams;
  ln2: LayerNormParams;
  ffn: FfnParams;
}

export interface DecoderLayerParams {
  ln1: LayerNormParams;
  selfAttention: AttentionParams;
  ln2: LayerNormParams;
  crossAttention: AttentionParams;
  ln3: LayerNormParams;
  ffn: FfnParams;
}

export interface ModelParams {
  kind: ModelKind;
  config: HyperparameterConfig;
  vocabSize: number;
  maxPositions: number;
  embedding: tf.Variable; // [V, embeddingSize]
  inProj: tf.Variable | null; // [embeddingSize, numUnits] when dims differ
  outProj: tf.Variable | null; // [numUnits, embeddingSize] when dims differ
  positional: tf.Tensor2D; // [maxPositions, numUnits], fixed sinusoids
  sourceTypes: tf.Variable | null; // [2, numUnits], two-encoder only
  encoder: EncoderLayerParams[];
  encoderNorm: LayerNormParams;
  commentEncoder: EncoderLayerParams[] | null;
  commentNorm: LayerNormParams | null;
  decoder: DecoderLayerParams[];
  decoderNorm: LayerNormParams;
}

/** Tensors for one training batch, already padded and masked. */
export interface Batch {
  srcIds: tf.Tensor2D;
  srcMask: tf.Tensor4D; // [B,1,1,Ls] additive: 0 real, -1e9 pad
  comIds: tf.Tensor2D | null;
  comMask: tf.Tensor4D | null;
  tgtIn: tf.Tensor2D; // [B, Lt] = sos + target, padded
  tgtMask: tf.Tensor4D; // [B,1,1,Lt] additive pad mask over decoder keys
  labels: tf.Tensor2D; // [B, Lt] = target + eos, padded
  labelWeights: tf.Tensor2D; // [B, Lt] 1 for real label positions
}

function sinusoids(maxPositions: number, units: number): tf.Tensor2D {
  const data = new Float32Array(maxPositions * units);
  for (let pos = 0; pos < maxPositions; pos++) {
    for (let i = 0; i < units; i++) {
      const angle = pos / Math.pow(10000, (2 * Math.floor(i / 2)) / units);
      data[pos * units + i] = i % 2 === 0 ? Math.sin(angle) : Math.cos(angle);
    }
  }
  return tf.tensor2d(data, [maxPositions, units]);
}

/** Wrap an initializer tensor, releasing the initializer handle. */
function variableFrom(init: tf.Tensor): tf.Variable {
  const v = tf.variable(init);
  init.dispose();
  return v;
}

function weight(rng: Rng, rows: number, cols: number, std: number): tf.Variable {
  return variableFrom(tf.tensor2d(rng.normalArray(rows * cols, std), [rows, cols]));
}

function layerNormParams(units: number): LayerNormParams {
  return {
    gain: variableFrom(tf.ones([units])),
    bias: variableFrom(tf.zeros([units])),
  };
}

function attentionParams(rng: Rng, units: number): AttentionParams {
  const std = 1 / Math.sqrt(units);
  return {
    wq: weight(rng, units, units, std),
    wk: weight(rng, units, units, std),
    wv: weight(rng, units, units, std),
    wo: weight(rng, units, units, std),
  };
}

function ffnParams(rng: Rng, units: number, hidden: number): FfnParams {
  return {
    w1: weight(rng, units, hidden, 1 / Math.sqrt(units)),
    b1: variableFrom(tf.zeros([hidden])),
    w2: weight(rng, hidden, units, 1 / Math.sqrt(hidden)),
    b2: variableFrom(tf.zeros([units])),
  };
}

function encoderLayer(rng: Rng, config: HyperparameterConfig): EncoderLayerParams {
  return {
    ln1: layerNormParams(config.numUnits),
    attention: attentionParams(rng, config.numUnits),
    ln2: layerNormParams(config.numUnits),
    ffn: ffnParams(rng, config.numUnits, config.ffnDimension),
  };
}

function decoderLayer(rng: Rng, config: HyperparameterConfig): DecoderLayerParams {
  return {
    ln1: layerNormParams(config.numUnits),
    selfAttention: attentionParams(rng, config.numUnits),
    ln2: layerNormParams(config.numUnits),
    crossAttention: attentionParams(rng, config.numUnits),
    ln3: layerNormParams(config.numUnits),
    ffn: ffnParams(rng, config.numUnits, config.ffnDimension),
  };
}

export interface CreateModelOptions {
  kind: ModelKind;
  config: HyperparameterConfig;
  vocabSize: number;
  maxPositions: number;
  seed: number;
}

export function createModel(options: CreateModelOptions): ModelParams {
  const { kind, config, vocabSize, maxPositions, seed } = options;
  if (config.numUnits % config.numHeads !== 0) {
    throw new TrainerError(
      `numUnits ${config.numUnits} not divisible by numHeads ${config.numHeads}`,
    );
  }
  const rng = new Rng(seed).child("init");
  const twoEncoder = kind === "two-encoder";
  const projected = config.embeddingSize !== config.numUnits;
  return {
    kind,
    config,
    vocabSize,
    maxPositions,
    embedding: weight(rng, vocabSize, config.embeddingSize, 0.08),
    inProj: projected
      ? weight(rng, config.embeddingSize, config.numUnits, 1 / Math.sqrt(config.embeddingSize))
      : null,
    outProj: projected
      ? weight(rng, config.numUnits, config.embeddingSize, 1 / Math.sqrt(config.numUnits))
      : null,
    positional: sinusoids(maxPositions, config.numUnits),
    sourceTypes: twoEncoder ? weight(rng, 2, config.numUnits, 0.08) : null,
    encoder: Array.from({ length: config.encoderLayers }, () => encoderLayer(rng, config)),
    encoderNorm: layerNormParams(config.numUnits),
    commentEncoder: twoEncoder
      ? Array.from({ length: config.encoderLayers }, () => encoderLayer(rng, config))
      : null,
    commentNorm: twoEncoder ? layerNormParams(config.numUnits) : null,
    decoder: Array.from({ length: config.decoderLayers }, () => decoderLayer(rng, config)),
    decoderNorm: layerNormParams(config.numUnits),
  };
}

function layerNormVars(p: LayerNormParams): tf.Variable[] {
  return [p.gain, p.bias];
}

function attentionVars(p: AttentionParams): tf.Variable[] {
  return [p.wq, p.wk, p.wv, p.wo];
}

function ffnVars(p: FfnParams): tf.Variable[] {
  return [p.w1, p.b1, p.w2, p.b2];
}

export function modelVariables(params: ModelParams): tf.Variable[] {
  const vars: tf.Variable[] = [params.embedding];
  if (params.inProj) vars.push(params.inProj);
  if (params.outProj) vars.push(params.outProj);
  if (params.sourceTypes) vars.push(params.sourceTypes);
  const encoderStack = (layers: EncoderLayerParams[]) => {
    for (const layer of layers) {
      vars.push(
        ...layerNormVars(layer.ln1),
        ...attentionVars(layer.attention),
        ...layerNormVars(layer.ln2),
        ...ffnVars(layer.ffn),
      );
    }
  };
  encoderStack(params.encoder);
  vars.push(...layerNormVars(params.encoderNorm));
  if (params.commentEncoder) encoderStack(params.commentEncoder);
  if (params.commentNorm) vars.push(...layerNormVars(params.commentNorm));
  for (const layer of params.decoder) {
    vars.push(
      ...layerNormVars(layer.ln1),
      ...attentionVars(layer.selfAttention),
      ...layerNormVars(layer.ln2),
      ...attentionVars(layer.crossAttention),
      ...layerNormVars(layer.ln3),
      ...ffnVars(layer.ffn),
    );
  }
  vars.push(...layerNormVars(params.decoderNorm));
  return vars;
}

export function disposeModel(params: ModelParams): void {
  for (const v of modelVariables(params)) v.dispose();
  params.positional.dispose();
}

function layerNorm(x: tf.Tensor, p: LayerNormParams): tf.Tensor {
  const mean = x.mean(-1, true);
  const centered = x.sub(mean);
  const variance = centered.square().mean(-1, true);
  return centered.div(variance.add(LN_EPS).sqrt()).mul(p.gain).add(p.bias);
}

function project(x: tf.Tensor3D, w: tf.Variable): tf.Tensor3D {
  const [b, l, d] = x.shape;
  const cols = w.shape[1] as number;
  return tf.matMul(x.reshape([b * l, d]), w).reshape([b, l, cols]) as tf.Tensor3D;
}

function dropoutMask(rng: Rng, shape: number[], rate: number): tf.Tensor {
  const n = shape.reduce((a, b) => a * b, 1);
  const scale = 1 / (1 - rate);
  const data = new Float32Array(n);
  for (let i = 0; i < n; i++) data[i] = rng.next() >= rate ? scale : 0;
  return tf.tensor(data, shape);
}

function dropped(x: tf.Tensor, rng: Rng | null, rate: number): tf.Tensor {
  if (rng === null || rate <= 0) return x;
  return x.mul(dropoutMask(rng, x.shape, rate));
}

function attention(
  x: tf.Tensor3D,
  memory: tf.Tensor3D,
  p: AttentionParams,
  numHeads: number,
  addMask: tf.Tensor | null,
  drop: Rng | null,
  attentionRate: number,
): tf.Tensor3D {
  const [b, lq] = x.shape;
  const lk = memory.shape[1];
  const units = p.wq.shape[0] as number;
  const headDim = units / numHeads;
  const split = (t: tf.Tensor3D, len: number) =>
    t.reshape([b, len, numHeads, headDim]).transpose([0, 2, 1, 3]);
  const q = split(project(x, p.wq), lq);
  const k = split(project(memory, p.wk), lk);
  const v = split(project(memory, p.wv), lk);
  let scores = tf.matMul(q, k, false, true).div(Math.sqrt(headDim));
  if (addMask !== null) scores = scores.add(addMask);
  let weights = tf.softmax(scores);
  weights = dropped(weights, drop, attentionRate);
  const context = tf
    .matMul(weights, v)
    .transpose([0, 2, 1, 3])
    .reshape([b, lq, units]) as tf.Tensor3D;
  return project(context, p.wo);
}

function feedForward(
  x: tf.Tensor3D,
  p: FfnParams,
  drop: Rng | null,
  ffnRate: number,
): tf.Tensor3D {
  const inner = dropped(project(x, p.w1).add(p.b1).relu(), drop, ffnRate);
  return project(inner as tf.Tensor3D, p.w2).add(p.b2) as tf.Tensor3D;
}

/** Token ids -> scaled embeddings in model space, plus positions. */
function embed(params: ModelParams, ids: tf.Tensor2D, drop: Rng | null): tf.Tensor3D {
  const [b, l] = ids.shape;
  if (l > params.maxPositions) {
    throw new TrainerError(
      `sequence length ${l} exceeds model maxPositions ${params.maxPositions}`,
    );
  }
  const hot = tf.oneHot(ids.reshape([b * l]), params.vocabSize).toFloat();
  let x = tf.matMul(hot, params.embedding);
  if (params.inProj) x = tf.matMul(x, params.inProj);
  const units = params.config.numUnits;
  let seq = x.reshape([b, l, units]).mul(Math.sqrt(units)) as tf.Tensor3D;
  seq = seq.add(params.positional.slice([0, 0], [l, units]).expandDims(0)) as tf.Tensor3D;
  return dropped(seq, drop, params.config.dropout) as tf.Tensor3D;
}

function encoderStack(
  layers: EncoderLayerParams[],
  finalNorm: LayerNormParams,
  x: tf.Tensor3D,
  mask: tf.Tensor4D,
  config: HyperparameterConfig,
  drop: Rng | null,
): tf.Tensor3D {
  for (const layer of layers) {
    const normed = layerNorm(x, layer.ln1) as tf.Tensor3D;
    const attended = attention(
      normed,
      normed,
      layer.attention,
      config.numHeads,
      mask,
      drop,
      config.attentionDropout,
    );
    x = x.add(attended) as tf.Tensor3D;
    x = x.add(feedForward(layerNorm(x, layer.ln2) as tf.Tensor3D, layer.ffn, drop, config.ffnDropout)) as tf.Tensor3D;
  }
  return layerNorm(x, finalNorm) as tf.Tensor3D;
}

export interface Memory {
  states: tf.Tensor3D; // [B, Lm, units]
  mask: tf.Tensor4D; // [B,1,1,Lm] additive
}

/**
 * Encode the conditioning side. One-encoder models see only the source;
 * two-encoder models concatenate source and comment encodings, each offset
 * by its source-type embedding, into a single memory sequence.
 */
export function encodeMemory(
  params: ModelParams,
  srcIds: tf.Tensor2D,
  srcMask: tf.Tensor4D,
  comIds: tf.Tensor2D | null,
  comMask: tf.Tensor4D | null,
  drop: Rng | null = null,
): Memory {
  const config = params.config;
  const source = encoderStack(
    params.encoder,
    params.encoderNorm,
    embed(params, srcIds, drop),
    srcMask,
    config,
    drop,
  );
  if (params.kind === "one-encoder") {
    return { states: source, mask: srcMask };
  }
  if (comIds === null || comMask === null) {
    throw new TrainerError("two-encoder model needs comment ids to encode");
  }
  const comment = encoderStack(
    params.commentEncoder as EncoderLayerParams[],
    params.commentNorm as LayerNormParams,
    embed(params, comIds, drop),
    comMask,
    config,
    drop,
  );
  const types = params.sourceTypes as tf.Variable;
  const units = config.numUnits;
  const typed = (states: tf.Tensor3D, row: number) =>
    states.add(types.slice([row, 0], [1, units]).reshape([1, 1, units])) as tf.Tensor3D;
  return {
    states: tf.concat([typed(source, 0), typed(comment, 1)], 1) as tf.Tensor3D,
    mask: tf.concat([srcMask, comMask], 3) as tf.Tensor4D,
  };
}

function causalMask(length: number): tf.Tensor4D {
  const data = new Float32Array(length * length);
  for (let q = 0; q < length; q++) {
    for (let k = q + 1; k < length; k++) data[q * length + k] = MASK_OFF;
  }
  return tf.tensor(data, [1, 1, length, length]) as tf.Tensor4D;
}

/** Decoder hidden states for teacher-forced inputs. */
export function decoderStates(
  params: ModelParams,
  memory: Memory,
  tgtIn: tf.Tensor2D,
  tgtMask: tf.Tensor4D,
  drop: Rng | null = null,
): tf.Tensor3D {
  const config = params.config;
  const lt = tgtIn.shape[1];
  const selfMask = causalMask(lt).add(tgtMask);
  let x = embed(params, tgtIn, drop);
  for (const layer of params.decoder) {
    const normed = layerNorm(x, layer.ln1) as tf.Tensor3D;
    x = x.add(
      attention(
        normed,
        normed,
        layer.selfAttention,
        config.numHeads,
        selfMask,
        drop,
        config.attentionDropout,
      ),
    ) as tf.Tensor3D;
    x = x.add(
      attention(
        layerNorm(x, layer.ln2) as tf.Tensor3D,
        memory.states,
        layer.crossAttention,
        config.numHeads,
        memory.mask,
        drop,
        config.attentionDropout,
      ),
    ) as tf.Tensor3D;
    x = x.add(feedForward(layerNorm(x, layer.ln3) as tf.Tensor3D, layer.ffn, drop, config.ffnDropout)) as tf.Tensor3D;
  }
  return layerNorm(x, params.decoderNorm) as tf.Tensor3D;
}

/** Vocabulary logits from decoder states, tied to the embedding table. */
export function logitsFromStates(params: ModelParams, states: tf.Tensor3D): tf.Tensor3D {
  const [b, l, units] = states.shape;
  let x = states.reshape([b * l, units]) as tf.Tensor;
  if (params.outProj) x = tf.matMul(x, params.outProj);
  const logits = tf.matMul(x, params.embedding, false, true);
  return logits.reshape([b, l, params.vocabSize]) as tf.Tensor3D;
}

export function modelLogits(params: ModelParams, batch: Batch, drop: Rng | null = null): tf.Tensor3D {
  const memory = encodeMemory(params, batch.srcIds, batch.srcMask, batch.comIds, batch.comMask, drop);
  const states = decoderStates(params, memory, batch.tgtIn, batch.tgtMask, drop);
  return logitsFromStates(params, states);
}

/**
 * Per-token cross entropy averaged over real (unpadded) label positions.
 * The divide is deliberately unguarded: a batch with no real labels yields
 * NaN, which the training loop reports as divergence instead of hiding.
 */
export function modelLoss(params: ModelParams, batch: Batch, drop: Rng | null = null): tf.Scalar {
  const logits = modelLogits(params, batch, drop);
  const [b, l] = batch.labels.shape;
  const logProbs = tf.logSoftmax(logits.reshape([b * l, params.vocabSize]));
  const hot = tf.oneHot(batch.labels.reshape([b * l]), params.vocabSize).toFloat();
  const picked = logProbs.mul(hot).sum(-1).reshape([b, l]);
  const weights = batch.labelWeights;
  const total = picked.mul(weights).sum();
  return tf.neg(total).div(weights.sum()).asScalar();
}
