/**
 * Finite-difference validation of backprop gradients.
 *
 * The backprop side comes from the float32 graph. The finite-difference
 * side runs against a double-precision reference forward pass implemented
 * here with plain loops: float32 losses are too coarse for central
 * differences at any usable step size, while in float64 the quotient is
 * exact to ~1e-10 and the comparison measures only backprop error.
 *
 * The reference pass recomputes the same math as the graph (pre-norm
 * transformer, tied embeddings, masked mean cross entropy) per instance
 * without padding, which is equivalent because pad keys carry -1e9 and
 * underflow to exactly zero attention weight. Agreement between the two
 * losses is asserted as part of the check, so a masking or wiring drift in
 * either implementation fails loudly.
 */

import * as tf from "@tensorflow/tfjs";
import { ensureBackend } from "./backend";
import { BundleInstance } from "./bundle";
import { HyperparameterConfig, ModelKind } from "./config";
import { EncodedInstance, encodeInstances, makeBatch, MASK_OFF } from "./data";
import {
  Batch,
  createModel,
  disposeModel,
  EncoderLayerParams,
  LayerNormParams,
  ModelParams,
  modelLoss,
  modelVariables,
} from "./model";
import { Vocabulary } from "./vocab";

const TOKENS = ["<END>", "<START>", "a", "add", "b", "c", "d", "drop", "last", "x", "y"];

const FIXTURE: BundleInstance[] = [
  {
    instanceId: "probe-0",
    source: ["<START>", "a", "b", "c", "<END>"],
    comment: ["add", "x"],
    target: ["a", "b", "c", "x"],
  },
  {
    instanceId: "probe-1",
    source: ["<START>", "b", "d", "<END>"],
    comment: ["add", "y"],
    target: ["b", "d", "y"],
  },
  {
    instanceId: "probe-2",
    source: ["<START>", "d", "c", "a", "<END>"],
    comment: ["drop", "last"],
    target: ["d", "c"],
  },
];

// Embedding narrower than the model width so the in/out projections get
// gradient coverage too.
const CHECK_CONFIG: HyperparameterConfig = {
  embeddingSize: 6,
  encoderLayers: 1,
  decoderLayers: 1,
  numUnits: 8,
  ffnDimension: 12,
  numHeads: 2,
  learningRate: 0.01,
  dropout: 0.1,
  attentionDropout: 0.1,
  ffnDropout: 0.1,
};

export interface GradCheckOptions {
  kind: ModelKind;
  seed?: number;
  /** Central-difference step applied to single weight entries. */
  epsilon?: number;
  /** Maximum allowed relative error per probed entry. */
  tolerance?: number;
  /** Entries with |gradient| below this are not probed. */
  minGradient?: number;
  entriesPerVariable?: number;
  /** Allowed relative disagreement between graph and reference losses. */
  driftTolerance?: number;
}

export interface GradCheckEntry {
  variable: string;
  shape: number[];
  index: number;
  analytic: number;
  numeric: number;
  relativeError: number;
}

export interface GradCheckResult {
  kind: ModelKind;
  epsilon: number;
  tolerance: number;
  checkedEntries: number;
  maxRelativeError: number;
  /** Relative gap between the float32 graph loss and the reference loss. */
  lossDrift: number;
  graphLoss: number;
  referenceLoss: number;
  passed: boolean;
  entries: GradCheckEntry[];
}

function disposeBatch(batch: Batch): void {
  for (const t of [
    batch.srcIds,
    batch.srcMask,
    batch.comIds,
    batch.comMask,
    batch.tgtIn,
    batch.tgtMask,
    batch.labels,
    batch.labelWeights,
  ]) {
    t?.dispose();
  }
}

// ---------------------------------------------------------------------------
// Double-precision reference forward pass.

type F64 = Float64Array;
type MaskFn = (q: number, k: number) => number;

/** x [rows, inner] times w [inner, cols], row-major. */
function mm(x: F64, rows: number, inner: number, w: F64, cols: number): F64 {
  const out = new Float64Array(rows * cols);
  for (let r = 0; r < rows; r++) {
    for (let i = 0; i < inner; i++) {
      const xv = x[r * inner + i];
      if (xv === 0) continue;
      const wRow = i * cols;
      const oRow = r * cols;
      for (let c = 0; c < cols; c++) out[oRow + c] += xv * w[wRow + c];
    }
  }
  return out;
}

function addInPlace(x: F64, y: F64): F64 {
  for (let i = 0; i < x.length; i++) x[i] += y[i];
  return x;
}

const LN_EPS = 1e-5;

function refLayerNorm(x: F64, rows: number, units: number, gain: F64, bias: F64): F64 {
  const out = new Float64Array(rows * units);
  for (let r = 0; r < rows; r++) {
    const off = r * units;
    let mean = 0;
    for (let u = 0; u < units; u++) mean += x[off + u];
    mean /= units;
    let variance = 0;
    for (let u = 0; u < units; u++) {
      const c = x[off + u] - mean;
      variance += c * c;
    }
    variance /= units;
    const inv = 1 / Math.sqrt(variance + LN_EPS);
    for (let u = 0; u < units; u++) {
      out[off + u] = (x[off + u] - mean) * inv * gain[u] + bias[u];
    }
  }
  return out;
}

interface RefAttentionWeights {
  wq: F64;
  wk: F64;
  wv: F64;
  wo: F64;
}

function refAttention(
  xq: F64,
  lq: number,
  xkv: F64,
  lk: number,
  w: RefAttentionWeights,
  units: number,
  heads: number,
  mask: MaskFn | null,
): F64 {
  const hd = units / heads;
  const scale = 1 / Math.sqrt(hd);
  const q = mm(xq, lq, units, w.wq, units);
  const k = mm(xkv, lk, units, w.wk, units);
  const v = mm(xkv, lk, units, w.wv, units);
  const ctx = new Float64Array(lq * units);
  const scores = new Float64Array(lk);
  for (let h = 0; h < heads; h++) {
    const off = h * hd;
    for (let qi = 0; qi < lq; qi++) {
      let maxScore = -Infinity;
      for (let ki = 0; ki < lk; ki++) {
        let s = 0;
        for (let d = 0; d < hd; d++) s += q[qi * units + off + d] * k[ki * units + off + d];
        s = s * scale + (mask === null ? 0 : mask(qi, ki));
        scores[ki] = s;
        if (s > maxScore) maxScore = s;
      }
      let denom = 0;
      for (let ki = 0; ki < lk; ki++) {
        scores[ki] = Math.exp(scores[ki] - maxScore);
        denom += scores[ki];
      }
      for (let ki = 0; ki < lk; ki++) {
        const weight = scores[ki] / denom;
        if (weight === 0) continue;
        for (let d = 0; d < hd; d++) {
          ctx[qi * units + off + d] += weight * v[ki * units + off + d];
        }
      }
    }
  }
  return mm(ctx, lq, units, w.wo, units);
}

interface RefFfnWeights {
  w1: F64;
  b1: F64;
  w2: F64;
  b2: F64;
}

function refFfn(x: F64, rows: number, units: number, w: RefFfnWeights, hidden: number): F64 {
  const inner = mm(x, rows, units, w.w1, hidden);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < hidden; c++) {
      const i = r * hidden + c;
      inner[i] = Math.max(0, inner[i] + w.b1[c]);
    }
  }
  const out = mm(inner, rows, hidden, w.w2, units);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < units; c++) out[r * units + c] += w.b2[c];
  }
  return out;
}

/**
 * Bridges the tf parameter tree to float64 copies of every weight. Probes
 * mutate the copies directly, so no assigns touch the graph.
 */
class RefModel {
  private readonly arrays = new Map<tf.Variable, F64>();
  private readonly positional: F64;

  constructor(private readonly params: ModelParams) {
    for (const v of modelVariables(params)) {
      this.arrays.set(v, Float64Array.from(v.dataSync()));
    }
    this.positional = Float64Array.from(params.positional.dataSync());
  }

  of(variable: tf.Variable): F64 {
    return this.arrays.get(variable) as F64;
  }

  private ln(p: LayerNormParams): { gain: F64; bias: F64 } {
    return { gain: this.of(p.gain), bias: this.of(p.bias) };
  }

  private embed(ids: readonly number[]): F64 {
    const { config } = this.params;
    const units = config.numUnits;
    const emb = config.embeddingSize;
    const table = this.of(this.params.embedding);
    const l = ids.length;
    let x: F64 = new Float64Array(l * emb);
    for (let pos = 0; pos < l; pos++) {
      for (let e = 0; e < emb; e++) x[pos * emb + e] = table[ids[pos] * emb + e];
    }
    if (this.params.inProj) x = mm(x, l, emb, this.of(this.params.inProj), units);
    const scale = Math.sqrt(units);
    for (let pos = 0; pos < l; pos++) {
      for (let u = 0; u < units; u++) {
        const i = pos * units + u;
        x[i] = x[i] * scale + this.positional[pos * units + u];
      }
    }
    return x;
  }

  private encodeWith(layers: EncoderLayerParams[], finalNorm: LayerNormParams, ids: readonly number[]): F64 {
    const { config } = this.params;
    const units = config.numUnits;
    const l = ids.length;
    let x = this.embed(ids);
    for (const layer of layers) {
      const n1 = this.ln(layer.ln1);
      const normed = refLayerNorm(x, l, units, n1.gain, n1.bias);
      const att = refAttention(
        normed,
        l,
        normed,
        l,
        {
          wq: this.of(layer.attention.wq),
          wk: this.of(layer.attention.wk),
          wv: this.of(layer.attention.wv),
          wo: this.of(layer.attention.wo),
        },
        units,
        config.numHeads,
        null,
      );
      x = addInPlace(x, att);
      const n2 = this.ln(layer.ln2);
      x = addInPlace(
        x,
        refFfn(
          refLayerNorm(x, l, units, n2.gain, n2.bias),
          l,
          units,
          {
            w1: this.of(layer.ffn.w1),
            b1: this.of(layer.ffn.b1),
            w2: this.of(layer.ffn.w2),
            b2: this.of(layer.ffn.b2),
          },
          config.ffnDimension,
        ),
      );
    }
    const fin = this.ln(finalNorm);
    return refLayerNorm(x, l, units, fin.gain, fin.bias);
  }

  private memory(instance: EncodedInstance): { states: F64; len: number } {
    const { params } = this;
    const units = params.config.numUnits;
    const src = this.encodeWith(params.encoder, params.encoderNorm, instance.src);
    if (params.kind === "one-encoder") {
      return { states: src, len: instance.src.length };
    }
    const com = this.encodeWith(
      params.commentEncoder as EncoderLayerParams[],
      params.commentNorm as LayerNormParams,
      instance.com as number[],
    );
    const types = this.of(params.sourceTypes as tf.Variable);
    const ls = instance.src.length;
    const lc = (instance.com as number[]).length;
    const states = new Float64Array((ls + lc) * units);
    for (let p = 0; p < ls; p++) {
      for (let u = 0; u < units; u++) states[p * units + u] = src[p * units + u] + types[u];
    }
    for (let p = 0; p < lc; p++) {
      for (let u = 0; u < units; u++) {
        states[(ls + p) * units + u] = com[p * units + u] + types[units + u];
      }
    }
    return { states, len: ls + lc };
  }

  /** Summed negative log likelihood and label count for one instance. */
  private instanceNll(instance: EncodedInstance, sosId: number, eosId: number): { nll: number; labels: number } {
    const { params } = this;
    const config = params.config;
    const units = config.numUnits;
    const emb = config.embeddingSize;
    const mem = this.memory(instance);
    const tgtIn = [sosId, ...instance.tgt];
    const labels = [...instance.tgt, eosId];
    const lt = tgtIn.length;
    let x = this.embed(tgtIn);
    const causal: MaskFn = (q, k) => (k > q ? MASK_OFF : 0);
    for (const layer of params.decoder) {
      const n1 = this.ln(layer.ln1);
      const normed = refLayerNorm(x, lt, units, n1.gain, n1.bias);
      x = addInPlace(
        x,
        refAttention(
          normed,
          lt,
          normed,
          lt,
          {
            wq: this.of(layer.selfAttention.wq),
            wk: this.of(layer.selfAttention.wk),
            wv: this.of(layer.selfAttention.wv),
            wo: this.of(layer.selfAttention.wo),
          },
          units,
          config.numHeads,
          causal,
        ),
      );
      const n2 = this.ln(layer.ln2);
      x = addInPlace(
        x,
        refAttention(
          refLayerNorm(x, lt, units, n2.gain, n2.bias),
          lt,
          mem.states,
          mem.len,
          {
            wq: this.of(layer.crossAttention.wq),
            wk: this.of(layer.crossAttention.wk),
            wv: this.of(layer.crossAttention.wv),
            wo: this.of(layer.crossAttention.wo),
          },
          units,
          config.numHeads,
          null,
        ),
      );
      const n3 = this.ln(layer.ln3);
      x = addInPlace(
        x,
        refFfn(
          refLayerNorm(x, lt, units, n3.gain, n3.bias),
          lt,
          units,
          {
            w1: this.of(layer.ffn.w1),
            b1: this.of(layer.ffn.b1),
            w2: this.of(layer.ffn.w2),
            b2: this.of(layer.ffn.b2),
          },
          config.ffnDimension,
        ),
      );
    }
    const fin = this.ln(params.decoderNorm);
    x = refLayerNorm(x, lt, units, fin.gain, fin.bias);
    const proj = params.outProj ? mm(x, lt, units, this.of(params.outProj), emb) : x;
    const table = this.of(params.embedding);
    const width = params.outProj ? emb : units;
    let nll = 0;
    for (let pos = 0; pos < lt; pos++) {
      let maxLogit = -Infinity;
      const logits = new Float64Array(params.vocabSize);
      for (let v = 0; v < params.vocabSize; v++) {
        let s = 0;
        for (let e = 0; e < width; e++) s += proj[pos * width + e] * table[v * width + e];
        logits[v] = s;
        if (s > maxLogit) maxLogit = s;
      }
      let denom = 0;
      for (let v = 0; v < params.vocabSize; v++) denom += Math.exp(logits[v] - maxLogit);
      nll += maxLogit + Math.log(denom) - logits[labels[pos]];
    }
    return { nll, labels: lt };
  }

  loss(instances: readonly EncodedInstance[], sosId: number, eosId: number): number {
    let total = 0;
    let count = 0;
    for (const instance of instances) {
      const { nll, labels } = this.instanceNll(instance, sosId, eosId);
      total += nll;
      count += labels;
    }
    return total / count;
  }
}

// ---------------------------------------------------------------------------

export async function gradientCheck(options: GradCheckOptions): Promise<GradCheckResult> {
  await ensureBackend();
  const seed = options.seed ?? 7;
  const epsilon = options.epsilon ?? 1e-5;
  const tolerance = options.tolerance ?? 1e-3;
  const minGradient = options.minGradient ?? 1e-3;
  const perVariable = options.entriesPerVariable ?? 3;
  const driftTolerance = options.driftTolerance ?? 5e-4;

  const vocab = Vocabulary.fromManifest(TOKENS);
  const twoEncoder = options.kind === "two-encoder";
  const encoded = encodeInstances(vocab, FIXTURE, twoEncoder);
  const batch = makeBatch(vocab, encoded);
  const params = createModel({
    kind: options.kind,
    config: CHECK_CONFIG,
    vocabSize: vocab.size,
    maxPositions: 24,
    seed,
  });
  const variables = modelVariables(params);

  const entries: GradCheckEntry[] = [];
  let graphLoss = NaN;
  let referenceLoss = NaN;
  try {
    const { value, grads } = tf.variableGrads(() => modelLoss(params, batch, null), variables);
    graphLoss = value.dataSync()[0];
    value.dispose();
    try {
      const ref = new RefModel(params);
      const lossAt = () => ref.loss(encoded, vocab.sosId, vocab.eosId);
      referenceLoss = lossAt();
      for (const variable of variables) {
        const gradTensor = grads[variable.name];
        if (!gradTensor) continue;
        const g = gradTensor.dataSync();
        const order = Array.from(g.keys()).sort((i, j) => Math.abs(g[j]) - Math.abs(g[i]));
        const mirror = ref.of(variable);
        let taken = 0;
        for (const index of order) {
          if (taken >= perVariable || Math.abs(g[index]) < minGradient) break;
          const original = mirror[index];
          mirror[index] = original + epsilon;
          const plus = lossAt();
          mirror[index] = original - epsilon;
          const minus = lossAt();
          mirror[index] = original;
          const analytic = g[index];
          const numeric = (plus - minus) / (2 * epsilon);
          const relativeError =
            Math.abs(analytic - numeric) / Math.max(Math.abs(analytic), Math.abs(numeric));
          entries.push({
            variable: variable.name,
            shape: variable.shape as number[],
            index,
            analytic,
            numeric,
            relativeError,
          });
          taken += 1;
        }
      }
    } finally {
      for (const t of Object.values(grads)) t.dispose();
    }
  } finally {
    disposeBatch(batch);
    disposeModel(params);
  }

  const maxRelativeError = entries.reduce((m, e) => Math.max(m, e.relativeError), 0);
  const lossDrift = Math.abs(graphLoss - referenceLoss) / Math.abs(referenceLoss);
  return {
    kind: options.kind,
    epsilon,
    tolerance,
    checkedEntries: entries.length,
    maxRelativeError,
    lossDrift,
    graphLoss,
    referenceLoss,
    passed: entries.length > 0 && maxRelativeError <= tolerance && lossDrift <= driftTolerance,
    entries,
  };
}
