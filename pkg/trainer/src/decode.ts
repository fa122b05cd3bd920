/**
 * Decoding against a trained (or untrained) model: batched greedy decode
 * for the perfect-prediction metric, and a stepwise adapter that exposes
 * the decoder as next-token log-probabilities for beam search.
 *
 * Generation never proposes the padding or start-of-sequence ids; their
 * columns are simply absent from the step distribution, mirroring how the
 * evaluator's decoder skips impossible continuations.
 */

import * as tf from "@tensorflow/tfjs";
import { EncodedInstance, MASK_OFF, padMask } from "./data";
import {
  Memory,
  ModelParams,
  decoderStates,
  encodeMemory,
  logitsFromStates,
} from "./model";
import { StepModel } from "./beam";
import { Vocabulary } from "./vocab";

function idTensor(rows: number[][], b: number, l: number): tf.Tensor2D {
  const flat = new Int32Array(b * l);
  for (let i = 0; i < b; i++) {
    for (let j = 0; j < l; j++) flat[i * l + j] = rows[i][j];
  }
  return tf.tensor2d(flat, [b, l], "int32");
}

function buildMemory(
  params: ModelParams,
  vocab: Vocabulary,
  instances: readonly EncodedInstance[],
): Memory {
  const b = instances.length;
  const ls = Math.max(1, ...instances.map((x) => x.src.length));
  const twoSided = params.kind === "two-encoder";
  const lc = twoSided ? Math.max(1, ...instances.map((x) => (x.com as number[]).length)) : 0;
  const pad = (ids: readonly number[], l: number) => {
    const out = ids.slice(0, l);
    while (out.length < l) out.push(vocab.padId);
    return out;
  };
  const [states, mask] = tf.tidy(() => {
    const srcIds = idTensor(instances.map((x) => pad(x.src, ls)), b, ls);
    const srcMask = padMask(instances.map((x) => x.src.length), ls);
    const comIds = twoSided
      ? idTensor(instances.map((x) => pad(x.com as number[], lc)), b, lc)
      : null;
    const comMask = twoSided ? padMask(instances.map((x) => (x.com as number[]).length), lc) : null;
    const memory = encodeMemory(params, srcIds, srcMask, comIds, comMask, null);
    return [memory.states, memory.mask];
  });
  return { states: states as tf.Tensor3D, mask: mask as tf.Tensor4D };
}

/**
 * Greedy decode all instances in one padded batch. Returns bodies as id
 * sequences with no end-of-sequence marker.
 */
export function greedyDecodeBatch(
  params: ModelParams,
  vocab: Vocabulary,
  instances: readonly EncodedInstance[],
  maxLen: number,
): number[][] {
  if (instances.length === 0) return [];
  const b = instances.length;
  const memory = buildMemory(params, vocab, instances);
  const prefixes: number[][] = instances.map(() => []);
  const done = instances.map(() => false);
  try {
    for (let step = 0; step < maxLen; step++) {
      const lt = step + 1;
      const rows = prefixes.map((p) => {
        const row = [vocab.sosId, ...p];
        while (row.length < lt) row.push(vocab.padId);
        return row;
      });
      const picked = tf.tidy(() => {
        const tgtIn = idTensor(rows, b, lt);
        const tgtMask = padMask(prefixes.map((p) => p.length + 1), lt);
        const states = decoderStates(params, memory, tgtIn, tgtMask, null);
        const logits = logitsFromStates(params, states)
          .slice([0, lt - 1, 0], [b, 1, params.vocabSize])
          .reshape([b, params.vocabSize]);
        const floor = tf.buffer([b, params.vocabSize]);
        for (let i = 0; i < b; i++) {
          floor.set(MASK_OFF, i, vocab.padId);
          floor.set(MASK_OFF, i, vocab.sosId);
        }
        return logits.add(floor.toTensor()).argMax(-1).dataSync();
      });
      let alive = false;
      for (let i = 0; i < b; i++) {
        if (done[i]) continue;
        const id = picked[i];
        if (id === vocab.eosId) {
          done[i] = true;
        } else {
          prefixes[i].push(id);
          if (prefixes[i].length >= maxLen) done[i] = true;
          else alive = true;
        }
      }
      if (!alive) break;
    }
  } finally {
    memory.states.dispose();
    memory.mask.dispose();
  }
  return prefixes;
}

/**
 * Bind one instance's encoded memory and expose the decoder as a stepwise
 * model over token strings. dispose() releases the cached memory.
 */
export function makeStepModel(
  params: ModelParams,
  vocab: Vocabulary,
  instance: EncodedInstance,
): StepModel & { dispose(): void } {
  const memory = buildMemory(params, vocab, [instance]);
  const allowed = vocab.tokens.slice(2); // eos first, then the data tokens
  const allowedIds = allowed.map((t) => vocab.idOf(t));
  return {
    vocabulary: allowed,
    eosToken: vocab.tokens[vocab.eosId],
    logProbs(prefix: readonly string[]): Map<string, number> {
      const ids = [vocab.sosId, ...vocab.encode(prefix as string[])];
      const lt = ids.length;
      const values = tf.tidy(() => {
        const tgtIn = idTensor([ids], 1, lt);
        const tgtMask = padMask([lt], lt);
        const states = decoderStates(params, memory, tgtIn, tgtMask, null);
        const logits = logitsFromStates(params, states)
          .slice([0, lt - 1, 0], [1, 1, params.vocabSize])
          .reshape([params.vocabSize]);
        const floor = new Float32Array(params.vocabSize);
        floor[vocab.padId] = MASK_OFF;
        floor[vocab.sosId] = MASK_OFF;
        return tf.logSoftmax(logits.add(tf.tensor1d(floor))).dataSync();
      });
      const out = new Map<string, number>();
      for (let i = 0; i < allowed.length; i++) out.set(allowed[i], values[allowedIds[i]]);
      return out;
    },
    dispose(): void {
      memory.states.dispose();
      memory.mask.dispose();
    },
  };
}
