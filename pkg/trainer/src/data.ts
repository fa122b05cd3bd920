/**
 * Turning bundle instances into padded id batches. All padding and mask
 * construction happens here in plain arrays so the model code only ever
 * sees ready tensors.
 */

import * as tf from "@tensorflow/tfjs";
import { BundleInstance } from "./bundle";
import { BundleError } from "./errors";
import type { Batch } from "./model";
import { Vocabulary } from "./vocab";

export const MASK_OFF = -1e9;

export interface EncodedInstance {
  instanceId: string;
  src: number[];
  com: number[] | null;
  tgt: number[];
}

export function encodeInstances(
  vocab: Vocabulary,
  instances: readonly BundleInstance[],
  needComment: boolean,
): EncodedInstance[] {
  return instances.map((instance) => {
    if (needComment && instance.comment === null) {
      throw new BundleError(
        `instance ${instance.instanceId} has no comment field; two-encoder training needs d_t`,
      );
    }
    return {
      instanceId: instance.instanceId,
      src: vocab.encode(instance.source),
      com: needComment ? vocab.encode(instance.comment as string[]) : null,
      tgt: vocab.encode(instance.target),
    };
  });
}

function padTo(ids: readonly number[], length: number, padId: number): number[] {
  const out = ids.slice(0, length);
  while (out.length < length) out.push(padId);
  return out;
}

function idTensor(rows: number[][], b: number, l: number): tf.Tensor2D {
  const flat = new Int32Array(b * l);
  for (let i = 0; i < b; i++) {
    for (let j = 0; j < l; j++) flat[i * l + j] = rows[i][j];
  }
  return tf.tensor2d(flat, [b, l], "int32");
}

/** Additive key mask: 0 over the first `lens[i]` positions, -1e9 after. */
export function padMask(lens: readonly number[], l: number): tf.Tensor4D {
  const b = lens.length;
  const data = new Float32Array(b * l);
  for (let i = 0; i < b; i++) {
    for (let j = lens[i]; j < l; j++) data[i * l + j] = MASK_OFF;
  }
  return tf.tensor(data, [b, 1, 1, l]) as tf.Tensor4D;
}

/** Pack instances into one teacher-forced batch. */
export function makeBatch(vocab: Vocabulary, instances: readonly EncodedInstance[]): Batch {
  const b = instances.length;
  if (b === 0) throw new BundleError("cannot build a batch from zero instances");
  const twoSided = instances[0].com !== null;
  const ls = Math.max(1, ...instances.map((x) => x.src.length));
  const lc = twoSided ? Math.max(1, ...instances.map((x) => (x.com as number[]).length)) : 0;
  const lt = Math.max(1, ...instances.map((x) => x.tgt.length + 1));

  const srcRows = instances.map((x) => padTo(x.src, ls, vocab.padId));
  const tgtInRows = instances.map((x) => padTo([vocab.sosId, ...x.tgt], lt, vocab.padId));
  const labelRows = instances.map((x) => padTo([...x.tgt, vocab.eosId], lt, vocab.padId));

  const weights = new Float32Array(b * lt);
  for (let i = 0; i < b; i++) {
    const real = instances[i].tgt.length + 1;
    for (let j = 0; j < real && j < lt; j++) weights[i * lt + j] = 1;
  }

  return {
    srcIds: idTensor(srcRows, b, ls),
    srcMask: padMask(instances.map((x) => x.src.length), ls),
    comIds: twoSided ? idTensor(instances.map((x) => padTo(x.com as number[], lc, vocab.padId)), b, lc) : null,
    comMask: twoSided ? padMask(instances.map((x) => (x.com as number[]).length), lc) : null,
    tgtIn: idTensor(tgtInRows, b, lt),
    tgtMask: padMask(instances.map((x) => Math.min(x.tgt.length + 1, lt)), lt),
    labels: idTensor(labelRows, b, lt),
    labelWeights: tf.tensor2d(weights, [b, lt]),
  };
}
