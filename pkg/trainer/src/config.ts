/**
 * Hyperparameter configuration and search-space definitions.
 *
 * The full search space is the published grid: categorical sizes for the
 * architecture, open intervals for learning rate and the three dropouts.
 * Training at those sizes is out of scope here; the toy defaults keep the
 * same shape at a fraction of the width so the whole suite runs on a CPU.
 */

import { z } from "zod";

export type ModelKind = "one-encoder" | "two-encoder";

export const HyperparameterConfigSchema = z
  .object({
    embeddingSize: z.number().int().positive(),
    encoderLayers: z.number().int().positive(),
    decoderLayers: z.number().int().positive(),
    numUnits: z.number().int().positive(),
    ffnDimension: z.number().int().positive(),
    numHeads: z.number().int().positive(),
    learningRate: z.number().gt(0).lt(1),
    dropout: z.number().gt(0).lt(0.4),
    attentionDropout: z.number().gt(0).lt(0.4),
    ffnDropout: z.number().gt(0).lt(0.4),
  })
  .refine((c) => c.numUnits % c.numHeads === 0, {
    message: "numUnits must be divisible by numHeads",
  });

export type HyperparameterConfig = z.infer<typeof HyperparameterConfigSchema>;

export function validateConfig(config: HyperparameterConfig): HyperparameterConfig {
  return HyperparameterConfigSchema.parse(config);
}

export type Dimension =
  | { kind: "choice"; values: number[] }
  | { kind: "uniform"; lo: number; hi: number };

export type SearchSpace = Record<keyof HyperparameterConfig, Dimension>;

export const SIZE_GRID = [128, 256, 512, 1024, 2048];
export const LAYER_GRID = [1, 2, 3, 4];
export const HEAD_GRID = [2, 4, 8];

/** The published hyperparameter grid. */
export function tableSearchSpace(): SearchSpace {
  return {
    embeddingSize: { kind: "choice", values: [...SIZE_GRID] },
    encoderLayers: { kind: "choice", values: [...LAYER_GRID] },
    decoderLayers: { kind: "choice", values: [...LAYER_GRID] },
    numUnits: { kind: "choice", values: [...SIZE_GRID] },
    ffnDimension: { kind: "choice", values: [...SIZE_GRID] },
    numHeads: { kind: "choice", values: [...HEAD_GRID] },
    learningRate: { kind: "uniform", lo: 0, hi: 1 },
    dropout: { kind: "uniform", lo: 0, hi: 0.4 },
    attentionDropout: { kind: "uniform", lo: 0, hi: 0.4 },
    ffnDropout: { kind: "uniform", lo: 0, hi: 0.4 },
  };
}

/** Degenerate space whose every dimension admits exactly one value. */
export function pointSpace(config: HyperparameterConfig): SearchSpace {
  const space = {} as SearchSpace;
  for (const key of Object.keys(config) as (keyof HyperparameterConfig)[]) {
    space[key] = { kind: "choice", values: [config[key]] };
  }
  return space;
}

export function inTableRanges(config: HyperparameterConfig): boolean {
  const space = tableSearchSpace();
  for (const key of Object.keys(space) as (keyof HyperparameterConfig)[]) {
    const dim = space[key];
    const value = config[key];
    if (dim.kind === "choice") {
      if (!dim.values.includes(value)) return false;
    } else if (!(value > dim.lo && value < dim.hi)) {
      return false;
    }
  }
  return true;
}

/** Best searched configuration, one-encoder column. */
export const BEST_ONE_ENCODER: HyperparameterConfig = {
  embeddingSize: 256,
  encoderLayers: 1,
  decoderLayers: 2,
  numUnits: 256,
  ffnDimension: 256,
  numHeads: 8,
  learningRate: 0.5132,
  dropout: 0.2798,
  attentionDropout: 0.1873,
  ffnDropout: 0.2134,
};

/** Best searched configuration, two-encoder column. */
export const BEST_TWO_ENCODER: HyperparameterConfig = {
  embeddingSize: 512,
  encoderLayers: 2,
  decoderLayers: 4,
  numUnits: 512,
  ffnDimension: 512,
  numHeads: 4,
  learningRate: 0.337,
  dropout: 0.1168,
  attentionDropout: 0.1794,
  ffnDropout: 0.2809,
};

/**
 * Defaults small enough to train in seconds-to-minutes on a laptop CPU.
 * Deliberately narrower than the grid above; see tableSearchSpace for the
 * real ranges.
 */
export const TOY_CONFIG: HyperparameterConfig = {
  embeddingSize: 64,
  encoderLayers: 1,
  decoderLayers: 1,
  numUnits: 64,
  ffnDimension: 128,
  numHeads: 2,
  learningRate: 0.004,
  dropout: 0.1,
  attentionDropout: 0.05,
  ffnDropout: 0.05,
};
