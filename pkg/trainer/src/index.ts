export { ensureBackend } from "./backend";
export { beamSearch, compareHypotheses, hypothesisBody } from "./beam";
export type { Hypothesis, StepModel } from "./beam";
export { loadManifest, loadSplit, SPLIT_NAMES } from "./bundle";
export type { BundleInstance, DatasetName, Manifest, SplitName } from "./bundle";
export {
  BEST_ONE_ENCODER,
  BEST_TWO_ENCODER,
  HEAD_GRID,
  LAYER_GRID,
  SIZE_GRID,
  TOY_CONFIG,
  inTableRanges,
  pointSpace,
  tableSearchSpace,
  validateConfig,
} from "./config";
export type { Dimension, HyperparameterConfig, ModelKind, SearchSpace } from "./config";
export { encodeInstances, makeBatch, padMask, MASK_OFF } from "./data";
export type { EncodedInstance } from "./data";
export { greedyDecodeBatch, makeStepModel } from "./decode";
export {
  BundleError,
  DivergenceError,
  ExportError,
  TrainerError,
  VocabularyError,
} from "./errors";
export { exportPredictions } from "./exportPredictions";
export type { ExportOptions, ExportResult } from "./exportPredictions";
export { gradientCheck } from "./gradcheck";
export type { GradCheckEntry, GradCheckOptions, GradCheckResult } from "./gradcheck";
export {
  createModel,
  decoderStates,
  disposeModel,
  encodeMemory,
  logitsFromStates,
  modelLogits,
  modelLoss,
  modelVariables,
} from "./model";
export type { Batch, Memory, ModelParams } from "./model";
export { Rng } from "./rng";
export { writeSyntheticBundle } from "./synthetic";
export type { SyntheticOptions, SyntheticSummary } from "./synthetic";
export { tpeSearch } from "./tpe";
export type { SearchOptions, SearchResult, TrialRecord } from "./tpe";
export { perfectPredictions, train } from "./train";
export type { Checkpoint, TrainingRun, TrainOptions } from "./train";
export { EOS, PAD, SOS, Vocabulary } from "./vocab";
