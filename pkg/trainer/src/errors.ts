/** Error types raised by the trainer. */

export class TrainerError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** A token or manifest problem in a dataset bundle. */
export class BundleError extends TrainerError {}

/** A sequence token that the bundle manifest vocabulary does not list. */
export class VocabularyError extends TrainerError {}

/** Training produced a non-finite loss; carries the offending config. */
export class DivergenceError extends TrainerError {
  readonly config: unknown;

  constructor(message: string, config: unknown) {
    super(message);
    this.config = config;
  }
}

/** Invalid prediction-export request. */
export class ExportError extends TrainerError {}
