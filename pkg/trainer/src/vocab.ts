/**
 * Shared vocabulary over source, comment and target sequences, built from a
 * bundle manifest. Ids 0..2 are reserved for the padding, start and end
 * markers the model needs; everything else keeps the manifest's order.
 */

import { VocabularyError } from "./errors";

export const PAD = "<pad>";
export const SOS = "<sos>";
export const EOS = "<eos>";

const SPECIALS = [PAD, SOS, EOS];

export class Vocabulary {
  readonly tokens: readonly string[];
  private readonly index: Map<string, number>;

  private constructor(tokens: string[]) {
    this.tokens = tokens;
    this.index = new Map(tokens.map((t, i) => [t, i]));
  }

  static fromManifest(manifestTokens: readonly string[]): Vocabulary {
    const seen = new Set<string>();
    for (const token of manifestTokens) {
      if (SPECIALS.includes(token)) {
        throw new VocabularyError(
          `manifest vocabulary contains reserved token ${JSON.stringify(token)}`,
        );
      }
      if (seen.has(token)) {
        throw new VocabularyError(
          `manifest vocabulary lists ${JSON.stringify(token)} twice`,
        );
      }
      seen.add(token);
    }
    return new Vocabulary([...SPECIALS, ...manifestTokens]);
  }

  get size(): number {
    return this.tokens.length;
  }

  get padId(): number {
    return 0;
  }

  get sosId(): number {
    return 1;
  }

  get eosId(): number {
    return 2;
  }

  has(token: string): boolean {
    return this.index.has(token);
  }

  idOf(token: string): number {
    const id = this.index.get(token);
    if (id === undefined) {
      throw new VocabularyError(
        `token ${JSON.stringify(token)} is not in the bundle manifest vocabulary`,
      );
    }
    return id;
  }

  encode(sequence: readonly string[]): number[] {
    return sequence.map((t) => this.idOf(t));
  }

  decode(ids: readonly number[]): string[] {
    return ids.map((id) => {
      const token = this.tokens[id];
      if (token === undefined) {
        throw new VocabularyError(`id ${id} is outside the vocabulary`);
      }
      return token;
    });
  }
}
