/**
 * Slot-consuming beam search over a stepwise model.
 *
 * This mirrors the evaluation pipeline's decoder contract so scores stay
 * comparable: hypotheses rank by (total log-probability descending, then
 * token sequence ascending), a finished hypothesis permanently takes one of
 * the k slots and narrows the live width, there is no length
 * normalization, and beam width 1 reduces to greedy decoding. A hypothesis
 * finishes by emitting the end token or by reaching maxLen tokens; its
 * body (the tokens without a trailing end marker) is what gets exported.
 */

export interface StepModel {
  vocabulary: readonly string[];
  eosToken: string;
  logProbs(prefix: readonly string[]): Map<string, number>;
}

export interface Hypothesis {
  tokens: string[];
  logProb: number;
  finished: boolean;
}

function compareTokens(a: readonly string[], b: readonly string[]): number {
  const n = Math.min(a.length, b.length);
  for (let i = 0; i < n; i++) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return a.length - b.length;
}

/** Ranking order: higher log-probability first, ties by token sequence. */
export function compareHypotheses(a: Hypothesis, b: Hypothesis): number {
  if (a.logProb !== b.logProb) return b.logProb - a.logProb;
  return compareTokens(a.tokens, b.tokens);
}

export function hypothesisBody(h: Hypothesis, eosToken: string): string[] {
  const t = h.tokens;
  if (t.length > 0 && t[t.length - 1] === eosToken) return t.slice(0, -1);
  return [...t];
}

export function beamSearch(model: StepModel, k: number, maxLen: number): Hypothesis[] {
  if (k < 1) throw new RangeError(`beam width k must be at least 1, got ${k}`);
  if (maxLen < 1) throw new RangeError(`maxLen must be at least 1, got ${maxLen}`);
  const eos = model.eosToken;
  let live: Hypothesis[] = [{ tokens: [], logProb: 0, finished: false }];
  const pool: Hypothesis[] = [];
  while (live.length > 0 && pool.length < k) {
    const grown: Hypothesis[] = [];
    for (const hyp of live) {
      const scores = model.logProbs(hyp.tokens);
      for (const token of model.vocabulary) {
        const lp = scores.get(token);
        if (lp === undefined || lp === Number.NEGATIVE_INFINITY) continue;
        const tokens = [...hyp.tokens, token];
        grown.push({
          tokens,
          logProb: hyp.logProb + lp,
          finished: token === eos || tokens.length >= maxLen,
        });
      }
    }
    grown.sort(compareHypotheses);
    const kept = grown.slice(0, k - pool.length);
    pool.push(...kept.filter((h) => h.finished));
    live = kept.filter((h) => !h.finished);
  }
  pool.sort(compareHypotheses);
  return pool;
}
