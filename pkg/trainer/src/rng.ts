/**
 * Deterministic random source for weight init, batching, dropout masks and
 * the TPE sampler. Every consumer takes an Rng instead of touching
 * Math.random so that a run is a pure function of its seed.
 */

function mix(seed: number): number {
  // splitmix32 finalizer, good enough to decorrelate derived streams
  let z = seed >>> 0;
  z = (z + 0x9e3779b9) >>> 0;
  z ^= z >>> 16;
  z = Math.imul(z, 0x21f0aaad) >>> 0;
  z ^= z >>> 15;
  z = Math.imul(z, 0x735a2d97) >>> 0;
  z ^= z >>> 15;
  return z >>> 0;
}

function hashLabel(label: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < label.length; i++) {
    h ^= label.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

export class Rng {
  private state: number;
  private spare: number | null = null;

  constructor(seed: number) {
    this.state = mix(seed);
    if (this.state === 0) this.state = 0x6d2b79f5;
  }

  /** Uniform float in [0, 1). mulberry32. */
  next(): number {
    this.state = (this.state + 0x6d2b79f5) >>> 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  /** Uniform integer in [0, n). */
  int(n: number): number {
    if (!Number.isInteger(n) || n <= 0) {
      throw new RangeError(`int() needs a positive integer bound, got ${n}`);
    }
    return Math.floor(this.next() * n);
  }

  /** Uniform float in (lo, hi), endpoints excluded. */
  uniform(lo: number, hi: number): number {
    let u = this.next();
    while (u === 0) u = this.next();
    return lo + u * (hi - lo);
  }

  pick<T>(items: readonly T[]): T {
    if (items.length === 0) throw new RangeError("pick() from an empty list");
    return items[this.int(items.length)];
  }

  /** Fisher-Yates shuffle, in place, returns the array. */
  shuffle<T>(items: T[]): T[] {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      const tmp = items[i];
      items[i] = items[j];
      items[j] = tmp;
    }
    return items;
  }

  /** Standard normal via Box-Muller, one spare cached. */
  normal(mean = 0, std = 1): number {
    if (this.spare !== null) {
      const value = this.spare;
      this.spare = null;
      return mean + std * value;
    }
    let u = this.next();
    while (u === 0) u = this.next();
    const v = this.next();
    const radius = Math.sqrt(-2 * Math.log(u));
    this.spare = radius * Math.sin(2 * Math.PI * v);
    return mean + std * radius * Math.cos(2 * Math.PI * v);
  }

  /** Independent stream derived from this one's current state and a label. */
  child(label: string | number): Rng {
    const tag = typeof label === "number" ? `#${label}` : label;
    return new Rng(mix(this.state ^ hashLabel(tag)));
  }

  /** Fill a Float32Array with normal(0, std) draws. */
  normalArray(length: number, std: number): Float32Array {
    const out = new Float32Array(length);
    for (let i = 0; i < length; i++) out[i] = this.normal(0, std);
    return out;
  }
}
