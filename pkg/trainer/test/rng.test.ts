import { describe, expect, it } from "vitest";
import { Rng } from "../src/rng";

describe("Rng", () => {
  it("is deterministic for a fixed seed", () => {
    const a = new Rng(42);
    const b = new Rng(42);
    for (let i = 0; i < 100; i++) {
      expect(a.next()).toBe(b.next());
    }
  });

  it("produces different streams for different seeds", () => {
    const a = Array.from({ length: 8 }, () => new Rng(1).next());
    const first = new Rng(1).next();
    const second = new Rng(2).next();
    expect(first).not.toBe(second);
    expect(new Set(a).size).toBe(1); // same seed, same first draw
  });

  it("keeps next() in [0, 1)", () => {
    const rng = new Rng(7);
    for (let i = 0; i < 1000; i++) {
      const u = rng.next();
      expect(u).toBeGreaterThanOrEqual(0);
      expect(u).toBeLessThan(1);
    }
  });

  it("int(n) covers the full range and only that range", () => {
    const rng = new Rng(3);
    const seen = new Set<number>();
    for (let i = 0; i < 500; i++) {
      const v = rng.int(5);
      expect(Number.isInteger(v)).toBe(true);
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThan(5);
      seen.add(v);
    }
    expect(seen.size).toBe(5);
  });

  it("int rejects non-positive and fractional bounds", () => {
    const rng = new Rng(1);
    expect(() => rng.int(0)).toThrow(RangeError);
    expect(() => rng.int(-2)).toThrow(RangeError);
    expect(() => rng.int(2.5)).toThrow(RangeError);
  });

  it("uniform stays inside the open interval", () => {
    const rng = new Rng(9);
    for (let i = 0; i < 1000; i++) {
      const v = rng.uniform(2, 3);
      expect(v).toBeGreaterThan(2);
      expect(v).toBeLessThan(3);
    }
  });

  it("pick draws members and rejects empty lists", () => {
    const rng = new Rng(5);
    const items = ["a", "b", "c"];
    for (let i = 0; i < 50; i++) {
      expect(items).toContain(rng.pick(items));
    }
    expect(() => rng.pick([])).toThrow(RangeError);
  });

  it("shuffle permutes in place and deterministically", () => {
    const a = new Rng(11).shuffle([1, 2, 3, 4, 5, 6, 7, 8]);
    const b = new Rng(11).shuffle([1, 2, 3, 4, 5, 6, 7, 8]);
    expect(a).toEqual(b);
    expect([...a].sort((x, y) => x - y)).toEqual([1, 2, 3, 4, 5, 6, 7, 8]);
    const identity = new Rng(11).shuffle([1]);
    expect(identity).toEqual([1]);
  });

  it("normal draws have roughly the requested moments", () => {
    const rng = new Rng(13);
    const n = 20000;
    let sum = 0;
    let sumSq = 0;
    for (let i = 0; i < n; i++) {
      const v = rng.normal(2, 3);
      sum += v;
      sumSq += v * v;
    }
    const mean = sum / n;
    const variance = sumSq / n - mean * mean;
    expect(Math.abs(mean - 2)).toBeLessThan(0.1);
    expect(Math.abs(Math.sqrt(variance) - 3)).toBeLessThan(0.15);
  });

  it("child streams are deterministic, label-sensitive and decorrelated", () => {
    const base = () => new Rng(21);
    const a = base().child("init").next();
    const b = base().child("init").next();
    const c = base().child("dropout").next();
    expect(a).toBe(b);
    expect(a).not.toBe(c);
    // numeric labels hash like their tagged string form
    expect(base().child(4).next()).toBe(base().child(4).next());
    expect(base().child(4).next()).not.toBe(base().child(5).next());
  });

  it("child derives from current state, so order matters", () => {
    const first = new Rng(33);
    const early = first.child("x").next();
    first.next();
    const late = first.child("x").next();
    expect(early).not.toBe(late);
  });

  it("normalArray fills the requested length", () => {
    const arr = new Rng(8).normalArray(10, 0.5);
    expect(arr).toBeInstanceOf(Float32Array);
    expect(arr.length).toBe(10);
    expect(arr.some((v) => v !== 0)).toBe(true);
  });
});
