import * as tf from "@tensorflow/tfjs";
import { describe, expect, it } from "vitest";
import { ensureBackend } from "../src/backend";

describe("ensureBackend", () => {
  it("activates wasm (or the cpu fallback) and memoizes", async () => {
    const name = await ensureBackend();
    expect(["wasm", "cpu"]).toContain(name);
    expect(tf.getBackend()).toBe(name);
    // second call must not re-register or switch
    expect(await ensureBackend()).toBe(name);
  });
});
