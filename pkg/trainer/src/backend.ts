/**
 * Backend selection. The wasm backend is an order of magnitude faster than
 * the plain JS cpu backend and is what makes toy-scale training practical;
 * if its binary cannot be located we fall back to cpu so everything still
 * runs, just slower.
 */

import * as fs from "fs";
import * as path from "path";
import * as tf from "@tensorflow/tfjs";
import { setWasmPaths } from "@tensorflow/tfjs-backend-wasm";

let ready: Promise<string> | null = null;

function wasmDistDir(): string | null {
  try {
    const entry = require.resolve("@tensorflow/tfjs-backend-wasm");
    const candidate = path.join(path.dirname(entry));
    if (fs.existsSync(path.join(candidate, "tfjs-backend-wasm.wasm"))) {
      return candidate;
    }
  } catch {
    // resolution failed; try the directory walk below
  }
  let dir = process.cwd();
  for (let i = 0; i < 8; i++) {
    const candidate = path.join(
      dir,
      "node_modules",
      "@tensorflow",
      "tfjs-backend-wasm",
      "dist",
    );
    if (fs.existsSync(path.join(candidate, "tfjs-backend-wasm.wasm"))) {
      return candidate;
    }
    const parent = path.dirname(dir);
    if (parent === dir) break;
    dir = parent;
  }
  return null;
}

/** Initialize the preferred backend once; returns its name. */
export async function ensureBackend(): Promise<string> {
  if (ready === null) {
    ready = (async () => {
      const dist = wasmDistDir();
      if (dist !== null) {
        try {
          setWasmPaths(dist + path.sep);
          const ok = await tf.setBackend("wasm");
          if (ok) {
            await tf.ready();
            return tf.getBackend();
          }
        } catch {
          // fall through to cpu
        }
      }
      await tf.setBackend("cpu");
      await tf.ready();
      return tf.getBackend();
    })();
  }
  return ready;
}
