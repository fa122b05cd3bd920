/**
 * Beam-decode the test split and write the prediction exchange file.
 *
 * Format, shared with the evaluation pipeline: one `#beam=K` header per
 * block, then `instance_id<TAB>rank<TAB>space-joined tokens` lines with
 * ranks dense from 1. Blocks are written in ascending beam order and hold
 * hypothesis bodies only (no end-of-sequence marker).
 */

import * as fs from "fs";
import * as path from "path";
import { ensureBackend } from "./backend";
import { beamSearch, hypothesisBody } from "./beam";
import { loadSplit } from "./bundle";
import { encodeInstances } from "./data";
import { makeStepModel } from "./decode";
import { ExportError } from "./errors";
import { Checkpoint } from "./train";

const DEFAULT_MAX_BEAM = 10;

export interface ExportOptions {
  beamSizes: number[];
  /** Upper bound a single block's beam size may take. */
  maxBeamSize?: number;
  /** Decode length cap; defaults to longest test target plus slack. */
  maxLen?: number;
}

export interface ExportResult {
  file: string;
  instances: number;
  lines: number;
  beamSizes: number[];
}

export async function exportPredictions(
  checkpoint: Checkpoint,
  bundleDir: string,
  outFile: string,
  options: ExportOptions,
): Promise<ExportResult> {
  await ensureBackend();
  const maxBeam = options.maxBeamSize ?? DEFAULT_MAX_BEAM;
  const beamSizes = [...options.beamSizes].sort((a, b) => a - b);
  if (beamSizes.length === 0) {
    throw new ExportError("no beam sizes requested");
  }
  for (const k of beamSizes) {
    if (!Number.isInteger(k) || k < 1) {
      throw new ExportError(`beam size must be a positive integer, got ${k}`);
    }
    if (k > maxBeam) {
      throw new ExportError(`beam size ${k} exceeds configured maximum ${maxBeam}`);
    }
  }
  if (new Set(beamSizes).size !== beamSizes.length) {
    throw new ExportError(`duplicate beam sizes in ${JSON.stringify(options.beamSizes)}`);
  }

  const dataset = checkpoint.kind === "two-encoder" ? "d_t" : "d_p";
  const instances = loadSplit(bundleDir, dataset, "test");
  const encoded = encodeInstances(checkpoint.vocab, instances, checkpoint.kind === "two-encoder");
  const maxTgt = encoded.length === 0 ? 0 : Math.max(...encoded.map((x) => x.tgt.length));
  const cap = checkpoint.params.maxPositions - 2;
  const maxLen = Math.min(options.maxLen ?? maxTgt + 2, cap);
  if (maxLen < 1) {
    throw new ExportError(`decode length cap ${maxLen} is not usable`);
  }

  const lines: string[] = [];
  for (const k of beamSizes) {
    lines.push(`#beam=${k}`);
    for (const instance of encoded) {
      const model = makeStepModel(checkpoint.params, checkpoint.vocab, instance);
      try {
        const hypotheses = beamSearch(model, k, maxLen);
        hypotheses.forEach((h, i) => {
          const body = hypothesisBody(h, model.eosToken);
          lines.push(`${instance.instanceId}\t${i + 1}\t${body.join(" ")}`);
        });
      } finally {
        model.dispose();
      }
    }
  }

  fs.mkdirSync(path.dirname(path.resolve(outFile)), { recursive: true });
  fs.writeFileSync(outFile, lines.join("\n") + "\n", "utf-8");
  return {
    file: outFile,
    instances: encoded.length,
    lines: lines.length,
    beamSizes,
  };
}
