#!/usr/bin/env node
/** Invariant runner for the cross-modal fusion block.
 *
 * Usage: check_crossmodal <augmented.jsonl>
 *
 * Feeds question-answer text from a real augmented file through the toy
 * encoder and verifies the block's contract: shape preservation, attention
 * rows summing to one, exact residual pass-through when the fusion
 * projection is zeroed, single-token attention collapsing to exactly 1.0,
 * determinism across runs, and analytic gradients against central finite
 * differences. Exits 1 on the first broken invariant, 2 on usage errors.
 */

import { DEFAULT_CONFIG, validateConfig } from "./config.js";
import { crossModalForward, initCrossModalParams } from "./attention.js";
import { encodeForward, initEncoderParams } from "./encoder.js";
import { gradCheck, REL_TOLERANCE } from "./gradcheck.js";
import { embedText, makeEmbeddingTable, readAugmented, syntheticVisualTokens } from "./data.js";
import { maxAbsDiff, zeros } from "./matrix.js";
import type { Mat } from "./matrix.js";

const SUM_TOLERANCE = 1e-6;
const RESIDUAL_TOLERANCE = 1e-6;
const N_VISUAL = 6;

let failures = 0;

function report(name: string, ok: boolean, detail: string): void {
  console.log(`[${ok ? "PASS" : "FAIL"}] ${name}: ${detail}`);
  if (!ok) {
    failures += 1;
  }
}

function projectTextual(tokens: Mat, cfg = DEFAULT_CONFIG): Mat {
  // dModel-wide embeddings already match what the block consumes.
  if (tokens.cols !== cfg.dModel) {
    throw new Error(`textual width ${tokens.cols} != dModel ${cfg.dModel}`);
  }
  return tokens;
}

function main(): number {
  const args = process.argv.slice(2);
  if (args.length !== 1) {
    console.error("usage: check_crossmodal <augmented.jsonl>");
    return 2;
  }

  const cfg = DEFAULT_CONFIG;
  validateConfig(cfg);
  let header: Record<string, unknown>;
  let records: ReturnType<typeof readAugmented>["records"];
  try {
    ({ header, records } = readAugmented(args[0]));
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 2;
  }
  if (records.length === 0) {
    console.error(`${args[0]} carries no records`);
    return 2;
  }
  console.log(
    `loaded ${records.length} records (schema=${String(header["schema"])}, ` +
      `template=${String(header["template_version"])})`,
  );

  const table = makeEmbeddingTable(cfg.dModel, 7);
  const params = initEncoderParams(cfg, 42);
  const sample = records[0];
  const textual = projectTextual(embedText(sample.qaTexts.join(" "), table), cfg);
  const visual = syntheticVisualTokens(sample.id, N_VISUAL, cfg.dModel);

  // 1. shape preservation through the whole encoder
  const cache = encodeForward(visual, textual, params, cfg);
  report(
    "shape preservation",
    cache.output.rows === visual.rows && cache.output.cols === visual.cols,
    `output ${cache.output.rows}x${cache.output.cols} for input ${visual.rows}x${visual.cols}`,
  );

  // 2. attention rows are probability distributions
  let worstSum = 0;
  for (const head of cache.crossCache!.attention) {
    for (let i = 0; i < head.rows; i++) {
      let s = 0;
      for (let j = 0; j < head.cols; j++) {
        s += head.data[i * head.cols + j];
      }
      worstSum = Math.max(worstSum, Math.abs(s - 1));
    }
  }
  report("attention row sums", worstSum <= SUM_TOLERANCE, `max |sum-1| = ${worstSum.toExponential(3)}`);

  // 3. zeroed fusion projection reduces the block to the identity
  const zeroed = initCrossModalParams(cfg, 42);
  zeroed.wup = zeros(cfg.dCross, cfg.dModel);
  const passthrough = crossModalForward(visual, textual, zeroed, cfg).output;
  const residualGap = maxAbsDiff(passthrough, visual);
  report(
    "residual pass-through",
    residualGap <= RESIDUAL_TOLERANCE,
    `max |out-in| = ${residualGap.toExponential(3)} with zeroed output projection`,
  );

  // 4. a single textual token gets all the attention, exactly
  const oneToken = projectTextual(embedText("x", table, 1), cfg);
  const single = crossModalForward(visual, oneToken, params.cross, cfg);
  let exact = true;
  for (const head of single.attention) {
    for (let i = 0; i < head.data.length; i++) {
      if (head.data[i] !== 1) {
        exact = false;
      }
    }
  }
  report("single-token attention", exact, "every attention weight is exactly 1.0 when n_t = 1");

  // 5. determinism
  const again = encodeForward(visual, textual, initEncoderParams(cfg, 42), cfg);
  const driftRun = maxAbsDiff(cache.output, again.output);
  report("determinism", driftRun === 0, `re-run max drift = ${driftRun.toExponential(3)}`);

  // 6. analytic gradients vs central finite differences
  const gc = gradCheck(visual, textual, params, cfg);
  report(
    "gradient check",
    gc.failures.length === 0,
    `${gc.checked} entries, worst rel err = ${gc.worstRelError.toExponential(3)} (tol ${REL_TOLERANCE})`,
  );
  for (const f of gc.failures.slice(0, 5)) {
    console.log(`    ${f.tensor}[${f.index}]: analytic=${f.analytic} numeric=${f.numeric} rel=${f.relError}`);
  }

  if (failures > 0) {
    console.log(`${failures} invariant(s) broken`);
    return 1;
  }
  console.log("all invariants hold");
  return 0;
}

process.exit(main());
