/** Central finite-difference verification of the hand-written backward passes.
 *
 * Loss is a fixed random linear functional of the encoder output, so dL/dOut
 * is a constant matrix and every nonlinearity still gets exercised through
 * the chain rule. A parameter entry passes when the analytic gradient and
 * the central difference agree within relative tolerance; near-zero pairs
 * are compared absolutely.
 */

import type { CrossModalConfig } from "./config.js";
import type { EncoderParams } from "./encoder.js";
import { encodeBackward, encodeForward } from "./encoder.js";
import type { Mat } from "./matrix.js";
import { mulberry32, randomMat } from "./matrix.js";

export const FD_STEP = 1e-5;
export const REL_TOLERANCE = 1e-4;
const ZERO_FLOOR = 1e-7;

export interface GradCheckFailure {
  tensor: string;
  index: number;
  analytic: number;
  numeric: number;
  relError: number;
}

export interface GradCheckReport {
  checked: number;
  worstRelError: number;
  failures: GradCheckFailure[];
}

function lossAndGrad(
  visual: Mat,
  textual: Mat,
  params: EncoderParams,
  cfg: CrossModalConfig,
  coeffs: Mat,
): { loss: number; grads: ReturnType<typeof encodeBackward> } {
  const cache = encodeForward(visual, textual, params, cfg);
  let loss = 0;
  for (let i = 0; i < coeffs.data.length; i++) loss += coeffs.data[i] * cache.output.data[i];
  return { loss, grads: encodeBackward(cache, coeffs, params, cfg) };
}

function lossOnly(
  visual: Mat,
  textual: Mat,
  params: EncoderParams,
  cfg: CrossModalConfig,
  coeffs: Mat,
): number {
  const out = encodeForward(visual, textual, params, cfg).output;
  let loss = 0;
  for (let i = 0; i < coeffs.data.length; i++) loss += coeffs.data[i] * out.data[i];
  return loss;
}

function relError(analytic: number, numeric: number): number {
  const denom = Math.max(Math.abs(analytic), Math.abs(numeric));
  if (denom < ZERO_FLOOR) return 0;
  return Math.abs(analytic - numeric) / denom;
}

/**
 * Check `stride`-spaced entries of one tensor (stride 1 = every entry).
 * The tensor is perturbed in place and restored after each probe.
 */
function checkTensor(
  name: string,
  tensor: Mat,
  analytic: Mat,
  stride: number,
  evalLoss: () => number,
  report: GradCheckReport,
): void {
  for (let i = 0; i < tensor.data.length; i += stride) {
    const saved = tensor.data[i];
    tensor.data[i] = saved + FD_STEP;
    const up = evalLoss();
    tensor.data[i] = saved - FD_STEP;
    const down = evalLoss();
    tensor.data[i] = saved;
    const numeric = (up - down) / (2 * FD_STEP);
    const err = relError(analytic.data[i], numeric);
    report.checked++;
    report.worstRelError = Math.max(report.worstRelError, err);
    if (err > REL_TOLERANCE) {
      report.failures.push({ tensor: name, index: i, analytic: analytic.data[i], numeric, relError: err });
    }
  }
}

/**
 * Verify analytic gradients through the full encoder.
 *
 * Every cross-modal parameter entry is always checked; the plain blocks are
 * probed at `blockStride` spacing (they exist to give the cross-modal block
 * a realistic surrounding, not as the object under test). The text
 * embedding table is not a parameter here at all: textual features enter as
 * activations, mirroring a frozen text encoder.
 */
export function gradCheck(
  visual: Mat,
  textual: Mat,
  params: EncoderParams,
  cfg: CrossModalConfig,
  seed = 2024,
  blockStride = 7,
): GradCheckReport {
  const coeffs = randomMat(visual.rows, cfg.dModel, mulberry32(seed), 1);
  const { grads } = lossAndGrad(visual, textual, params, cfg, coeffs);
  const evalLoss = () => lossOnly(visual, textual, params, cfg, coeffs);

  const report: GradCheckReport = { checked: 0, worstRelError: 0, failures: [] };
  checkTensor("cross.wq", params.cross.wq, grads.cross.wq, 1, evalLoss, report);
  checkTensor("cross.wk", params.cross.wk, grads.cross.wk, 1, evalLoss, report);
  checkTensor("cross.wv", params.cross.wv, grads.cross.wv, 1, evalLoss, report);
  checkTensor("cross.wup", params.cross.wup, grads.cross.wup, 1, evalLoss, report);
  params.blocks.forEach((block, b) => {
    checkTensor(`blocks[${b}].w1`, block.w1, grads.blocks[b].dW1, blockStride, evalLoss, report);
    checkTensor(`blocks[${b}].w2`, block.w2, grads.blocks[b].dW2, blockStride, evalLoss, report);
  });
  // input gradients: perturb the visual/textual activations the same way
  checkTensor("visual", visual, grads.visual, 3, evalLoss, report);
  checkTensor("textual", textual, grads.cross.textual, 3, evalLoss, report);
  return report;
}
