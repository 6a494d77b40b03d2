/** Cross-modal attention: visual queries attend over textual keys/values.
 *
 * Both streams are first reduced from dModel to dCross, attention runs in
 * the reduced width with nHeads heads, and the attended result is projected
 * back up to dModel and added to the visual input as a residual. No layer
 * normalization wraps the insertion; the block is deliberately bare.
 */

import type { CrossModalConfig } from "./config.js";
import { validateConfig } from "./config.js";
import type { Mat } from "./matrix.js";
import {
  ShapeMismatch,
  add,
  addInPlace,
  columnSlice,
  matmul,
  matmulTA,
  matmulTB,
  mulberry32,
  randomMat,
  softmaxRows,
  writeColumnSlice,
  zeros,
} from "./matrix.js";

export interface CrossModalParams {
  /** dModel x dCross query reduction (visual side) */
  wq: Mat;
  /** dModel x dCross key reduction (textual side) */
  wk: Mat;
  /** dModel x dCross value reduction (textual side) */
  wv: Mat;
  /** dCross x dModel up-projection applied before the residual add */
  wup: Mat;
}

export function initCrossModalParams(cfg: CrossModalConfig, seed: number): CrossModalParams {
  validateConfig(cfg);
  const rand = mulberry32(seed);
  const scale = 1 / Math.sqrt(cfg.dModel);
  return {
    wq: randomMat(cfg.dModel, cfg.dCross, rand, scale),
    wk: randomMat(cfg.dModel, cfg.dCross, rand, scale),
    wv: randomMat(cfg.dModel, cfg.dCross, rand, scale),
    wup: randomMat(cfg.dCross, cfg.dModel, rand, scale),
  };
}

export interface CrossModalCache {
  visual: Mat;
  textual: Mat;
  q: Mat;
  k: Mat;
  v: Mat;
  /** per-head attention matrices, each nV x nT */
  attention: Mat[];
  /** concatenated attended values, nV x dCross */
  attended: Mat;
  output: Mat;
}

function checkShapes(visual: Mat, textual: Mat, params: CrossModalParams, cfg: CrossModalConfig): void {
  validateConfig(cfg);
  if (visual.cols !== cfg.dModel) {
    throw new ShapeMismatch(`visual tokens are ${visual.cols}-wide, config wants ${cfg.dModel}`);
  }
  if (textual.cols !== cfg.dModel) {
    throw new ShapeMismatch(`textual tokens are ${textual.cols}-wide, config wants ${cfg.dModel}`);
  }
  if (visual.rows < 1 || textual.rows < 1) {
    throw new ShapeMismatch("both token streams need at least one token");
  }
  if (params.wq.rows !== cfg.dModel || params.wq.cols !== cfg.dCross) {
    throw new ShapeMismatch("wq shape does not match config");
  }
  if (params.wup.rows !== cfg.dCross || params.wup.cols !== cfg.dModel) {
    throw new ShapeMismatch("wup shape does not match config");
  }
}

/** Forward pass; the cache carries everything the backward pass needs. */
export function crossModalForward(
  visual: Mat,
  textual: Mat,
  params: CrossModalParams,
  cfg: CrossModalConfig,
): CrossModalCache {
  checkShapes(visual, textual, params, cfg);
  const headDim = cfg.dCross / cfg.nHeads;
  const scale = 1 / Math.sqrt(headDim);

  const q = matmul(visual, params.wq);
  const k = matmul(textual, params.wk);
  const v = matmul(textual, params.wv);

  const attention: Mat[] = [];
  const attended = zeros(visual.rows, cfg.dCross);
  for (let h = 0; h < cfg.nHeads; h++) {
    const qh = columnSlice(q, h * headDim, headDim);
    const kh = columnSlice(k, h * headDim, headDim);
    const vh = columnSlice(v, h * headDim, headDim);
    const scores = matmulTB(qh, kh);
    for (let i = 0; i < scores.data.length; i++) scores.data[i] *= scale;
    const attn = softmaxRows(scores);
    attention.push(attn);
    writeColumnSlice(attended, h * headDim, matmul(attn, vh));
  }

  const output = add(visual, matmul(attended, params.wup));
  return { visual, textual, q, k, v, attention, attended, output };
}

export function crossModalBlock(
  visual: Mat,
  textual: Mat,
  params: CrossModalParams,
  cfg: CrossModalConfig,
): Mat {
  return crossModalForward(visual, textual, params, cfg).output;
}

export interface CrossModalGrads {
  wq: Mat;
  wk: Mat;
  wv: Mat;
  wup: Mat;
  visual: Mat;
  textual: Mat;
}

/** Backward pass for dLoss/dOutput -> gradients of params and both inputs. */
export function crossModalBackward(
  cache: CrossModalCache,
  dOutput: Mat,
  params: CrossModalParams,
  cfg: CrossModalConfig,
): CrossModalGrads {
  const headDim = cfg.dCross / cfg.nHeads;
  const scale = 1 / Math.sqrt(headDim);

  // output = visual + attended . wup
  const dVisual = { rows: dOutput.rows, cols: dOutput.cols, data: dOutput.data.slice() };
  const dWup = matmulTA(cache.attended, dOutput);
  const dAttended = matmulTB(dOutput, params.wup);

  const dQ = zeros(cache.q.rows, cache.q.cols);
  const dK = zeros(cache.k.rows, cache.k.cols);
  const dV = zeros(cache.v.rows, cache.v.cols);

  for (let h = 0; h < cfg.nHeads; h++) {
    const attn = cache.attention[h];
    const kh = columnSlice(cache.k, h * headDim, headDim);
    const qh = columnSlice(cache.q, h * headDim, headDim);
    const vh = columnSlice(cache.v, h * headDim, headDim);
    const dOh = columnSlice(dAttended, h * headDim, headDim);

    // attended_h = attn . v_h
    const dAttn = matmulTB(dOh, vh);
    const dVh = matmulTA(attn, dOh);

    // softmax backward per row: dS = A ⊙ (dA − rowdot(dA, A))
    const dScores = zeros(attn.rows, attn.cols);
    for (let i = 0; i < attn.rows; i++) {
      let rowDot = 0;
      for (let j = 0; j < attn.cols; j++) {
        rowDot += dAttn.data[i * attn.cols + j] * attn.data[i * attn.cols + j];
      }
      for (let j = 0; j < attn.cols; j++) {
        const a = attn.data[i * attn.cols + j];
        dScores.data[i * attn.cols + j] = a * (dAttn.data[i * attn.cols + j] - rowDot) * scale;
      }
    }

    // scores = scale · q_h . k_hᵀ
    writeColumnSlice(dQ, h * headDim, matmul(dScores, kh));
    writeColumnSlice(dK, h * headDim, matmulTA(dScores, qh));
    writeColumnSlice(dV, h * headDim, dVh);
  }

  const dWq = matmulTA(cache.visual, dQ);
  const dWk = matmulTA(cache.textual, dK);
  const dWv = matmulTA(cache.textual, dV);
  addInPlace(dVisual, matmulTB(dQ, params.wq));
  const dTextual = matmulTB(dK, params.wk);
  addInPlace(dTextual, matmulTB(dV, params.wv));

  return { wq: dWq, wk: dWk, wv: dWv, wup: dWup, visual: dVisual, textual: dTextual };
}
