/** Toy encoder: plain residual MLP blocks with one cross-modal block inserted.
 *
 * encode() runs insertAfter plain blocks over the visual tokens, applies the
 * cross-modal block against the textual tokens, then runs the remaining
 * plain blocks. Every stage has a hand-written backward pass so gradients
 * can be verified against finite differences without a framework.
 */

import type { CrossModalConfig } from "./config.js";
import { validateConfig } from "./config.js";
import type { CrossModalParams, CrossModalGrads } from "./attention.js";
import { crossModalBackward, crossModalForward, initCrossModalParams } from "./attention.js";
import type { Mat } from "./matrix.js";
import {
  ShapeMismatch,
  add,
  addInPlace,
  map,
  matmul,
  matmulTA,
  matmulTB,
  mulberry32,
  randomMat,
  zeros,
} from "./matrix.js";

export interface BlockParams {
  /** dModel x dHidden */
  w1: Mat;
  /** dHidden x dModel */
  w2: Mat;
}

export interface EncoderParams {
  blocks: BlockParams[];
  cross: CrossModalParams;
}

export function initEncoderParams(cfg: CrossModalConfig, seed: number): EncoderParams {
  validateConfig(cfg);
  const rand = mulberry32(seed ^ 0x5f3759df);
  const blocks: BlockParams[] = [];
  for (let b = 0; b < cfg.nBlocks; b++) {
    blocks.push({
      w1: randomMat(cfg.dModel, cfg.dHidden, rand, 1 / Math.sqrt(cfg.dModel)),
      w2: randomMat(cfg.dHidden, cfg.dModel, rand, 1 / Math.sqrt(cfg.dHidden)),
    });
  }
  return { blocks, cross: initCrossModalParams(cfg, seed) };
}

interface BlockCache {
  input: Mat;
  hidden: Mat;
}

/** y = x + tanh(x . w1) . w2 */
function blockForward(x: Mat, p: BlockParams): { out: Mat; cache: BlockCache } {
  if (x.cols !== p.w1.rows) {
    throw new ShapeMismatch(`block wants ${p.w1.rows}-wide tokens, got ${x.cols}`);
  }
  const hidden = map(matmul(x, p.w1), Math.tanh);
  const out = add(x, matmul(hidden, p.w2));
  return { out, cache: { input: x, hidden } };
}

function blockBackward(
  cache: BlockCache,
  dOut: Mat,
  p: BlockParams,
): { dIn: Mat; dW1: Mat; dW2: Mat } {
  const dIn = { rows: dOut.rows, cols: dOut.cols, data: dOut.data.slice() };
  const dW2 = matmulTA(cache.hidden, dOut);
  const dHidden = matmulTB(dOut, p.w2);
  const dPre = zeros(dHidden.rows, dHidden.cols);
  for (let i = 0; i < dPre.data.length; i++) {
    const t = cache.hidden.data[i];
    dPre.data[i] = dHidden.data[i] * (1 - t * t);
  }
  const dW1 = matmulTA(cache.input, dPre);
  addInPlace(dIn, matmulTB(dPre, p.w1));
  return { dIn, dW1, dW2 };
}

export interface EncodeCache {
  blockCaches: BlockCache[];
  crossCache: ReturnType<typeof crossModalForward> | null;
  output: Mat;
}

/**
 * Full forward pass. `useCross=false` runs the same plain blocks with no
 * cross-modal insertion, for the residual pass-through comparison.
 */
export function encodeForward(
  visual: Mat,
  textual: Mat,
  params: EncoderParams,
  cfg: CrossModalConfig,
  useCross = true,
): EncodeCache {
  validateConfig(cfg);
  if (params.blocks.length !== cfg.nBlocks) {
    throw new ShapeMismatch(`config wants ${cfg.nBlocks} blocks, params carry ${params.blocks.length}`);
  }
  let x = visual;
  const blockCaches: BlockCache[] = [];
  for (let b = 0; b < cfg.insertAfter; b++) {
    const { out, cache } = blockForward(x, params.blocks[b]);
    blockCaches.push(cache);
    x = out;
  }
  let crossCache: EncodeCache["crossCache"] = null;
  if (useCross) {
    crossCache = crossModalForward(x, textual, params.cross, cfg);
    x = crossCache.output;
  }
  for (let b = cfg.insertAfter; b < cfg.nBlocks; b++) {
    const { out, cache } = blockForward(x, params.blocks[b]);
    blockCaches.push(cache);
    x = out;
  }
  return { blockCaches, crossCache, output: x };
}

export function encode(visual: Mat, textual: Mat, params: EncoderParams, cfg: CrossModalConfig): Mat {
  return encodeForward(visual, textual, params, cfg).output;
}

export interface EncoderGrads {
  blocks: { dW1: Mat; dW2: Mat }[];
  cross: CrossModalGrads;
  visual: Mat;
}

export function encodeBackward(
  cache: EncodeCache,
  dOutput: Mat,
  params: EncoderParams,
  cfg: CrossModalConfig,
): EncoderGrads {
  if (cache.crossCache === null) {
    throw new ShapeMismatch("backward needs a cache from a cross-modal forward pass");
  }
  const blockGrads: { dW1: Mat; dW2: Mat }[] = new Array(cfg.nBlocks);
  let d = dOutput;
  for (let b = cfg.nBlocks - 1; b >= cfg.insertAfter; b--) {
    const { dIn, dW1, dW2 } = blockBackward(cache.blockCaches[b], d, params.blocks[b]);
    blockGrads[b] = { dW1, dW2 };
    d = dIn;
  }
  const crossGrads = crossModalBackward(cache.crossCache, d, params.cross, cfg);
  d = crossGrads.visual;
  for (let b = cfg.insertAfter - 1; b >= 0; b--) {
    const { dIn, dW1, dW2 } = blockBackward(cache.blockCaches[b], d, params.blocks[b]);
    blockGrads[b] = { dW1, dW2 };
    d = dIn;
  }
  return { blocks: blockGrads, cross: crossGrads, visual: d };
}
