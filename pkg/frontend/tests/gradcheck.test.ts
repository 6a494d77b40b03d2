import { describe, expect, it } from "vitest";
import type { CrossModalConfig } from "../src/config.js";
import { DEFAULT_CONFIG } from "../src/config.js";
import { initEncoderParams } from "../src/encoder.js";
import { FD_STEP, REL_TOLERANCE, gradCheck } from "../src/gradcheck.js";
import { mulberry32, randomMat } from "../src/matrix.js";


function streams(cfg: CrossModalConfig, seed: number, nV = 4, nT = 6) {
  const rand = mulberry32(seed);
  return {
    visual: randomMat(nV, cfg.dModel, rand),
    textual: randomMat(nT, cfg.dModel, rand),
  };
}

describe("gradCheck", () => {
  it("pins the probe hyperparameters", () => {
    expect(FD_STEP).toBe(1e-5);
    expect(REL_TOLERANCE).toBe(1e-4);
  });

  it("passes on a small geometry with every entry probed", () => {
    const cfg: CrossModalConfig = {
      nBlocks: 2,
      insertAfter: 1,
      dModel: 8,
      dCross: 4,
      nHeads: 2,
      dHidden: 12,
    };
    const { visual, textual } = streams(cfg, 31, 3, 5);
    const report = gradCheck(visual, textual, initEncoderParams(cfg, 31), cfg, 31, 1);
    // every parameter, visual entries stride 3 (hardwired), textual likewise
    expect(report.failures).toEqual([]);
    expect(report.worstRelError).toBeLessThan(REL_TOLERANCE);
    expect(report.checked).toBeGreaterThan(2 * (8 * 4 + 8 * 4) + 2 * (8 * 12 + 12 * 8));
  });

  it("passes on the full toy geometry", () => {
    const cfg = DEFAULT_CONFIG;
    const { visual, textual } = streams(cfg, 7);
    const report = gradCheck(visual, textual, initEncoderParams(cfg, 7), cfg);
    expect(report.failures).toEqual([]);
    expect(report.worstRelError).toBeLessThan(REL_TOLERANCE);
    // all 4 cross projections are dModel*dCross entries, probed exhaustively
    expect(report.checked).toBeGreaterThanOrEqual(4 * cfg.dModel * cfg.dCross);
  });

  it("catches a missing tied-weight gradient contribution", () => {
    const cfg = DEFAULT_CONFIG;
    const { visual, textual } = streams(cfg, 8);
    const params = initEncoderParams(cfg, 8);
    expect(gradCheck(visual, textual, params, cfg).failures).toEqual([]);
    // alias keys to queries; the backward pass still reports the two
    // contributions separately while finite differences see their sum
    params.cross.wk = params.cross.wq;
    const report = gradCheck(visual, textual, params, cfg);
    expect(report.failures.length).toBeGreaterThan(0);
    expect(report.worstRelError).toBeGreaterThan(REL_TOLERANCE);
  });
});
