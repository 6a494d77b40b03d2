/** Encoder geometry. Defaults keep the full-scale structural ratios at desk size. */

export interface CrossModalConfig {
  /** total plain encoder blocks */
  nBlocks: number;
  /** how many plain blocks run before the cross-modal block */
  insertAfter: number;
  /** token width */
  dModel: number;
  /** reduced attention width */
  dCross: number;
  nHeads: number;
  /** hidden width of each plain block's MLP */
  dHidden: number;
}

export const DEFAULT_CONFIG: CrossModalConfig = {
  nBlocks: 4,
  insertAfter: 3,
  dModel: 32,
  dCross: 16,
  nHeads: 4,
  dHidden: 64,
};

export class ConfigError extends Error {}

export function validateConfig(cfg: CrossModalConfig): void {
  if (!Number.isInteger(cfg.nBlocks) || cfg.nBlocks < 2) {
    throw new ConfigError(`nBlocks must be an integer >= 2, got ${cfg.nBlocks}`);
  }
  if (!Number.isInteger(cfg.insertAfter) || cfg.insertAfter < 1 || cfg.insertAfter >= cfg.nBlocks) {
    throw new ConfigError(`insertAfter must satisfy 1 <= insertAfter < nBlocks, got ${cfg.insertAfter}`);
  }
  if (cfg.dCross >= cfg.dModel) {
    throw new ConfigError(`dCross must be smaller than dModel, got ${cfg.dCross} >= ${cfg.dModel}`);
  }
  if (cfg.dCross % cfg.nHeads !== 0) {
    throw new ConfigError(`dCross (${cfg.dCross}) must be divisible by nHeads (${cfg.nHeads})`);
  }
  if (cfg.dModel < 1 || cfg.dHidden < 1 || cfg.nHeads < 1) {
    throw new ConfigError("dModel, dHidden and nHeads must be positive");
  }
}
