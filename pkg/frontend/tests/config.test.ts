import { describe, expect, it } from "vitest";
import { ConfigError, DEFAULT_CONFIG, validateConfig } from "../src/config.js";

describe("validateConfig", () => {
  it("accepts the default geometry", () => {
    expect(() => validateConfig(DEFAULT_CONFIG)).not.toThrow();
    expect(DEFAULT_CONFIG).toEqual({
      nBlocks: 4,
      insertAfter: 3,
      dModel: 32,
      dCross: 16,
      nHeads: 4,
      dHidden: 64,
    });
  });

  it("wants the cross width strictly below the token width", () => {
    expect(() => validateConfig({ ...DEFAULT_CONFIG, dCross: 32 })).toThrow(ConfigError);
    expect(() => validateConfig({ ...DEFAULT_CONFIG, dCross: 48 })).toThrow(ConfigError);
  });

  it("wants the cross width divisible by the head count", () => {
    expect(() => validateConfig({ ...DEFAULT_CONFIG, nHeads: 3 })).toThrow(ConfigError);
  });

  it("keeps the insertion point strictly inside the stack", () => {
    expect(() => validateConfig({ ...DEFAULT_CONFIG, insertAfter: 0 })).toThrow(ConfigError);
    expect(() => validateConfig({ ...DEFAULT_CONFIG, insertAfter: 4 })).toThrow(ConfigError);
    expect(() => validateConfig({ ...DEFAULT_CONFIG, insertAfter: 2.5 })).toThrow(ConfigError);
  });

  it("needs at least two blocks", () => {
    expect(() => validateConfig({ ...DEFAULT_CONFIG, nBlocks: 1, insertAfter: 1 })).toThrow(ConfigError);
  });
});
