/** Reader for the augmented question-answer JSONL produced by the charqa CLI.
 *
 * Only the external contract is consumed: a header line carrying `schema`,
 * then one record per line with `id`, `text` and `qa[{q, a}]`. Question and
 * answer strings become the textual token stream; a fixed lookup table
 * stands in for a frozen text encoder.
 */

import { readFileSync } from "node:fs";
import type { Mat } from "./matrix.js";
import { mulberry32, randomMat, zeros } from "./matrix.js";

export const SUPPORTED_SCHEMA = "charqa.augmented/1";

export interface QaRecord {
  id: string;
  text: string;
  /** flattened "question answer" strings, recognition pair first */
  qaTexts: string[];
}

export class DataError extends Error {}

export function readAugmented(path: string): { header: Record<string, unknown>; records: QaRecord[] } {
  const raw = readFileSync(path, "utf-8");
  const lines = raw.split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new DataError(`${path} is empty`);
  }
  const header = JSON.parse(lines[0]) as Record<string, unknown>;
  if (header["schema"] !== SUPPORTED_SCHEMA) {
    throw new DataError(`unsupported schema ${String(header["schema"])}, want ${SUPPORTED_SCHEMA}`);
  }
  const records: QaRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const obj = JSON.parse(lines[i]) as {
      id?: unknown;
      text?: unknown;
      qa?: { q?: unknown; a?: unknown }[];
    };
    if (typeof obj.id !== "string" || typeof obj.text !== "string" || !Array.isArray(obj.qa)) {
      throw new DataError(`line ${i + 1}: record must carry id, text and qa`);
    }
    const qaTexts = obj.qa.map((pair, j) => {
      if (typeof pair.q !== "string" || typeof pair.a !== "string") {
        throw new DataError(`line ${i + 1}: qa[${j}] must carry string q and a`);
      }
      return `${pair.q} ${pair.a}`;
    });
    records.push({ id: obj.id, text: obj.text, qaTexts });
  }
  return { header, records };
}

/** Frozen character-level embedding lookup. */
export interface EmbeddingTable {
  rows: number;
  dModel: number;
  table: Mat;
}

export function makeEmbeddingTable(dModel: number, seed: number, rows = 128): EmbeddingTable {
  return { rows, dModel, table: randomMat(rows, dModel, mulberry32(seed), 0.5) };
}

/** Embed up to maxTokens characters of `text` as an nT x dModel matrix. */
export function embedText(text: string, table: EmbeddingTable, maxTokens = 16): Mat {
  const units = Array.from(text);
  const n = Math.max(1, Math.min(units.length, maxTokens));
  const out = zeros(n, table.dModel);
  for (let i = 0; i < n; i++) {
    const row = i < units.length ? units[i].codePointAt(0)! % table.rows : 0;
    for (let j = 0; j < table.dModel; j++) {
      out.data[i * table.dModel + j] = table.table.data[row * table.dModel + j];
    }
  }
  return out;
}

/** Deterministic stand-in visual tokens keyed on the record id. */
export function syntheticVisualTokens(id: string, nTokens: number, dModel: number): Mat {
  let h = 2166136261;
  for (const ch of id) {
    h = Math.imul(h ^ ch.codePointAt(0)!, 16777619);
  }
  return randomMat(nTokens, dModel, mulberry32(h >>> 0), 1);
}
