/** Dense row-major matrices over Float64Array, plus a seeded PRNG. */

export interface Mat {
  rows: number;
  cols: number;
  data: Float64Array;
}

export class ShapeMismatch extends Error {}

export function zeros(rows: number, cols: number): Mat {
  if (rows < 1 || cols < 1) {
    throw new ShapeMismatch(`matrix dimensions must be positive, got ${rows}x${cols}`);
  }
  return { rows, cols, data: new Float64Array(rows * cols) };
}

export function clone(m: Mat): Mat {
  return { rows: m.rows, cols: m.cols, data: m.data.slice() };
}

export function get(m: Mat, i: number, j: number): number {
  return m.data[i * m.cols + j];
}

export function set(m: Mat, i: number, j: number, v: number): void {
  m.data[i * m.cols + j] = v;
}

/** mulberry32: tiny deterministic PRNG, uniform in [0, 1). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Uniform init in [-scale, scale) from a seeded stream. */
export function randomMat(rows: number, cols: number, rand: () => number, scale = 0.5): Mat {
  const m = zeros(rows, cols);
  for (let i = 0; i < m.data.length; i++) {
    m.data[i] = (rand() * 2 - 1) * scale;
  }
  return m;
}

export function matmul(a: Mat, b: Mat): Mat {
  if (a.cols !== b.rows) {
    throw new ShapeMismatch(`cannot multiply ${a.rows}x${a.cols} by ${b.rows}x${b.cols}`);
  }
  const out = zeros(a.rows, b.cols);
  for (let i = 0; i < a.rows; i++) {
    for (let k = 0; k < a.cols; k++) {
      const aik = a.data[i * a.cols + k];
      if (aik === 0) continue;
      for (let j = 0; j < b.cols; j++) {
        out.data[i * b.cols + j] += aik * b.data[k * b.cols + j];
      }
    }
  }
  return out;
}

/** aᵀ · b without materializing the transpose. */
export function matmulTA(a: Mat, b: Mat): Mat {
  if (a.rows !== b.rows) {
    throw new ShapeMismatch(`cannot multiply (${a.rows}x${a.cols})ᵀ by ${b.rows}x${b.cols}`);
  }
  const out = zeros(a.cols, b.cols);
  for (let k = 0; k < a.rows; k++) {
    for (let i = 0; i < a.cols; i++) {
      const aki = a.data[k * a.cols + i];
      if (aki === 0) continue;
      for (let j = 0; j < b.cols; j++) {
        out.data[i * b.cols + j] += aki * b.data[k * b.cols + j];
      }
    }
  }
  return out;
}

/** a · bᵀ without materializing the transpose. */
export function matmulTB(a: Mat, b: Mat): Mat {
  if (a.cols !== b.cols) {
    throw new ShapeMismatch(`cannot multiply ${a.rows}x${a.cols} by (${b.rows}x${b.cols})ᵀ`);
  }
  const out = zeros(a.rows, b.rows);
  for (let i = 0; i < a.rows; i++) {
    for (let j = 0; j < b.rows; j++) {
      let acc = 0;
      for (let k = 0; k < a.cols; k++) {
        acc += a.data[i * a.cols + k] * b.data[j * b.cols + k];
      }
      out.data[i * b.rows + j] = acc;
    }
  }
  return out;
}

export function add(a: Mat, b: Mat): Mat {
  if (a.rows !== b.rows || a.cols !== b.cols) {
    throw new ShapeMismatch(`cannot add ${a.rows}x${a.cols} and ${b.rows}x${b.cols}`);
  }
  const out = zeros(a.rows, a.cols);
  for (let i = 0; i < a.data.length; i++) out.data[i] = a.data[i] + b.data[i];
  return out;
}

export function addInPlace(target: Mat, other: Mat): void {
  if (target.rows !== other.rows || target.cols !== other.cols) {
    throw new ShapeMismatch(`cannot add ${other.rows}x${other.cols} into ${target.rows}x${target.cols}`);
  }
  for (let i = 0; i < target.data.length; i++) target.data[i] += other.data[i];
}

export function map(m: Mat, fn: (v: number) => number): Mat {
  const out = zeros(m.rows, m.cols);
  for (let i = 0; i < m.data.length; i++) out.data[i] = fn(m.data[i]);
  return out;
}

export function columnSlice(m: Mat, start: number, width: number): Mat {
  const out = zeros(m.rows, width);
  for (let i = 0; i < m.rows; i++) {
    for (let j = 0; j < width; j++) {
      out.data[i * width + j] = m.data[i * m.cols + start + j];
    }
  }
  return out;
}

export function writeColumnSlice(target: Mat, start: number, block: Mat): void {
  for (let i = 0; i < block.rows; i++) {
    for (let j = 0; j < block.cols; j++) {
      target.data[i * target.cols + start + j] = block.data[i * block.cols + j];
    }
  }
}

/** Row-wise softmax with max subtraction. */
export function softmaxRows(m: Mat): Mat {
  const out = zeros(m.rows, m.cols);
  for (let i = 0; i < m.rows; i++) {
    let max = -Infinity;
    for (let j = 0; j < m.cols; j++) max = Math.max(max, m.data[i * m.cols + j]);
    let sum = 0;
    for (let j = 0; j < m.cols; j++) {
      const e = Math.exp(m.data[i * m.cols + j] - max);
      out.data[i * m.cols + j] = e;
      sum += e;
    }
    for (let j = 0; j < m.cols; j++) out.data[i * m.cols + j] /= sum;
  }
  return out;
}

export function allFinite(m: Mat): boolean {
  for (let i = 0; i < m.data.length; i++) {
    if (!Number.isFinite(m.data[i])) return false;
  }
  return true;
}

export function maxAbsDiff(a: Mat, b: Mat): number {
  if (a.rows !== b.rows || a.cols !== b.cols) {
    throw new ShapeMismatch("maxAbsDiff needs equal shapes");
  }
  let worst = 0;
  for (let i = 0; i < a.data.length; i++) {
    worst = Math.max(worst, Math.abs(a.data[i] - b.data[i]));
  }
  return worst;
}
