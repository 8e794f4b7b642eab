/**
 * Compact GPT-2-style decoder used as the neural ranking backend.
 *
 * Standard architecture (token + position embeddings, pre-norm blocks with
 * causal multi-head attention and a GELU MLP, weight-tied output projection)
 * at desk scale, with weights drawn deterministically from a seeded PRNG so
 * that two processes given the same seed are bit-identical. A KV cache makes
 * updates O(window); when the context window fills, the model keeps the most
 * recent half and rebuilds the cache, identically on encode and decode paths.
 *
 * Pretrained weights are deliberately out of scope here: the sandbox this
 * plugin targets has no model host access, and protocol lockstep does not
 * depend on what the weights are, only on their determinism.
 */

import { identityOrdering, Ordering, RankingModel } from "./models.js";

const MASK64 = (1n << 64n) - 1n;

/** xorshift64* over BigInt; used only for weight initialization. */
class SeededRng {
  private state: bigint;

  constructor(seed: number) {
    this.state = BigInt(seed) & MASK64 || 0x9e3779b97f4a7c15n;
  }

  next(): number {
    let x = this.state;
    x ^= x >> 12n;
    x = (x ^ (x << 25n)) & MASK64;
    x ^= x >> 27n;
    this.state = x;
    const out = (x * 0x2545f4914f6cdd1dn) & MASK64;
    return Number(out >> 11n) / 2 ** 53; // uniform [0, 1)
  }

  uniform(scale: number): number {
    return (this.next() * 2 - 1) * scale;
  }
}

function gelu(x: number): number {
  return 0.5 * x * (1 + Math.tanh(0.7978845608028654 * (x + 0.044715 * x * x * x)));
}

interface LayerWeights {
  qkv: Float64Array; // [dModel, 3 * dModel]
  attnProj: Float64Array; // [dModel, dModel]
  up: Float64Array; // [dModel, dFf]
  down: Float64Array; // [dFf, dModel]
  ln1Gain: Float64Array;
  ln1Bias: Float64Array;
  ln2Gain: Float64Array;
  ln2Bias: Float64Array;
}

export interface TransformerConfig {
  vocabSize?: number;
  dModel?: number;
  heads?: number;
  layers?: number;
  window?: number;
  seed?: number;
}

export class TransformerModel implements RankingModel {
  readonly vocabSize: number;
  readonly window: number;
  private readonly dModel: number;
  private readonly heads: number;
  private readonly headDim: number;
  private readonly dFf: number;
  private readonly nLayers: number;

  private readonly wte: Float64Array; // [vocab, dModel], tied with the output head
  private readonly wpe: Float64Array; // [window, dModel]
  private readonly layersW: LayerWeights[];
  private readonly lnFGain: Float64Array;
  private readonly lnFBias: Float64Array;

  private tokens: number[] = [];
  private keyCache: Float64Array[][] = []; // [layer][position] -> [dModel]
  private valueCache: Float64Array[][] = [];
  private lastHidden: Float64Array | null = null;

  constructor(config: TransformerConfig = {}) {
    this.vocabSize = config.vocabSize ?? 256;
    this.dModel = config.dModel ?? 48;
    this.heads = config.heads ?? 3;
    this.nLayers = config.layers ?? 2;
    this.window = config.window ?? 128;
    if (this.dModel % this.heads !== 0) {
      throw new Error("dModel must be divisible by heads");
    }
    this.headDim = this.dModel / this.heads;
    this.dFf = 4 * this.dModel;

    const rng = new SeededRng(config.seed ?? 1);
    const init = (rows: number, cols: number) => {
      const w = new Float64Array(rows * cols);
      const scale = 1 / Math.sqrt(rows);
      for (let i = 0; i < w.length; i++) w[i] = rng.uniform(scale);
      return w;
    };
    this.wte = init(this.vocabSize, this.dModel);
    this.wpe = init(this.window, this.dModel);
    this.layersW = Array.from({ length: this.nLayers }, () => ({
      qkv: init(this.dModel, 3 * this.dModel),
      attnProj: init(this.dModel, this.dModel),
      up: init(this.dModel, this.dFf),
      down: init(this.dFf, this.dModel),
      ln1Gain: new Float64Array(this.dModel).fill(1),
      ln1Bias: new Float64Array(this.dModel),
      ln2Gain: new Float64Array(this.dModel).fill(1),
      ln2Bias: new Float64Array(this.dModel),
    }));
    this.lnFGain = new Float64Array(this.dModel).fill(1);
    this.lnFBias = new Float64Array(this.dModel);
    this.reset();
  }

  reset(): void {
    this.tokens = [];
    this.keyCache = Array.from({ length: this.nLayers }, () => []);
    this.valueCache = Array.from({ length: this.nLayers }, () => []);
    this.lastHidden = null;
  }

  private layerNorm(x: Float64Array, gain: Float64Array, bias: Float64Array): Float64Array {
    const n = x.length;
    let mean = 0;
    for (let i = 0; i < n; i++) mean += x[i];
    mean /= n;
    let variance = 0;
    for (let i = 0; i < n; i++) {
      const d = x[i] - mean;
      variance += d * d;
    }
    variance /= n;
    const inv = 1 / Math.sqrt(variance + 1e-5);
    const out = new Float64Array(n);
    for (let i = 0; i < n; i++) out[i] = (x[i] - mean) * inv * gain[i] + bias[i];
    return out;
  }

  private matVec(w: Float64Array, x: Float64Array, rows: number, cols: number): Float64Array {
    // w is [rows, cols], x is [rows]; returns x^T w of length cols
    const out = new Float64Array(cols);
    for (let r = 0; r < rows; r++) {
      const xv = x[r];
      if (xv === 0) continue;
      const base = r * cols;
      for (let c = 0; c < cols; c++) out[c] += xv * w[base + c];
    }
    return out;
  }

  /** Append one position to the caches and recompute the final hidden state. */
  private advance(token: number): void {
    const d = this.dModel;
    const pos = this.keyCache[0].length;
    let x = new Float64Array(d);
    for (let i = 0; i < d; i++) x[i] = this.wte[token * d + i] + this.wpe[pos * d + i];

    for (let layer = 0; layer < this.nLayers; layer++) {
      const w = this.layersW[layer];
      const normed = this.layerNorm(x, w.ln1Gain, w.ln1Bias);
      const qkv = this.matVec(w.qkv, normed, d, 3 * d);
      const q = qkv.subarray(0, d);
      this.keyCache[layer].push(qkv.slice(d, 2 * d));
      this.valueCache[layer].push(qkv.slice(2 * d, 3 * d));

      const keys = this.keyCache[layer];
      const values = this.valueCache[layer];
      const span = keys.length;
      const merged = new Float64Array(d);
      const scale = 1 / Math.sqrt(this.headDim);
      for (let h = 0; h < this.heads; h++) {
        const off = h * this.headDim;
        const scores = new Float64Array(span);
        let max = -Infinity;
        for (let p = 0; p < span; p++) {
          let dot = 0;
          const key = keys[p];
          for (let i = 0; i < this.headDim; i++) dot += q[off + i] * key[off + i];
          scores[p] = dot * scale;
          if (scores[p] > max) max = scores[p];
        }
        let total = 0;
        for (let p = 0; p < span; p++) {
          scores[p] = Math.exp(scores[p] - max);
          total += scores[p];
        }
        for (let p = 0; p < span; p++) {
          const weight = scores[p] / total;
          const value = values[p];
          for (let i = 0; i < this.headDim; i++) merged[off + i] += weight * value[off + i];
        }
      }
      const attnOut = this.matVec(w.attnProj, merged, d, d);
      for (let i = 0; i < d; i++) x[i] += attnOut[i];

      const normed2 = this.layerNorm(x, w.ln2Gain, w.ln2Bias);
      const hidden = this.matVec(w.up, normed2, d, this.dFf);
      for (let i = 0; i < this.dFf; i++) hidden[i] = gelu(hidden[i]);
      const mlpOut = this.matVec(w.down, hidden, this.dFf, d);
      for (let i = 0; i < d; i++) x[i] += mlpOut[i];
    }
    this.lastHidden = this.layerNorm(x, this.lnFGain, this.lnFBias);
  }

  update(token: number): void {
    this.tokens.push(token);
    if (this.tokens.length >= this.window) {
      // keep the most recent half and rebuild; depends only on the token
      // sequence, so encode and decode truncate at identical steps
      this.tokens = this.tokens.slice(-(this.window >> 1));
      this.keyCache = Array.from({ length: this.nLayers }, () => []);
      this.valueCache = Array.from({ length: this.nLayers }, () => []);
      for (const t of this.tokens) this.advance(t);
    } else {
      this.advance(token);
    }
  }

  ranking(): Ordering {
    if (this.lastHidden === null) return identityOrdering(this.vocabSize);
    const d = this.dModel;
    const logits = new Float64Array(this.vocabSize);
    const h = this.lastHidden;
    for (let t = 0; t < this.vocabSize; t++) {
      let dot = 0;
      const base = t * d;
      for (let i = 0; i < d; i++) dot += h[i] * this.wte[base + i];
      logits[t] = dot;
    }
    const order = new Int32Array(this.vocabSize);
    for (let i = 0; i < this.vocabSize; i++) order[i] = i;
    const sorted = Array.from(order).sort((a, b) => logits[b] - logits[a] || a - b);
    return new Ordering(Int32Array.from(sorted));
  }
}
