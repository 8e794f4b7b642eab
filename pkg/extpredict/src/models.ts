/**
 * Ranking models served over the predictor protocol.
 *
 * A model exposes its current full-vocabulary ordering plus an update step.
 * Determinism is the only hard requirement: the same token sequence must
 * always produce the same orderings, because the encoder (RANK path) and the
 * decoder (TOKEN path) run as separate processes that must stay in lockstep.
 */

export class Ordering {
  private readonly ranks: Int32Array;

  constructor(private readonly order: Int32Array) {
    this.ranks = new Int32Array(order.length);
    for (let r = 0; r < order.length; r++) {
      this.ranks[order[r]] = r;
    }
  }

  rankOf(token: number): number {
    return this.ranks[token];
  }

  tokenAt(rank: number): number {
    return this.order[rank];
  }

  get size(): number {
    return this.order.length;
  }
}

export interface RankingModel {
  readonly vocabSize: number;
  reset(): void;
  ranking(): Ordering;
  update(token: number): void;
}

export function identityOrdering(vocabSize: number): Ordering {
  const order = new Int32Array(vocabSize);
  for (let i = 0; i < vocabSize; i++) order[i] = i;
  return new Ordering(order);
}

/** Identity model: rank of every token is the token itself, forever. */
export class EchoModel implements RankingModel {
  constructor(readonly vocabSize: number = 256) {}

  reset(): void {}

  ranking(): Ordering {
    return identityOrdering(this.vocabSize);
  }

  update(_token: number): void {}
}

/**
 * Adaptive order-k count model.
 *
 * Tokens are ranked by their occurrence counts under the longest previously
 * seen context (up to k preceding tokens), descending count with ascending
 * token id breaking ties; unseen tokens follow in ascending id order. These
 * are the same ordering rules the pipeline's builtin predictor documents, so
 * streams encoded there can be decoded through this plugin and vice versa.
 */
export class CountModel implements RankingModel {
  private tables: Array<Map<string, Map<number, number>>> = [];
  private context: number[] = [];

  constructor(readonly vocabSize: number = 256, readonly order: number = 2) {
    if (order < 0 || order > 8) {
      throw new Error(`context order must be in 0..8, got ${order}`);
    }
    this.reset();
  }

  reset(): void {
    this.tables = Array.from({ length: this.order + 1 }, () => new Map());
    this.context = [];
  }

  private key(o: number): string {
    return this.context.slice(this.context.length - o).join(",");
  }

  private selected(): Map<number, number> | undefined {
    const top = Math.min(this.order, this.context.length);
    for (let o = top; o >= 0; o--) {
      const counts = this.tables[o].get(this.key(o));
      if (counts !== undefined) return counts;
    }
    return undefined;
  }

  ranking(): Ordering {
    const counts = this.selected();
    if (counts === undefined) return identityOrdering(this.vocabSize);
    const seen = [...counts.entries()].sort(
      (a, b) => b[1] - a[1] || a[0] - b[0],
    );
    const order = new Int32Array(this.vocabSize);
    let r = 0;
    for (const [token] of seen) order[r++] = token;
    for (let t = 0; t < this.vocabSize; t++) {
      if (!counts.has(t)) order[r++] = t;
    }
    return new Ordering(order);
  }

  update(token: number): void {
    const full = Math.min(this.order, this.context.length);
    for (let o = 0; o <= full; o++) {
      const key = this.key(o);
      let counts = this.tables[o].get(key);
      if (counts === undefined) {
        counts = new Map();
        this.tables[o].set(key, counts);
      }
      counts.set(token, (counts.get(token) ?? 0) + 1);
    }
    this.context.push(token);
    if (this.context.length > this.order) this.context.shift();
  }
}
