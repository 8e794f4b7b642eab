import { describe, expect, it } from "vitest";
import { CountModel, EchoModel, RankingModel } from "../src/models.js";
import { TransformerModel } from "../src/transformer.js";

function rankThenUpdate(model: RankingModel, token: number): number {
  const rank = model.ranking().rankOf(token);
  model.update(token);
  return rank;
}

describe("echo model", () => {
  it("always ranks identically", () => {
    const model = new EchoModel(256);
    expect(rankThenUpdate(model, 42)).toBe(42);
    expect(rankThenUpdate(model, 42)).toBe(42);
    expect(model.ranking().tokenAt(7)).toBe(7);
  });
});

describe("count model", () => {
  it("ranks by ascending id before any update", () => {
    const model = new CountModel(256, 2);
    const ordering = model.ranking();
    expect(ordering.rankOf(0)).toBe(0);
    expect(ordering.tokenAt(255)).toBe(255);
  });

  it("promotes repeated tokens to rank zero", () => {
    const model = new CountModel(256, 0);
    expect(rankThenUpdate(model, 97)).toBe(97);
    expect(rankThenUpdate(model, 97)).toBe(0);
    expect(rankThenUpdate(model, 97)).toBe(0);
  });

  it("prefers the longest seen context", () => {
    const model = new CountModel(256, 1);
    for (const t of [97, 98, 97]) model.update(t);
    // context (97) has only seen 98
    expect(model.ranking().rankOf(98)).toBe(0);
  });

  it("breaks count ties by ascending token id", () => {
    const model = new CountModel(256, 0);
    model.update(5);
    model.update(3);
    expect(model.ranking().tokenAt(0)).toBe(3);
    expect(model.ranking().tokenAt(1)).toBe(5);
  });

  it("resets to the fresh ordering", () => {
    const model = new CountModel(256, 1);
    model.update(9);
    model.update(9);
    model.reset();
    expect(model.ranking().rankOf(9)).toBe(9);
  });
});

describe("transformer model", () => {
  it("is deterministic for a given seed", () => {
    const a = new TransformerModel({ seed: 7, window: 32 });
    const b = new TransformerModel({ seed: 7, window: 32 });
    const tokens = [10, 200, 10, 55, 10, 200];
    for (const t of tokens) {
      expect(rankThenUpdate(a, t)).toBe(rankThenUpdate(b, t));
    }
  });

  it("differs across seeds", () => {
    const a = new TransformerModel({ seed: 1, window: 32 });
    const b = new TransformerModel({ seed: 2, window: 32 });
    const ranksA: number[] = [];
    const ranksB: number[] = [];
    for (const t of [4, 9, 4, 200, 138]) {
      ranksA.push(rankThenUpdate(a, t));
      ranksB.push(rankThenUpdate(b, t));
    }
    expect(ranksA).not.toEqual(ranksB);
  });

  it("produces a bijective ordering", () => {
    const model = new TransformerModel({ seed: 3, window: 32 });
    for (const t of [1, 2, 3]) model.update(t);
    const ordering = model.ranking();
    const seen = new Set<number>();
    for (let r = 0; r < 256; r++) seen.add(ordering.tokenAt(r));
    expect(seen.size).toBe(256);
    for (let t = 0; t < 256; t += 37) {
      expect(ordering.tokenAt(ordering.rankOf(t))).toBe(t);
    }
  });

  it("stays in lockstep across window truncation", () => {
    const encoder = new TransformerModel({ seed: 5, window: 16 });
    const decoder = new TransformerModel({ seed: 5, window: 16 });
    const tokens = Array.from({ length: 100 }, (_, i) => (i * 37) % 256);
    for (const t of tokens) {
      const rank = encoder.ranking().rankOf(t);
      encoder.update(t);
      const decoded = decoder.ranking().tokenAt(rank);
      decoder.update(decoded);
      expect(decoded).toBe(t);
    }
  });
});
