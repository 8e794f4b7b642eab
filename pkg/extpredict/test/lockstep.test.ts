import { describe, expect, it } from "vitest";
import { CountModel, EchoModel, RankingModel } from "../src/models.js";
import { TransformerModel } from "../src/transformer.js";
import { handleFrame } from "../src/server.js";

/** Drive the RANK path, then replay the replies through a fresh TOKEN path. */
function encodeDecode(make: () => RankingModel, tokens: number[]): number[] {
  const encoder = make();
  expect(handleFrame(encoder, "HELLO 1").line).toMatch(/^OK vocab=/);
  const ranks = tokens.map((t) => {
    const reply = handleFrame(encoder, `RANK ${t}`);
    expect(reply.line).toMatch(/^R /);
    return Number(reply.line.slice(2));
  });
  const decoder = make();
  expect(handleFrame(decoder, "HELLO 1").line).toMatch(/^OK vocab=/);
  return ranks.map((r) => {
    const reply = handleFrame(decoder, `TOKEN ${r}`);
    expect(reply.line).toMatch(/^T /);
    return Number(reply.line.slice(2));
  });
}

function sampleLog(bytes: number): number[] {
  const lines: string[] = [];
  let size = 0;
  let i = 0;
  while (size < bytes) {
    const line = `[2024-01-01 00:${String(i % 60).padStart(2, "0")}:${String(
      (i * 7) % 60,
    ).padStart(2, "0")}] [INFO] (Worker) - job ${(i * 31) % 1000} done in ${(i * 13) % 500} ms\n`;
    lines.push(line);
    size += line.length;
    i += 1;
  }
  return Array.from(Buffer.from(lines.join("").slice(0, bytes), "ascii"));
}

describe("encoder/decoder lockstep through the protocol", () => {
  it("echo model: rank stream equals token stream", () => {
    const tokens = Array.from(Buffer.from("echo conformance", "ascii"));
    const encoder = new EchoModel();
    const ranks = tokens.map((t) => {
      const reply = handleFrame(encoder, `RANK ${t}`);
      return Number(reply.line.slice(2));
    });
    expect(ranks).toEqual(tokens);
    expect(encodeDecode(() => new EchoModel(), tokens)).toEqual(tokens);
  });

  it("count model: scripted session reconstructs the original tokens", () => {
    const tokens = sampleLog(2000);
    expect(encodeDecode(() => new CountModel(256, 2), tokens)).toEqual(tokens);
  });

  it("count model: RESET starts an independent stream", () => {
    const model = new CountModel(256, 1);
    handleFrame(model, "RANK 9");
    handleFrame(model, "RANK 9");
    expect(handleFrame(model, "RESET").line).toBe("OK");
    expect(handleFrame(model, "RANK 9").line).toBe("R 9");
  });

  it("transformer: a 10 KiB log sample roundtrips byte-exact", () => {
    const tokens = sampleLog(10 * 1024);
    expect(tokens.length).toBe(10 * 1024);
    const make = () => new TransformerModel({ seed: 1, window: 128 });
    expect(encodeDecode(make, tokens)).toEqual(tokens);
  }, 120_000);
});
