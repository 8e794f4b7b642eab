/**
 * Frame handling for the predictor protocol.
 *
 * Requests arrive one per line on stdin; every request gets exactly one
 * response line, in order:
 *
 *   HELLO <version> [expected-vocab]  ->  OK vocab=<N>
 *   RESET                             ->  OK
 *   RANK <token-id>                   ->  R <rank>      (then context += token)
 *   TOKEN <rank>                      ->  T <token-id>  (then context += token)
 *   anything else                     ->  ERR <message>
 *
 * RANK and TOKEN both advance the model, so an encoder driving RANK and a
 * decoder driving TOKEN traverse identical state sequences. A malformed
 * frame answers ERR and the session continues; a version or vocabulary
 * mismatch at HELLO answers ERR and ends the session with a nonzero status.
 */

import * as readline from "node:readline";
import { RankingModel } from "./models.js";

export const PROTOCOL_VERSION = 1;

export interface Reply {
  line: string;
  /** When set, the server should exit with this status after replying. */
  exit?: number;
}

function parseNonNegative(raw: string | undefined): number | null {
  if (raw === undefined || !/^\d+$/.test(raw)) return null;
  return Number(raw);
}

export function handleFrame(model: RankingModel, frame: string): Reply {
  const parts = frame.trim().split(/\s+/).filter((p) => p.length > 0);
  if (parts.length === 0) {
    return { line: "ERR empty frame" };
  }
  switch (parts[0]) {
    case "HELLO": {
      const version = parseNonNegative(parts[1]);
      if (version === null || parts.length > 3) {
        return { line: "ERR malformed HELLO" };
      }
      if (version !== PROTOCOL_VERSION) {
        return { line: `ERR unsupported protocol version ${version}`, exit: 1 };
      }
      if (parts.length === 3) {
        const expected = parseNonNegative(parts[2]);
        if (expected === null) return { line: "ERR malformed HELLO" };
        if (expected !== model.vocabSize) {
          return {
            line: `ERR vocabulary mismatch: serving ${model.vocabSize}, peer expects ${expected}`,
            exit: 1,
          };
        }
      }
      return { line: `OK vocab=${model.vocabSize}` };
    }
    case "RESET":
      if (parts.length !== 1) return { line: "ERR malformed RESET" };
      model.reset();
      return { line: "OK" };
    case "RANK": {
      const token = parseNonNegative(parts[1]);
      if (token === null || parts.length !== 2) return { line: "ERR malformed RANK" };
      if (token >= model.vocabSize) return { line: `ERR token ${token} out of range` };
      const rank = model.ranking().rankOf(token);
      model.update(token);
      return { line: `R ${rank}` };
    }
    case "TOKEN": {
      const rank = parseNonNegative(parts[1]);
      if (rank === null || parts.length !== 2) return { line: "ERR malformed TOKEN" };
      if (rank >= model.vocabSize) return { line: `ERR rank ${rank} out of range` };
      const token = model.ranking().tokenAt(rank);
      model.update(token);
      return { line: `T ${token}` };
    }
    default:
      return { line: `ERR unknown verb ${parts[0]}` };
  }
}

/** Serve one session over the standard streams; resolves to the exit status. */
export function serve(model: RankingModel): Promise<number> {
  return new Promise((resolve) => {
    const rl = readline.createInterface({ input: process.stdin, terminal: false });
    rl.on("line", (line) => {
      const reply = handleFrame(model, line);
      process.stdout.write(reply.line + "\n");
      if (reply.exit !== undefined) {
        resolve(reply.exit); // before close(): the close handler also resolves
        rl.close();
      }
    });
    rl.on("close", () => resolve(0));
  });
}
