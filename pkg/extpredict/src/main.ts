#!/usr/bin/env node
/**
 * Entry point: pick a ranking backend and serve the stdin/stdout protocol.
 *
 *   extpredict --model echo
 *   extpredict --model count --order 2
 *   extpredict --model transformer --window 128 --seed 1
 */

import { parseArgs } from "node:util";
import { CountModel, EchoModel, RankingModel } from "./models.js";
import { TransformerModel } from "./transformer.js";
import { serve } from "./server.js";

function buildModel(): RankingModel {
  const { values } = parseArgs({
    options: {
      model: { type: "string", default: "echo" },
      vocab: { type: "string", default: "256" },
      order: { type: "string", default: "2" },
      window: { type: "string", default: "128" },
      seed: { type: "string", default: "1" },
    },
  });
  const vocab = Number(values.vocab);
  switch (values.model) {
    case "echo":
      return new EchoModel(vocab);
    case "count":
      return new CountModel(vocab, Number(values.order));
    case "transformer":
      return new TransformerModel({
        vocabSize: vocab,
        window: Number(values.window),
        seed: Number(values.seed),
      });
    default:
      throw new Error(`unknown model ${values.model}; use echo|count|transformer`);
  }
}

async function main(): Promise<void> {
  let model: RankingModel;
  try {
    model = buildModel();
  } catch (err) {
    process.stderr.write(`extpredict: ${(err as Error).message}\n`);
    process.exit(2);
  }
  process.exit(await serve(model));
}

void main();
