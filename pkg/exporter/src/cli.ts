#!/usr/bin/env node
/** prediction-exporter --corpus in.json --out pred.json --config cfg.json
 *
 * Runs the configured model over every document and writes a
 * prediction corpus the toolkit accepts as-is. `--rejects-out` also
 * writes the spans the model emitted but the schema refused, one JSON
 * object per line. `--backend lexicon:terms.json` swaps in the
 * deterministic lexicon backend (term -> {label, score} map) for
 * offline runs.
 */

import { readFile } from "node:fs/promises";
import process from "node:process";
import { parseArgs } from "node:util";

import { LexiconBackend, loadModelBackend, ModelLoadError, type InferenceBackend } from "./backend.js";
import { ExportConfigError, loadExportConfig } from "./config.js";
import { CorpusFormatError } from "./corpus.js";
import { exportPredictions } from "./export.js";

const USAGE =
  "usage: prediction-exporter --corpus FILE --out FILE --config FILE" +
  " [--rejects-out FILE] [--backend lexicon:TERMS_FILE]";

async function pickBackend(choice: string | undefined, model: string, device: string): Promise<InferenceBackend> {
  if (choice === undefined) return loadModelBackend(model, device);
  if (choice.startsWith("lexicon:")) {
    const raw = JSON.parse(await readFile(choice.slice("lexicon:".length), "utf8"));
    return new LexiconBackend(new Map(Object.entries(raw)));
  }
  throw new ExportConfigError(`unknown backend ${choice}`);
}

async function main(): Promise<number> {
  let args;
  try {
    args = parseArgs({
      options: {
        corpus: { type: "string" },
        out: { type: "string" },
        config: { type: "string" },
        "rejects-out": { type: "string" },
        backend: { type: "string" },
      },
    }).values;
  } catch (err) {
    console.error(`${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  if (!args.corpus || !args.out || !args.config) {
    console.error(USAGE);
    return 2;
  }

  try {
    const config = await loadExportConfig(args.config);
    const backend = await pickBackend(args.backend, config.model, config.device);
    const result = await exportPredictions(
      args.corpus,
      args.out,
      config,
      backend,
      args["rejects-out"],
    );
    console.log(
      `exported ${result.mentionCount} mention(s) across ${result.documentCount} document(s)` +
        ` -> ${args.out}` +
        (result.rejected.length ? ` (${result.rejected.length} span(s) rejected)` : ""),
    );
    return 0;
  } catch (err) {
    if (err instanceof ExportConfigError) {
      console.error(`error: ${err.message}`);
      return 5;
    }
    if (err instanceof CorpusFormatError) {
      console.error(`error: ${err.message}`);
      return 4;
    }
    if (err instanceof ModelLoadError) {
      console.error(`error: ${err.message}`);
      return 6;
    }
    if (err instanceof Error && "code" in err && typeof err.code === "string") {
      console.error(`error: ${err.message}`);
      return 3; // filesystem errors carry string codes (ENOENT, EACCES)
    }
    throw err;
  }
}

main().then((code) => {
  process.exitCode = code;
});
