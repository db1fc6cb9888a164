/** Export configuration.
 *
 * The label list must equal the toolkit's thirteen labels, in
 * canonical order: they are passed verbatim to the model as its
 * candidate labels, and a shuffled or partial list silently changes
 * what the model is asked to find. The joiner must match whatever the
 * downstream toolkit config uses, since combined-space offsets bake it
 * into every mention.
 */

import { readFile } from "node:fs/promises";

import { z } from "zod";

import { CANONICAL_LABELS } from "./labels.js";

export class ExportConfigError extends Error {}

const schema = z
  .object({
    model: z.string().min(1, "model identifier must not be empty"),
    labels: z.array(z.string()),
    batch_size: z.number().int().positive().default(8),
    device: z.string().default("cpu"),
    joiner: z.string().default(" "),
  })
  .strict();

export interface ExportConfig {
  model: string;
  labels: readonly string[];
  batchSize: number;
  device: string;
  joiner: string;
}

export function parseExportConfig(raw: unknown): ExportConfig {
  const result = schema.safeParse(raw);
  if (!result.success) {
    const issue = result.error.issues[0];
    const where = issue && issue.path.length ? `${issue.path.join(".")}: ` : "";
    throw new ExportConfigError(`config: ${where}${issue?.message ?? "invalid"}`);
  }
  const { labels } = result.data;
  if (
    labels.length !== CANONICAL_LABELS.length ||
    labels.some((lab, i) => lab !== CANONICAL_LABELS[i])
  ) {
    throw new ExportConfigError(
      `config: labels must be exactly the ${CANONICAL_LABELS.length} canonical labels in order ` +
        `[${CANONICAL_LABELS.join(", ")}]`,
    );
  }
  return {
    model: result.data.model,
    labels: CANONICAL_LABELS,
    batchSize: result.data.batch_size,
    device: result.data.device,
    joiner: result.data.joiner,
  };
}

export async function loadExportConfig(path: string): Promise<ExportConfig> {
  let raw: unknown;
  try {
    raw = JSON.parse(await readFile(path, "utf8"));
  } catch (err) {
    throw new ExportConfigError(`config: ${(err as Error).message}`);
  }
  return parseExportConfig(raw);
}
