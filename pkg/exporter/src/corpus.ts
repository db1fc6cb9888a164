/** Reading source corpora and writing prediction files.
 *
 * The output follows the bionerkit corpus schema: half-open offsets in
 * Unicode code points, combined coordinate space, one `pred_entities`
 * list per document. The writer is deterministic byte for byte:
 * documents sort by doc_id (code-point order, matching the toolkit's
 * writer), mentions by (start_idx, end_idx, label, score), keys are
 * emitted in a fixed order, and the file ends with a newline.
 */

import { readFile, writeFile } from "node:fs/promises";

import type { EntityLabel } from "./labels.js";

export interface SourceDocument {
  docId: string;
  title: string;
  abstract: string;
}

export interface PredictedMention {
  startIdx: number; // code points, half-open
  endIdx: number;
  tag: "t" | "a";
  textSpan: string;
  label: EntityLabel;
  score: number;
}

export class CorpusFormatError extends Error {}

function asString(value: unknown, what: string): string {
  if (typeof value !== "string") throw new CorpusFormatError(`${what} must be a string`);
  return value;
}

/** Parse just what inference needs: document texts plus the header
 * joiner (to refuse a corpus whose combined space disagrees with the
 * export config). Annotations in the input are ignored. */
export function parseSourceCorpus(data: string): { documents: SourceDocument[]; joiner: string | null } {
  let raw: unknown;
  try {
    raw = JSON.parse(data);
  } catch (err) {
    throw new CorpusFormatError(`corpus is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new CorpusFormatError("corpus must be a JSON object");
  }
  const top = raw as Record<string, unknown>;
  if (!Array.isArray(top.documents)) throw new CorpusFormatError("corpus has no documents list");
  const joiner = top.joiner === undefined ? null : asString(top.joiner, "joiner");

  const documents: SourceDocument[] = [];
  const seen = new Set<string>();
  for (const [i, entry] of top.documents.entries()) {
    if (typeof entry !== "object" || entry === null) {
      throw new CorpusFormatError(`document ${i} must be an object`);
    }
    const doc = entry as Record<string, unknown>;
    const docId = asString(doc.doc_id, `document ${i}: doc_id`);
    if (docId === "") throw new CorpusFormatError(`document ${i}: empty doc_id`);
    if (seen.has(docId)) throw new CorpusFormatError(`duplicate doc_id ${docId}`);
    seen.add(docId);
    documents.push({
      docId,
      title: asString(doc.title, `document ${docId}: title`),
      abstract: asString(doc.abstract, `document ${docId}: abstract`),
    });
  }
  return { documents, joiner };
}

export async function readSourceCorpus(path: string): Promise<{ documents: SourceDocument[]; joiner: string | null }> {
  return parseSourceCorpus(await readFile(path, "utf8"));
}

/** Python's sorted() compares strings by code point; String.prototype
 * comparison uses UTF-16 units, which orders astral characters
 * differently. Match the toolkit exactly. */
export function compareCodePoints(a: string, b: string): number {
  const pa = [...a];
  const pb = [...b];
  const n = Math.min(pa.length, pb.length);
  for (let i = 0; i < n; i++) {
    const ca = pa[i]!.codePointAt(0)!;
    const cb = pb[i]!.codePointAt(0)!;
    if (ca !== cb) return ca - cb;
  }
  return pa.length - pb.length;
}

function mentionJson(m: PredictedMention): Record<string, unknown> {
  // insertion order fixes the serialized key order
  return {
    start_idx: m.startIdx,
    end_idx: m.endIdx,
    tag: m.tag,
    text_span: m.textSpan,
    label: m.label,
    score: m.score,
  };
}

export function predictionsToJson(
  documents: ReadonlyMap<string, { doc: SourceDocument; mentions: PredictedMention[] }>,
  joiner: string,
): string {
  const docIds = [...documents.keys()].sort(compareCodePoints);
  const body = {
    offset_convention: "half_open",
    provenance: "prediction",
    coordinate_space: "combined",
    joiner,
    documents: docIds.map((docId) => {
      const { doc, mentions } = documents.get(docId)!;
      const ordered = [...mentions].sort(
        (a, b) =>
          a.startIdx - b.startIdx ||
          a.endIdx - b.endIdx ||
          compareCodePoints(a.label, b.label) ||
          a.score - b.score,
      );
      return {
        doc_id: doc.docId,
        title: doc.title,
        abstract: doc.abstract,
        pred_entities: ordered.map(mentionJson),
      };
    }),
  };
  return JSON.stringify(body, null, 2) + "\n";
}

export async function writePredictions(
  path: string,
  documents: ReadonlyMap<string, { doc: SourceDocument; mentions: PredictedMention[] }>,
  joiner: string,
): Promise<void> {
  await writeFile(path, predictionsToJson(documents, joiner), "utf8");
}
