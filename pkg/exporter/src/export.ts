/** The export pipeline: corpus in, prediction file out.
 *
 * Each document's title and abstract are combined with the configured
 * joiner and sent to the backend in batches. Raw spans come back in
 * UTF-16 code units and survive only if they convert cleanly to code
 * points, carry one of the thirteen labels, keep a score in [0, 1],
 * and sit entirely inside the title or entirely inside the abstract.
 * Everything else goes to a rejection log, never to the output, so a
 * misbehaving model cannot produce a file the toolkit rejects.
 */

import { writeFile } from "node:fs/promises";

import type { InferenceBackend, RawSpan } from "./backend.js";
import type { ExportConfig } from "./config.js";
import {
  compareCodePoints,
  CorpusFormatError,
  readSourceCorpus,
  writePredictions,
  type PredictedMention,
  type SourceDocument,
} from "./corpus.js";
import { isCanonicalLabel } from "./labels.js";
import { codePointLength, OffsetMap } from "./offsets.js";

export interface RejectedSpan {
  docId: string;
  span: RawSpan;
  reason:
    | "unknown-label"
    | "bad-score"
    | "out-of-range"
    | "empty-span"
    | "not-a-code-point-boundary"
    | "straddles-boundary";
}

export interface ExportResult {
  documentCount: number;
  mentionCount: number;
  rejected: RejectedSpan[];
}

export async function exportPredictions(
  corpusPath: string,
  outPath: string,
  config: ExportConfig,
  backend: InferenceBackend,
  rejectsPath?: string,
): Promise<ExportResult> {
  const { documents, joiner } = await readSourceCorpus(corpusPath);
  if (joiner !== null && joiner !== config.joiner) {
    throw new CorpusFormatError(
      `corpus declares joiner ${JSON.stringify(joiner)} but the export config uses ` +
        `${JSON.stringify(config.joiner)}; combined offsets would disagree`,
    );
  }

  // fixed processing order makes the rejection log deterministic too
  const ordered = [...documents].sort((a, b) => compareCodePoints(a.docId, b.docId));
  const combined = ordered.map((doc) => doc.title + config.joiner + doc.abstract);

  const spansPerDoc: RawSpan[][] = [];
  for (let at = 0; at < combined.length; at += config.batchSize) {
    const batch = combined.slice(at, at + config.batchSize);
    spansPerDoc.push(...(await backend.predict(batch, config.labels)));
  }
  if (spansPerDoc.length !== ordered.length) {
    throw new CorpusFormatError(
      `backend returned ${spansPerDoc.length} span lists for ${ordered.length} documents`,
    );
  }

  const rejected: RejectedSpan[] = [];
  const output = new Map<string, { doc: SourceDocument; mentions: PredictedMention[] }>();
  let mentionCount = 0;
  for (const [i, doc] of ordered.entries()) {
    const text = combined[i]!;
    const mentions = siftSpans(doc, text, config.joiner, spansPerDoc[i]!, rejected);
    mentionCount += mentions.length;
    output.set(doc.docId, { doc, mentions });
  }

  await writePredictions(outPath, output, config.joiner);
  if (rejectsPath !== undefined) {
    const lines = rejected.map((r) => JSON.stringify({ doc_id: r.docId, ...r.span, reason: r.reason }));
    await writeFile(rejectsPath, lines.join("\n") + (lines.length ? "\n" : ""), "utf8");
  }
  return { documentCount: ordered.length, mentionCount, rejected };
}

function siftSpans(
  doc: SourceDocument,
  text: string,
  joiner: string,
  spans: RawSpan[],
  rejected: RejectedSpan[],
): PredictedMention[] {
  const offsets = new OffsetMap(text);
  const titleLen = codePointLength(doc.title);
  const abstractStart = titleLen + codePointLength(joiner);
  const mentions: PredictedMention[] = [];

  const reject = (span: RawSpan, reason: RejectedSpan["reason"]) =>
    rejected.push({ docId: doc.docId, span, reason });

  for (const span of spans) {
    if (!isCanonicalLabel(span.label)) {
      reject(span, "unknown-label");
      continue;
    }
    if (!Number.isFinite(span.score) || span.score < 0 || span.score > 1) {
      reject(span, "bad-score");
      continue;
    }
    if (span.start < 0 || span.end > text.length) {
      reject(span, "out-of-range");
      continue;
    }
    if (span.start >= span.end) {
      reject(span, "empty-span");
      continue;
    }
    const startIdx = offsets.toCodePoint(span.start);
    const endIdx = offsets.toCodePoint(span.end);
    if (startIdx === null || endIdx === null) {
      reject(span, "not-a-code-point-boundary");
      continue;
    }
    const inTitle = endIdx <= titleLen;
    const inAbstract = startIdx >= abstractStart;
    if (!inTitle && !inAbstract) {
      reject(span, "straddles-boundary");
      continue;
    }
    mentions.push({
      startIdx,
      endIdx,
      tag: inTitle ? "t" : "a",
      textSpan: text.slice(span.start, span.end),
      label: span.label,
      score: span.score,
    });
  }
  return mentions;
}
