/** Inference backends.
 *
 * A backend takes a batch of combined texts plus the candidate labels
 * and returns raw spans with UTF-16 code-unit offsets, the native
 * indexing of JavaScript strings; the export step converts to code
 * points. Two implementations: a dynamically loaded span-labeling
 * model for real use, and a deterministic lexicon matcher that the
 * tests (and offline smoke runs) drive.
 */

export interface RawSpan {
  /** half-open, in UTF-16 code units of the input text */
  start: number;
  end: number;
  label: string;
  score: number;
}

export interface InferenceBackend {
  readonly name: string;
  predict(texts: readonly string[], labels: readonly string[]): Promise<RawSpan[][]>;
}

export class ModelLoadError extends Error {}

/** Deterministic backend: emits one span per whole-word occurrence of
 * each known term. No model download, no randomness; reruns are
 * byte-identical, which is what the export contract tests need. */
export class LexiconBackend implements InferenceBackend {
  readonly name = "lexicon";

  constructor(private readonly terms: ReadonlyMap<string, { label: string; score: number }>) {}

  predict(texts: readonly string[], _labels: readonly string[]): Promise<RawSpan[][]> {
    return Promise.resolve(texts.map((text) => this.scanText(text)));
  }

  private scanText(text: string): RawSpan[] {
    const spans: RawSpan[] = [];
    for (const [term, { label, score }] of this.terms) {
      for (let from = 0; ; ) {
        const at = text.indexOf(term, from);
        if (at < 0) break;
        if (isWordBounded(text, at, at + term.length)) {
          spans.push({ start: at, end: at + term.length, label, score });
        }
        from = at + 1;
      }
    }
    return spans;
  }
}

const WORD_CHAR = /[\p{L}\p{N}]/u;

function isWordBounded(text: string, start: number, end: number): boolean {
  const before = start > 0 ? text[start - 1]! : "";
  const after = end < text.length ? text[end]! : "";
  return !WORD_CHAR.test(before) && !WORD_CHAR.test(after);
}

/** Load the real span-labeling model named by the config.
 *
 * The checkpoint is resolved by identifier through the `gliner`
 * package (ONNX runtime under the hood). Note on tokenizers: the
 * published biomedical checkpoints bundle a tokenizer config the JS
 * runtime cannot always consume as-is, so the tokenizer is pinned here
 * to the same identifier explicitly instead of trusting the bundle;
 * if a checkpoint needs a different tokenizer repo, extend the
 * identifier syntax rather than editing the bundle.
 */
export async function loadModelBackend(
  model: string,
  device: string,
): Promise<InferenceBackend> {
  let gliner: any;
  try {
    gliner = await import("gliner");
  } catch {
    throw new ModelLoadError(
      `model backend unavailable: install the optional "gliner" package to run ${model}`,
    );
  }
  const runner = new gliner.Gliner({
    tokenizerPath: model,
    onnxSettings: { modelPath: model, executionProvider: device },
  });
  await runner.initialize();
  return {
    name: model,
    async predict(texts: readonly string[], labels: readonly string[]): Promise<RawSpan[][]> {
      const decoded = await runner.inference({ texts: [...texts], entities: [...labels] });
      return decoded.map((spans: Array<{ start: number; end: number; label: string; score: number }>) =>
        spans.map((s) => ({ start: s.start, end: s.end, label: s.label, score: s.score })),
      );
    },
  };
}
