export { CANONICAL_LABELS, isCanonicalLabel, type EntityLabel } from "./labels.js";
export { codePointLength, OffsetMap } from "./offsets.js";
export {
  compareCodePoints,
  CorpusFormatError,
  parseSourceCorpus,
  predictionsToJson,
  readSourceCorpus,
  writePredictions,
  type PredictedMention,
  type SourceDocument,
} from "./corpus.js";
export { ExportConfigError, loadExportConfig, parseExportConfig, type ExportConfig } from "./config.js";
export {
  LexiconBackend,
  loadModelBackend,
  ModelLoadError,
  type InferenceBackend,
  type RawSpan,
} from "./backend.js";
export { exportPredictions, type ExportResult, type RejectedSpan } from "./export.js";
