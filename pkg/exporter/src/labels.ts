/** The thirteen entity labels the toolkit understands, in canonical
 * order. A model is prompted with exactly these as candidate labels;
 * anything else it emits is rejected, never written. */
export const CANONICAL_LABELS = [
  "bacteria",
  "biomedical_technique",
  "chemical",
  "DDF",
  "dietary_supplement",
  "drug",
  "food",
  "gene",
  "human",
  "animal",
  "anatomical_location",
  "microbiome",
  "statistical_technique",
] as const;

export type EntityLabel = (typeof CANONICAL_LABELS)[number];

const LABEL_SET: ReadonlySet<string> = new Set(CANONICAL_LABELS);

export function isCanonicalLabel(label: string): label is EntityLabel {
  return LABEL_SET.has(label);
}
