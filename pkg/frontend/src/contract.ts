// Shared contract with the annotation service; mirrored in
// ../contract/annotation_api.json and checked by tests on both sides.

export const PHASES = ["DifferenceOnly", "WithReference"] as const;
export type Phase = (typeof PHASES)[number];

export const CATEGORIES = [
  "WordForm",
  "Reordered",
  "Paraphrased",
  "AddRemove",
  "Other",
] as const;
export type Category = (typeof CATEGORIES)[number];

export const VERDICTS = ["OriginalBetter", "VariantBetter", "Equal"] as const;
export type Verdict = (typeof VERDICTS)[number];

export type BlindPayload = {
  source_original: string;
  source_variant: string;
  translation_original: string;
  translation_variant: string;
};

export type ReferencePayload = BlindPayload & {
  reference_original: string;
  reference_variant: string;
};

export type AnnotationItem = {
  id: string;
  variation_id: string;
  phase: Phase;
  payload: BlindPayload | ReferencePayload;
};

export type AnnotationRecord = {
  item_id: string;
  annotator_id: string;
  phase: Phase;
  categories: Category[];
  expected: boolean;
  quality_verdict: Verdict | null;
};

export type ApiError = {
  code: string;
  message: string;
  violated_rule?: string;
};
