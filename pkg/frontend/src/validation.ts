// Client-side mirror of the service's record validation rules, so the UI
// never produces a payload the service rejects.

import {
  AnnotationItem,
  AnnotationRecord,
  CATEGORIES,
  Category,
  Verdict,
} from "./contract.js";

export type FormState = {
  expected: boolean;
  categories: Category[];
  verdict: Verdict | null;
};

export const emptyForm: FormState = {
  expected: false,
  categories: [],
  verdict: null,
};

// Marking a change as expected clears and excludes category labels.
export function toggleExpected(state: FormState, on: boolean): FormState {
  return { ...state, expected: on, categories: on ? [] : state.categories };
}

export function toggleCategory(state: FormState, category: Category): FormState {
  if (state.expected) {
    return state;
  }
  const categories = state.categories.includes(category)
    ? state.categories.filter((c) => c !== category)
    : [...state.categories, category];
  return { ...state, categories };
}

export function selectVerdict(state: FormState, verdict: Verdict): FormState {
  return { ...state, verdict };
}

export function validationError(item: AnnotationItem, state: FormState): string | null {
  if (state.expected && state.categories.length > 0) {
    return "An expected change cannot carry difference categories.";
  }
  for (const category of state.categories) {
    if (!CATEGORIES.includes(category)) {
      return `Unknown category ${category}.`;
    }
  }
  if (item.phase === "WithReference" && state.verdict === null) {
    return "Pick which translation is better (or Equal) before submitting.";
  }
  if (item.phase === "DifferenceOnly" && state.verdict !== null) {
    return "A quality verdict is not part of the blind phase.";
  }
  return null;
}

export function toRecord(
  item: AnnotationItem,
  annotator: string,
  state: FormState
): AnnotationRecord {
  const error = validationError(item, state);
  if (error !== null) {
    throw new Error(error);
  }
  return {
    item_id: item.id,
    annotator_id: annotator,
    phase: item.phase,
    categories: [...state.categories],
    expected: state.expected,
    quality_verdict: item.phase === "WithReference" ? state.verdict : null,
  };
}
