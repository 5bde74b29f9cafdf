/**
 * What-if session state.
 *
 * Pure data + pure transition functions: the history of probed records
 * is append-only within a session, and the pinned baseline is immutable
 * once set. Rendering consumes snapshots of this state only.
 */

import type {
  CounterfactualResponse,
  Explanation,
  PatientRecord,
  Prediction,
} from "./types";

export interface SessionState {
  record: PatientRecord;
  baseline: PatientRecord | null;
  baselinePrediction: Prediction | null;
  prediction: Prediction | null;
  explanation: Explanation | null;
  counterfactuals: CounterfactualResponse | null;
  history: readonly PatientRecord[];
  error: string | null;
}

export function createSession(record: PatientRecord): SessionState {
  return {
    record: { ...record },
    baseline: null,
    baselinePrediction: null,
    prediction: null,
    explanation: null,
    counterfactuals: null,
    history: [{ ...record }],
    error: null,
  };
}

export function setField(
  state: SessionState,
  name: string,
  value: number | string,
): SessionState {
  const record = { ...state.record, [name]: value };
  return { ...state, record, history: [...state.history, record], error: null };
}

/** Replace the whole record, e.g. when loading a counterfactual row. */
export function loadRecord(
  state: SessionState,
  record: PatientRecord,
): SessionState {
  const copy = { ...record };
  return { ...state, record: copy, history: [...state.history, copy], error: null };
}

/** Pin the current record as the comparison baseline; first pin wins. */
export function pinBaseline(state: SessionState): SessionState {
  if (state.baseline !== null) {
    return state;
  }
  return {
    ...state,
    baseline: { ...state.record },
    baselinePrediction: state.prediction,
  };
}

export function withPrediction(
  state: SessionState,
  prediction: Prediction,
): SessionState {
  return { ...state, prediction, error: null };
}

export function withExplanation(
  state: SessionState,
  explanation: Explanation,
): SessionState {
  return { ...state, explanation, error: null };
}

export function withCounterfactuals(
  state: SessionState,
  counterfactuals: CounterfactualResponse,
): SessionState {
  return { ...state, counterfactuals, error: null };
}

export function withError(state: SessionState, message: string): SessionState {
  return { ...state, error: message };
}
