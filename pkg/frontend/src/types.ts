/**
 * Service contract types for the explanation service.
 *
 * Everything here mirrors the HTTP/JSON documents exactly; the console
 * never computes predictions locally.
 */

export type PatientRecord = Record<string, number | string>;

export interface FeatureMeta {
  name: string;
  kind: "numeric" | "nominal";
  unit: string;
  categories: string[];
  min: number;
  max: number;
  immutable: boolean;
}

export interface ModelMeta {
  schema_version: number;
  family: string;
  params: Record<string, unknown>;
  fingerprint: string;
  class_labels: string[];
  cv_metrics: Record<string, number>;
  immutables: string[];
  features: FeatureMeta[];
}

export interface Prediction {
  schema_version: number;
  class: string;
  class_index: number;
  probabilities: Record<string, number>;
}

export interface LimeCondition {
  feature: string;
  condition: string;
  weight: number;
}

export interface Explanation {
  schema_version: number;
  lime: {
    conditions: LimeCondition[];
    intercept: number;
    fidelity_r2: number;
    predicted_class: number;
    probability: number;
  };
  shapley: {
    phi: number[];
    base_value: number;
    feature_names: string[];
  };
  probabilities: Record<string, number>;
}

export interface CounterfactualEntry {
  record: PatientRecord;
  predicted_class: string;
  probability: number;
  distance: number;
  changed: string[];
}

export interface CounterfactualResponse {
  schema_version: number;
  result: {
    original_class: number;
    original_probability: number;
    target_class: number;
    feature_names: string[];
  };
  original_units: PatientRecord;
  counterfactual_units: CounterfactualEntry[];
}

export interface GridDocument {
  kind: string;
  grid: number[][];
  values: number[] | number[][];
  counts: number[] | null;
  feature_names: string[];
  units: string;
}

export interface GlobalPanel {
  schema_version: number;
  ranking: { feature: string; mean_abs_phi: number }[];
  pdp: GridDocument[];
  ale: GridDocument[];
}
