import { describe, expect, it } from "vitest";

import {
  createSession,
  loadRecord,
  pinBaseline,
  setField,
  withPrediction,
} from "../src/session";
import type { Prediction } from "../src/types";

const RECORD = { hemo: 9.1, sc: 3.2, al: 3, htn: "yes", age: 61, dm: "yes" };

const PREDICTION: Prediction = {
  schema_version: 1,
  class: "ckd",
  class_index: 0,
  probabilities: { ckd: 1, notckd: 0 },
};

describe("session state", () => {
  it("starts with the initial record as history", () => {
    const s = createSession(RECORD);
    expect(s.history).toHaveLength(1);
    expect(s.history[0]).toEqual(RECORD);
    expect(s.baseline).toBeNull();
  });

  it("history is append-only across edits and loads", () => {
    let s = createSession(RECORD);
    s = setField(s, "hemo", 12);
    s = setField(s, "sc", 1.1);
    s = loadRecord(s, { ...RECORD, hemo: 15 });
    expect(s.history).toHaveLength(4);
    expect(s.history[0]?.hemo).toBe(9.1);
    expect(s.history[1]?.hemo).toBe(12);
    expect(s.history[3]?.hemo).toBe(15);
    expect(s.record.hemo).toBe(15);
  });

  it("edits never mutate earlier history entries", () => {
    let s = createSession(RECORD);
    const first = s.history[0];
    s = setField(s, "hemo", 13);
    expect(first?.hemo).toBe(9.1);
  });

  it("baseline pins the current record and is immutable once set", () => {
    let s = withPrediction(createSession(RECORD), PREDICTION);
    s = pinBaseline(s);
    expect(s.baseline?.hemo).toBe(9.1);
    expect(s.baselinePrediction?.class).toBe("ckd");
    s = setField(s, "hemo", 14);
    s = pinBaseline(s); // second pin must not move the baseline
    expect(s.baseline?.hemo).toBe(9.1);
  });

  it("errors clear on the next successful transition", () => {
    let s = createSession(RECORD);
    s = { ...s, error: "boom" };
    s = setField(s, "hemo", 10);
    expect(s.error).toBeNull();
  });
});
