import { describe, expect, it } from "vitest";

import {
  formatProbability,
  renderCounterfactualTable,
  renderErrorBanner,
  renderIntakeForm,
  renderPredictionPanel,
  renderWaterfall,
} from "../src/render";
import type {
  CounterfactualResponse,
  Explanation,
  ModelMeta,
  Prediction,
} from "../src/types";
import { fixtures } from "./stub";

const meta = fixtures.meta as unknown as ModelMeta;
const prediction = fixtures.predict as unknown as Prediction;
const explanation = fixtures.explain as unknown as Explanation;
const counterfactual = fixtures.counterfactual as unknown as CounterfactualResponse;

describe("renderers", () => {
  it("are pure: same input gives the identical markup", () => {
    const record = { hemo: 9.1, sc: 3.2, al: 3, htn: "yes", age: 61, dm: "yes" };
    expect(renderIntakeForm(meta, record)).toBe(renderIntakeForm(meta, record));
    expect(renderWaterfall(explanation)).toBe(renderWaterfall(explanation));
  });

  it("intake form carries units, ranges and immutability from metadata", () => {
    const html = renderIntakeForm(meta, { hemo: 9.1, sc: 3.2, al: 3, htn: "yes", age: 61, dm: "yes" });
    expect(html).toContain("hemo (g/dL)");
    expect(html).toContain('data-slider="hemo"');
    expect(html).not.toContain('data-slider="age"'); // immutable: no slider
    expect(html).toContain('data-field="age"');
    expect(html).toContain("<select data-field=\"htn\">");
  });

  it("prediction panel renders the service probability verbatim", () => {
    const html = renderPredictionPanel(prediction, null);
    const p = prediction.probabilities[prediction.class] ?? 0;
    expect(html).toContain(`<span data-probability>${formatProbability(p)}</span>`);
    expect(html).toContain("ckd");
  });

  it("waterfall draws one signed bar per feature", () => {
    const html = renderWaterfall(explanation);
    for (const name of explanation.shapley.feature_names) {
      expect(html).toContain(`data-waterfall-bar="${name}"`);
    }
    const signs = (html.match(/class="(positive|negative)"/g) ?? []).length;
    expect(signs).toBe(explanation.shapley.phi.length);
  });

  it("counterfactual table highlights exactly the changed cells", () => {
    const html = renderCounterfactualTable(counterfactual);
    const changed = (html.match(/class="changed"/g) ?? []).length;
    const expected = counterfactual.counterfactual_units.reduce(
      (n, entry) => n + entry.changed.length,
      0,
    );
    expect(changed).toBe(expected);
    expect(html).toContain('data-cf-index="0"');
    expect(html).toContain('class="original"');
  });

  it("error banner escapes markup and hides when clear", () => {
    expect(renderErrorBanner(null)).toContain("hidden");
    const html = renderErrorBanner('<script>alert("x")</script>');
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});
