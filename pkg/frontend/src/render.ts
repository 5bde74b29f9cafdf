/**
 * Pure renderers: session state in, HTML strings out.
 *
 * No renderer touches the network or mutates state, so every screen is
 * a deterministic function of its inputs (snapshot-testable).
 */

import type { SessionState } from "./session";
import type {
  CounterfactualResponse,
  Explanation,
  FeatureMeta,
  GlobalPanel,
  GridDocument,
  ModelMeta,
  PatientRecord,
  Prediction,
} from "./types";

function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function formatProbability(p: number): string {
  return `${(100 * p).toFixed(1)}%`;
}

function formatValue(value: number | string): string {
  if (typeof value === "string") {
    return escapeHtml(value);
  }
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}

// ---------------------------------------------------------------------------
// intake form + what-if sliders

function numericField(f: FeatureMeta, value: number): string {
  const step = (f.max - f.min) / 200;
  const slider = f.immutable
    ? ""
    : `<input type="range" data-slider="${f.name}" min="${f.min}" max="${f.max}" ` +
      `step="${step}" value="${value}">`;
  return `
    <div class="field" data-field-row="${f.name}">
      <label>${f.name}${f.unit ? ` (${escapeHtml(f.unit)})` : ""}${f.immutable ? " &#128274;" : ""}</label>
      <input type="number" data-field="${f.name}" min="${f.min}" max="${f.max}"
        step="${step}" value="${value}" ${f.immutable ? "" : ""}>
      ${slider}
      <span class="range-hint">${f.min}&ndash;${f.max}</span>
      <span class="field-error" data-error-for="${f.name}"></span>
    </div>`;
}

function nominalField(f: FeatureMeta, value: number | string): string {
  const selected =
    typeof value === "string" ? value : (f.categories[value] ?? "");
  const options = f.categories
    .map(
      (c) =>
        `<option value="${escapeHtml(c)}"${c === selected ? " selected" : ""}>${escapeHtml(c)}</option>`,
    )
    .join("");
  return `
    <div class="field" data-field-row="${f.name}">
      <label>${f.name}${f.immutable ? " &#128274;" : ""}</label>
      <select data-field="${f.name}">${options}</select>
      <span class="field-error" data-error-for="${f.name}"></span>
    </div>`;
}

export function renderIntakeForm(meta: ModelMeta, record: PatientRecord): string {
  const fields = meta.features
    .map((f) => {
      const value = record[f.name];
      return f.kind === "numeric"
        ? numericField(f, Number(value))
        : nominalField(f, value ?? 0);
    })
    .join("");
  return `<form data-panel="intake">${fields}
    <button type="button" data-action="pin-baseline">Pin as baseline</button>
    <button type="button" data-action="counterfactual">Find counterfactuals</button>
  </form>`;
}

// ---------------------------------------------------------------------------
// prediction panel + attribution waterfall

export function renderPredictionPanel(
  prediction: Prediction | null,
  baseline: Prediction | null,
): string {
  if (prediction === null) {
    return `<div data-panel="prediction"><em>no prediction yet</em></div>`;
  }
  const p = prediction.probabilities[prediction.class] ?? 0;
  const rows = Object.entries(prediction.probabilities)
    .map(([label, prob]) => {
      const delta =
        baseline === null
          ? ""
          : ` <span class="delta">(${formatDelta(prob - (baseline.probabilities[label] ?? 0))} vs baseline)</span>`;
      return `<li>${escapeHtml(label)}: <span data-probability-for="${escapeHtml(label)}">${formatProbability(prob)}</span>${delta}</li>`;
    })
    .join("");
  return `<div data-panel="prediction">
    <strong data-predicted-class>${escapeHtml(prediction.class)}</strong>
    <span data-probability>${formatProbability(p)}</span>
    <ul>${rows}</ul>
  </div>`;
}

function formatDelta(d: number): string {
  const sign = d >= 0 ? "+" : "";
  return `${sign}${(100 * d).toFixed(1)}pp`;
}

const WATERFALL_WIDTH = 420;
const BAR_HEIGHT = 18;

/** Signed attribution bars laid out as a waterfall from the base value. */
export function renderWaterfall(explanation: Explanation | null): string {
  if (explanation === null) {
    return `<div data-panel="waterfall"></div>`;
  }
  const { phi, base_value: base, feature_names: names } = explanation.shapley;
  const order = phi
    .map((value, i) => ({ value, i }))
    .sort((a, b) => Math.abs(b.value) - Math.abs(a.value));
  const span = Math.max(
    0.2,
    ...order.map(({ value }, k) => {
      const level =
        base + order.slice(0, k + 1).reduce((s, o) => s + o.value, 0);
      return Math.abs(level - base) + Math.abs(value);
    }),
  );
  const scale = (WATERFALL_WIDTH - 120) / (2 * span);
  const mid = 60 + span * scale;
  let level = base;
  const bars = order.map(({ value, i }, k) => {
    const x0 = mid + (level - base) * scale;
    level += value;
    const x1 = mid + (level - base) * scale;
    const y = 10 + k * (BAR_HEIGHT + 6);
    const left = Math.min(x0, x1);
    const width = Math.max(Math.abs(x1 - x0), 1);
    const cls = value >= 0 ? "positive" : "negative";
    return (
      `<rect class="${cls}" data-waterfall-bar="${names[i]}" x="${left.toFixed(1)}" y="${y}" ` +
      `width="${width.toFixed(1)}" height="${BAR_HEIGHT}"></rect>` +
      `<text x="4" y="${y + 13}">${names[i]} ${value >= 0 ? "+" : ""}${value.toFixed(3)}</text>`
    );
  });
  const height = 20 + order.length * (BAR_HEIGHT + 6);
  return `<div data-panel="waterfall">
    <svg viewBox="0 0 ${WATERFALL_WIDTH} ${height}" width="${WATERFALL_WIDTH}" height="${height}">
      <line x1="${mid}" y1="0" x2="${mid}" y2="${height}" class="baseline"></line>
      ${bars.join("\n")}
    </svg>
    <span class="base">base ${base.toFixed(3)}</span>
  </div>`;
}

// ---------------------------------------------------------------------------
// counterfactual table

export function renderCounterfactualTable(
  cf: CounterfactualResponse | null,
): string {
  if (cf === null) {
    return `<div data-panel="counterfactual"></div>`;
  }
  const names = cf.result.feature_names;
  const header = names.map((n) => `<th>${n}</th>`).join("");
  const rows = cf.counterfactual_units
    .map((entry, idx) => {
      const cells = names
        .map((name) => {
          const changed = entry.changed.includes(name);
          return `<td data-feature="${name}"${changed ? ' class="changed"' : ""}>${formatValue(entry.record[name] ?? "")}</td>`;
        })
        .join("");
      return `<tr data-cf-index="${idx}" title="click to load as current record">
        <td>${escapeHtml(entry.predicted_class)} ${formatProbability(entry.probability)}</td>${cells}
      </tr>`;
    })
    .join("");
  const original = names
    .map((name) => `<td data-feature="${name}">${formatValue(cf.original_units[name] ?? "")}</td>`)
    .join("");
  return `<div data-panel="counterfactual">
    <table>
      <thead><tr><th>prediction</th>${header}</tr></thead>
      <tbody>${rows}
        <tr class="original"><td>original</td>${original}</tr>
      </tbody>
    </table>
  </div>`;
}

// ---------------------------------------------------------------------------
// global PDP/ALE panel

function polyline(grid: number[], values: number[], w: number, h: number): string {
  const xMin = Math.min(...grid);
  const xMax = Math.max(...grid);
  const yMin = Math.min(...values);
  const yMax = Math.max(...values);
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;
  const points = grid
    .map((x, i) => {
      const px = (4 + ((x - xMin) / xSpan) * (w - 8)).toFixed(1);
      const py = (h - 4 - (((values[i] ?? 0) - yMin) / ySpan) * (h - 8)).toFixed(1);
      return `${px},${py}`;
    })
    .join(" ");
  return `<polyline fill="none" points="${points}"></polyline>`;
}

function gridChart(doc: GridDocument, kindLabel: string): string {
  const grid = doc.grid[0] ?? [];
  const values = doc.values as number[];
  return `<figure data-chart="${kindLabel}:${doc.feature_names[0]}">
    <figcaption>${kindLabel} ${doc.feature_names[0]}</figcaption>
    <svg viewBox="0 0 160 90" width="160" height="90">${polyline(grid, values, 160, 90)}</svg>
  </figure>`;
}

export function renderGlobalPanel(panel: GlobalPanel | null): string {
  if (panel === null) {
    return `<div data-panel="global"></div>`;
  }
  const ranking = panel.ranking
    .map(
      (r) =>
        `<li>${escapeHtml(r.feature)} <span class="score">${r.mean_abs_phi.toFixed(4)}</span></li>`,
    )
    .join("");
  const charts = [
    ...panel.pdp.map((d) => gridChart(d, "PDP")),
    ...panel.ale.map((d) => gridChart(d, "ALE")),
  ].join("");
  return `<div data-panel="global">
    <ol data-ranking>${ranking}</ol>
    <div class="charts">${charts}</div>
  </div>`;
}

// ---------------------------------------------------------------------------
// banners + shell

export function renderErrorBanner(message: string | null): string {
  if (message === null) {
    return `<div data-banner hidden></div>`;
  }
  return `<div data-banner class="banner error" role="alert">${escapeHtml(message)}</div>`;
}

export function renderShell(meta: ModelMeta, state: SessionState, globalPanel: GlobalPanel | null): string {
  return `
    ${renderErrorBanner(state.error)}
    <header>
      <h1>CKD what-if console</h1>
      <span class="model">${escapeHtml(meta.family)} &middot; CV accuracy ${formatProbability(meta.cv_metrics.accuracy ?? 0)}</span>
    </header>
    <main>
      <section data-region="intake">${renderIntakeForm(meta, state.record)}</section>
      <section data-region="prediction">
        ${renderPredictionPanel(state.prediction, state.baselinePrediction)}
        ${renderWaterfall(state.explanation)}
      </section>
      <section data-region="counterfactual">${renderCounterfactualTable(state.counterfactuals)}</section>
      <section data-region="global">${renderGlobalPanel(globalPanel)}</section>
    </main>`;
}
