/**
 * Console wiring: one what-if session per tab.
 *
 * Event flow: slider/field commits update the session record and start
 * one probe (a /predict + /explain pair). Probes are latest-wins: a new
 * commit aborts the in-flight pair, so the panels always show the
 * response for the record currently in the form.
 */

import { ServiceClient, ServiceError, isAbort } from "./api";
import {
  SessionState,
  createSession,
  loadRecord,
  pinBaseline,
  setField,
  withCounterfactuals,
  withError,
  withExplanation,
  withPrediction,
} from "./session";
import { renderShell } from "./render";
import type { FeatureMeta, GlobalPanel, ModelMeta, PatientRecord } from "./types";

function defaultValue(f: FeatureMeta): number | string {
  if (f.kind === "nominal") {
    return f.categories[0] ?? "0";
  }
  const mid = (f.min + f.max) / 2;
  return Math.round(mid * 10) / 10;
}

export function defaultRecord(meta: ModelMeta): PatientRecord {
  const record: PatientRecord = {};
  for (const f of meta.features) {
    record[f.name] = defaultValue(f);
  }
  return record;
}

export class Console {
  private meta!: ModelMeta;
  private state!: SessionState;
  private globalPanel: GlobalPanel | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ServiceClient,
  ) {
    this.root.addEventListener("change", (e) => this.onChange(e));
    this.root.addEventListener("input", (e) => this.onInput(e));
    this.root.addEventListener("click", (e) => this.onClick(e));
  }

  async start(initial?: PatientRecord): Promise<void> {
    this.meta = await this.client.meta();
    this.client.pinFingerprint(this.meta.fingerprint);
    this.state = createSession(initial ?? defaultRecord(this.meta));
    this.render();
    await this.probe();
    this.client
      .globalPanel()
      .then((panel) => {
        this.globalPanel = panel;
        this.render();
      })
      .catch((error) => this.onFailure(error));
  }

  get session(): SessionState {
    return this.state;
  }

  private render(): void {
    this.root.innerHTML = renderShell(this.meta, this.state, this.globalPanel);
  }

  private feature(name: string): FeatureMeta | undefined {
    return this.meta.features.find((f) => f.name === name);
  }

  /** Live slider drag: mirror the value into the number field only. */
  private onInput(event: Event): void {
    const target = event.target as HTMLElement;
    const name = target.getAttribute("data-slider");
    if (name === null) {
      return;
    }
    const field = this.root.querySelector<HTMLInputElement>(
      `[data-field="${name}"]`,
    );
    if (field !== null) {
      field.value = (target as HTMLInputElement).value;
    }
  }

  /** Commit on slider release / field change: validate, then probe. */
  private onChange(event: Event): void {
    const target = event.target as HTMLInputElement;
    const name =
      target.getAttribute("data-slider") ?? target.getAttribute("data-field");
    if (name === null) {
      return;
    }
    const spec = this.feature(name);
    if (spec === undefined) {
      return;
    }
    if (spec.kind === "nominal") {
      this.commit(name, target.value);
      return;
    }
    const value = Number(target.value);
    if (Number.isNaN(value) || value < spec.min || value > spec.max) {
      this.fieldError(
        name,
        `${name} must be between ${spec.min} and ${spec.max}`,
      );
      return;
    }
    this.commit(name, value);
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    const action = target.closest("[data-action]")?.getAttribute("data-action");
    if (action === "pin-baseline") {
      this.state = pinBaseline(this.state);
      this.render();
      return;
    }
    if (action === "counterfactual") {
      void this.requestCounterfactuals();
      return;
    }
    const row = target.closest("[data-cf-index]");
    if (row !== null) {
      const idx = Number(row.getAttribute("data-cf-index"));
      const entry = this.state.counterfactuals?.counterfactual_units[idx];
      if (entry !== undefined) {
        this.state = loadRecord(this.state, entry.record);
        this.render();
        void this.probe();
      }
    }
  }

  private commit(name: string, value: number | string): void {
    this.state = setField(this.state, name, value);
    this.render();
    void this.probe();
  }

  /** One /predict + one /explain for the current record (latest-wins). */
  private async probe(): Promise<void> {
    const record = this.state.record;
    try {
      const [prediction, explanation] = await Promise.all([
        this.client.predict(record),
        this.client.explain(record),
      ]);
      if (this.state.record !== record) {
        return; // a newer commit superseded this probe
      }
      this.state = withExplanation(
        withPrediction(this.state, prediction),
        explanation,
      );
      this.render();
    } catch (error) {
      this.onFailure(error);
    }
  }

  private async requestCounterfactuals(): Promise<void> {
    try {
      const response = await this.client.counterfactual(this.state.record);
      this.state = withCounterfactuals(this.state, response);
      this.render();
    } catch (error) {
      this.onFailure(error);
    }
  }

  private fieldError(name: string, message: string): void {
    const slot = this.root.querySelector(`[data-error-for="${name}"]`);
    if (slot !== null) {
      slot.textContent = message;
    }
  }

  private onFailure(error: unknown): void {
    if (isAbort(error)) {
      return; // superseded request; panels keep the newer response
    }
    if (error instanceof ServiceError && error.field !== undefined) {
      this.fieldError(error.field, error.message);
      return;
    }
    const message =
      error instanceof ServiceError
        ? error.message
        : "service unreachable; session history preserved";
    this.state = withError(this.state, message);
    this.render();
  }
}

declare global {
  interface Window {
    NEPHRO_XAI_SERVICE?: string;
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root !== null) {
    const base = window.NEPHRO_XAI_SERVICE ?? "http://127.0.0.1:8000";
    void new Console(root, new ServiceClient(base)).start();
  }
}
