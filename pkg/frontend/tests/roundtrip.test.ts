/**
 * UI round trip against the stub service with recorded fixtures:
 * a slider change settles to exactly one /predict + one /explain call
 * (superseded requests cancelled), the rendered probability matches the
 * service response verbatim, and clicking a counterfactual row
 * repopulates the intake form.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api";
import { Console } from "../src/main";
import { formatProbability } from "../src/render";
import { StubService, createStubService, fixtures, flush } from "./stub";

const RECORD = { hemo: 9.1, sc: 3.2, al: 3, htn: "yes", age: 61, dm: "yes" };

let root: HTMLElement;
let stub: StubService;
let console_: Console;

async function boot(): Promise<void> {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  stub = createStubService();
  console_ = new Console(root, new ServiceClient("http://stub", { transport: stub.transport }));
  await console_.start(RECORD);
  await flush();
}

function slider(name: string): HTMLInputElement {
  const el = root.querySelector<HTMLInputElement>(`[data-slider="${name}"]`);
  if (el === null) {
    throw new Error(`no slider for ${name}`);
  }
  return el;
}

function releaseSlider(name: string, value: number): void {
  const el = slider(name);
  el.value = String(value);
  el.dispatchEvent(new Event("change", { bubbles: true }));
}

beforeEach(boot);

describe("what-if round trip", () => {
  it("boots with one probe and renders the recorded probability", () => {
    expect(stub.completedOn("/predict")).toHaveLength(1);
    expect(stub.completedOn("/explain")).toHaveLength(1);
    const p = fixtures.predict.probabilities.ckd;
    expect(root.querySelector("[data-probability]")?.textContent).toBe(
      formatProbability(p),
    );
    expect(root.querySelector("[data-predicted-class]")?.textContent).toBe("ckd");
  });

  it("slider release triggers exactly one /predict + one /explain", async () => {
    const before = stub.completedOn("/predict").length;
    releaseSlider("hemo", 14.0);
    await flush();
    expect(stub.completedOn("/predict")).toHaveLength(before + 1);
    expect(stub.completedOn("/explain")).toHaveLength(before + 1);
    const p = fixtures.predictWhatIf.probabilities.ckd;
    expect(root.querySelector("[data-probability]")?.textContent).toBe(
      formatProbability(p),
    );
  });

  it("rapid releases cancel superseded probes: one completed pair", async () => {
    stub.delays["/predict"] = 25;
    stub.delays["/explain"] = 25;
    const before = stub.completedOn("/predict").length;
    releaseSlider("hemo", 12.0);
    releaseSlider("hemo", 14.0); // supersedes the in-flight probe
    await flush(60);
    expect(stub.completedOn("/predict")).toHaveLength(before + 1);
    expect(stub.completedOn("/explain")).toHaveLength(before + 1);
    expect(stub.aborted.length).toBe(2); // the hemo=12 pair
    const p = fixtures.predictWhatIf.probabilities.ckd;
    expect(root.querySelector("[data-probability]")?.textContent).toBe(
      formatProbability(p),
    );
  });

  it("counterfactual row click repopulates the form", async () => {
    root
      .querySelector<HTMLButtonElement>('[data-action="counterfactual"]')!
      .click();
    await flush();
    const row = root.querySelector<HTMLTableRowElement>('[data-cf-index="0"]');
    expect(row).not.toBeNull();
    row!.click();
    await flush();
    const entry = fixtures.counterfactual.counterfactual_units[0];
    for (const [name, value] of Object.entries(entry.record)) {
      const field = root.querySelector<HTMLInputElement | HTMLSelectElement>(
        `[data-field="${name}"]`,
      );
      expect(field).not.toBeNull();
      if (typeof value === "number") {
        expect(Number(field!.value)).toBeCloseTo(value, 6);
      } else {
        expect(field!.value).toBe(value);
      }
    }
    expect(console_.session.record.hemo).toBeCloseTo(
      entry.record.hemo as number,
      6,
    );
  });

  it("every displayed probability originates from a service response", () => {
    // the console holds no local model: the numbers on screen are the
    // fixture's, byte-for-byte through the formatter
    for (const [label, prob] of Object.entries(fixtures.predict.probabilities)) {
      expect(
        root.querySelector(`[data-probability-for="${label}"]`)?.textContent,
      ).toBe(formatProbability(prob));
    }
  });

  it("out-of-range input shows an inline error and sends nothing", async () => {
    const calls = stub.calls.length;
    const field = root.querySelector<HTMLInputElement>('[data-field="hemo"]')!;
    field.value = "99";
    field.dispatchEvent(new Event("change", { bubbles: true }));
    await flush();
    expect(stub.calls.length).toBe(calls);
    expect(
      root.querySelector('[data-error-for="hemo"]')?.textContent,
    ).toContain("between");
  });

  it("service failure raises a banner and preserves history", async () => {
    const historyBefore = console_.session.history.length;
    stub.failures["/predict"] = { status: 500, body: { error: "internal error" } };
    stub.failures["/explain"] = { status: 500, body: { error: "internal error" } };
    releaseSlider("hemo", 14.0);
    await flush();
    const banner = root.querySelector("[data-banner]");
    expect(banner?.textContent).toContain("internal error");
    expect(console_.session.history.length).toBe(historyBefore + 1);
  });

  it("renders the global panel from /global", () => {
    expect(stub.completedOn("/global")).toHaveLength(1);
    const ranking = root.querySelectorAll("[data-ranking] li");
    expect(ranking.length).toBe(fixtures.global.ranking.length);
    expect(root.querySelector('[data-chart="PDP:hemo"]')).not.toBeNull();
    expect(root.querySelector('[data-chart="ALE:hemo"]')).not.toBeNull();
  });
});
