import { describe, expect, it } from "vitest";

import { ServiceClient, ServiceError } from "../src/api";
import { createStubService, fixtures } from "./stub";

const RECORD = { hemo: 9.1, sc: 3.2, al: 3, htn: 1, dm: 1, age: 61 };

describe("service client", () => {
  it("fetches metadata and sends the seed header", async () => {
    const stub = createStubService();
    const client = new ServiceClient("http://stub", {
      transport: async (url, init) => {
        const headers = init?.headers as Record<string, string>;
        expect(headers["X-Seed"]).toBe("7");
        return stub.transport(url, init);
      },
      seed: 7,
    });
    const meta = await client.meta();
    expect(meta.family).toBe(fixtures.meta.family);
    expect(meta.features.map((f) => f.name)).toEqual([
      "hemo",
      "sc",
      "al",
      "htn",
      "age",
      "dm",
    ]);
  });

  it("sends the pinned fingerprint on later requests", async () => {
    const seen: string[] = [];
    const stub = createStubService();
    const client = new ServiceClient("http://stub", {
      transport: async (url, init) => {
        const headers = init?.headers as Record<string, string>;
        seen.push(headers["X-Schema-Fingerprint"] ?? "");
        return stub.transport(url, init);
      },
    });
    await client.meta();
    client.pinFingerprint("abc123");
    await client.predict(RECORD);
    expect(seen).toEqual(["", "abc123"]);
  });

  it("turns error documents into ServiceError with status and field", async () => {
    const stub = createStubService();
    stub.failures["/predict"] = {
      status: 422,
      body: { error: "'hemo' outside plausible range", field: "hemo" },
    };
    const client = new ServiceClient("http://stub", { transport: stub.transport });
    const error = await client.predict(RECORD).catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ServiceError);
    expect((error as ServiceError).status).toBe(422);
    expect((error as ServiceError).field).toBe("hemo");
  });

  it("aborts the in-flight request when the channel is reused", async () => {
    const stub = createStubService();
    stub.delays["/predict"] = 30;
    const client = new ServiceClient("http://stub", { transport: stub.transport });
    const first = client.predict(RECORD).catch((e: unknown) => e);
    const second = client.predict({ ...RECORD, hemo: 14.0 });
    const [firstResult, secondResult] = await Promise.all([first, second]);
    expect(firstResult).toBeInstanceOf(DOMException);
    expect(secondResult.probabilities).toEqual(
      fixtures.predictWhatIf.probabilities,
    );
    expect(stub.aborted).toHaveLength(1);
    expect(stub.completedOn("/predict")).toHaveLength(1);
  });

  it("does not cancel across channels", async () => {
    const stub = createStubService();
    stub.delays["/predict"] = 10;
    stub.delays["/explain"] = 10;
    const client = new ServiceClient("http://stub", { transport: stub.transport });
    const [prediction, explanation] = await Promise.all([
      client.predict(RECORD),
      client.explain(RECORD),
    ]);
    expect(prediction.class).toBe("ckd");
    expect(explanation.shapley.phi).toHaveLength(6);
    expect(stub.aborted).toHaveLength(0);
  });
});
