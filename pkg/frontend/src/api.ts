/**
 * HTTP client for the explanation service.
 *
 * The transport is injectable so tests can run against a stub with
 * recorded responses. Each logical panel owns a request channel;
 * issuing a new request on a channel aborts the in-flight one
 * (latest-wins), so a burst of slider releases settles to exactly one
 * completed /predict and one completed /explain.
 */

import type {
  CounterfactualResponse,
  Explanation,
  GlobalPanel,
  ModelMeta,
  PatientRecord,
  Prediction,
} from "./types";

export type Transport = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly field?: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export function isAbort(error: unknown): boolean {
  return error instanceof DOMException && error.name === "AbortError";
}

export interface ClientOptions {
  transport?: Transport;
  seed?: number;
  fingerprint?: string;
}

export class ServiceClient {
  private readonly transport: Transport;
  private readonly seed: number;
  private fingerprint?: string;
  private readonly controllers = new Map<string, AbortController>();

  constructor(
    readonly baseUrl: string,
    options: ClientOptions = {},
  ) {
    this.transport = options.transport ?? ((url, init) => fetch(url, init));
    this.seed = options.seed ?? 1337;
    this.fingerprint = options.fingerprint;
  }

  /** Pin the artifact fingerprint so later requests 409 on a mismatch. */
  pinFingerprint(fingerprint: string): void {
    this.fingerprint = fingerprint;
  }

  private headers(): Record<string, string> {
    const headers: Record<string, string> = {
      "Content-Type": "application/json",
      "X-Seed": String(this.seed),
    };
    if (this.fingerprint !== undefined) {
      headers["X-Schema-Fingerprint"] = this.fingerprint;
    }
    return headers;
  }

  private async request<T>(
    channel: string,
    path: string,
    init: RequestInit = {},
  ): Promise<T> {
    this.controllers.get(channel)?.abort();
    const controller = new AbortController();
    this.controllers.set(channel, controller);
    const response = await this.transport(this.baseUrl + path, {
      ...init,
      headers: this.headers(),
      signal: controller.signal,
    });
    const body = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
      throw new ServiceError(
        response.status,
        typeof body.error === "string" ? body.error : `HTTP ${response.status}`,
        typeof body.field === "string" ? body.field : undefined,
      );
    }
    return body as T;
  }

  meta(): Promise<ModelMeta> {
    return this.request<ModelMeta>("meta", "/model/meta");
  }

  predict(record: PatientRecord): Promise<Prediction> {
    return this.request<Prediction>("predict", "/predict", {
      method: "POST",
      body: JSON.stringify({ record }),
    });
  }

  explain(record: PatientRecord): Promise<Explanation> {
    return this.request<Explanation>("explain", "/explain", {
      method: "POST",
      body: JSON.stringify({ record }),
    });
  }

  counterfactual(
    record: PatientRecord,
    k = 3,
  ): Promise<CounterfactualResponse> {
    return this.request<CounterfactualResponse>(
      "counterfactual",
      "/counterfactual",
      { method: "POST", body: JSON.stringify({ record, k }) },
    );
  }

  globalPanel(): Promise<GlobalPanel> {
    return this.request<GlobalPanel>("global", "/global");
  }
}
