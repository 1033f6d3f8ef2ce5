/**
 * Client for the prediction service HTTP API.
 *
 * Distinguishes "the service rejected this input" (HTTP 400) from "the
 * service cannot be reached" so the UI can choose between a validation
 * message and the error banner with retry.
 */

export interface StatFeatures {
  length: number;
  dot_count: number;
  slash_count: number;
  entropy: number;
}

export interface PredictionResult {
  url: string;
  label: "benign" | "malicious";
  score: number;
  stat_features: StatFeatures;
  latency_us: number;
}

export interface HealthStatus {
  status: string;
  model_version: string | null;
}

export class ServiceUnreachableError extends Error {
  constructor(message = "prediction service unreachable") {
    super(message);
    this.name = "ServiceUnreachableError";
  }
}

export class ValidationError extends Error {
  constructor(message = "the service rejected this URL") {
    super(message);
    this.name = "ValidationError";
  }
}

export class SentinelClient {
  constructor(readonly baseUrl: string) {}

  async classify(url: string): Promise<PredictionResult> {
    let resp: Response;
    try {
      resp = await fetch(`${this.baseUrl}/classify`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ url }),
      });
    } catch (err) {
      throw new ServiceUnreachableError(String(err));
    }
    if (resp.status === 400) {
      const body = await resp.json().catch(() => ({}));
      throw new ValidationError(typeof body.error === "string" ? body.error : undefined);
    }
    if (!resp.ok) {
      throw new ServiceUnreachableError(`service answered HTTP ${resp.status}`);
    }
    return (await resp.json()) as PredictionResult;
  }

  async health(): Promise<HealthStatus> {
    let resp: Response;
    try {
      resp = await fetch(`${this.baseUrl}/health`);
    } catch (err) {
      throw new ServiceUnreachableError(String(err));
    }
    return (await resp.json()) as HealthStatus;
  }

  async modelInfo(): Promise<Record<string, unknown>> {
    let resp: Response;
    try {
      resp = await fetch(`${this.baseUrl}/model/info`);
    } catch (err) {
      throw new ServiceUnreachableError(String(err));
    }
    if (!resp.ok) {
      throw new ServiceUnreachableError(`service answered HTTP ${resp.status}`);
    }
    return (await resp.json()) as Record<string, unknown>;
  }
}
