// Thin typed client for the service endpoints. All generation logic lives
// server-side; this file only moves payloads.

import type {
  BlueprintPayload,
  FilterPayload,
  GenerationParamsPayload,
  GenerationPayload,
  ModelId,
  ModelsPayload,
  RetrievePayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly errorCode: string,
    message: string,
    public readonly rawOutput?: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async request<T>(path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method: body === undefined ? "GET" : "POST",
        headers: { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (error) {
      throw new ApiError(0, "Unreachable", `service unreachable: ${String(error)}`);
    }
    if (!response.ok) {
      let code = `HTTP ${response.status}`;
      let message = response.statusText;
      let raw: string | undefined;
      try {
        const payload = (await response.json()) as {
          error_code?: string;
          message?: string;
          raw_output?: string;
        };
        code = payload.error_code ?? code;
        message = payload.message ?? message;
        raw = payload.raw_output;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, message, raw);
    }
    return (await response.json()) as T;
  }

  getModels(): Promise<ModelsPayload> {
    return this.request<ModelsPayload>("/api/models");
  }

  retrieve(query: string, maxDocs?: number): Promise<RetrievePayload> {
    return this.request<RetrievePayload>("/api/retrieve", {
      query,
      ...(maxDocs === undefined ? {} : { max_docs: maxDocs }),
    });
  }

  summarize(
    sessionId: string,
    model: ModelId,
    params?: GenerationParamsPayload,
  ): Promise<GenerationPayload> {
    return this.request<GenerationPayload>("/api/summarize", {
      session_id: sessionId,
      model,
      ...(params === undefined ? {} : { params }),
    });
  }

  regenerate(sessionId: string, model: ModelId, blueprint: BlueprintPayload): Promise<GenerationPayload> {
    return this.request<GenerationPayload>("/api/regenerate", {
      session_id: sessionId,
      model,
      blueprint,
    });
  }

  filterPlan(sessionId: string): Promise<FilterPayload> {
    return this.request<FilterPayload>("/api/filter", { session_id: sessionId });
  }
}
