import type { CandidateRow, ComparisonPayload, ModelConfig } from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

async function detailOf(response: Response): Promise<string> {
  try {
    const body: unknown = await response.json();
    if (
      typeof body === "object" &&
      body !== null &&
      typeof (body as { detail?: unknown }).detail === "string"
    ) {
      return (body as { detail: string }).detail;
    }
  } catch {
    // non-JSON error body; fall through to the generic message
  }
  return `HTTP ${response.status}`;
}

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchFn: FetchLike = (input, init) =>
      globalThis.fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as T;
  }

  getConfig(): Promise<ModelConfig> {
    return this.getJson("/api/config");
  }

  getCandidates(): Promise<CandidateRow[]> {
    return this.getJson("/api/candidates");
  }

  getComparison(candidates?: string[]): Promise<ComparisonPayload> {
    const query =
      candidates && candidates.length
        ? `?candidates=${encodeURIComponent(candidates.join(","))}`
        : "";
    return this.getJson(`/api/comparison${query}`);
  }

  async putConfig(config: ModelConfig): Promise<void> {
    const response = await this.fetchFn(`${this.base}/api/config`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
  }
}
