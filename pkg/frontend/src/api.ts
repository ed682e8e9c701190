/** API client with latest-wins cancellation: a newer request of the same
 * kind aborts the one still in flight, so stale responses never paint. */

import type {
  FramesDocument, LayerCatalog, FeatureCollection, MapDocument, UploadResponse,
  VariantsDocument,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(kind: string, path: string): Promise<T> {
    this.inflight.get(kind)?.abort();
    const controller = new AbortController();
    this.inflight.set(kind, controller);
    try {
      const response = await this.fetchFn(`${this.baseUrl}${path}`, {
        signal: controller.signal,
      });
      if (!response.ok) {
        let detail = `${response.status}`;
        try {
          const body = await response.json();
          if (body && typeof body.error === "string") detail = body.error;
        } catch {
          /* non-JSON error body */
        }
        throw new ApiError(response.status, detail);
      }
      return (await response.json()) as T;
    } finally {
      if (this.inflight.get(kind) === controller) this.inflight.delete(kind);
    }
  }

  uploadLog(body: FormData): Promise<UploadResponse> {
    return this.fetchFn(`${this.baseUrl}/logs`, { method: "POST", body }).then(
      async (response) => {
        if (!response.ok) throw new ApiError(response.status, await response.text());
        return (await response.json()) as UploadResponse;
      },
    );
  }

  fetchMap(logId: string, params: URLSearchParams): Promise<MapDocument> {
    return this.getJson("map", `/logs/${logId}/map?${params.toString()}`);
  }

  fetchVariants(logId: string, params: URLSearchParams): Promise<VariantsDocument> {
    return this.getJson("variants", `/logs/${logId}/variants?${params.toString()}`);
  }

  fetchFrames(logId: string, params: URLSearchParams): Promise<FramesDocument> {
    return this.getJson("frames", `/logs/${logId}/frames?${params.toString()}`);
  }

  fetchLayerCatalog(): Promise<LayerCatalog> {
    return this.getJson("catalog", "/layers");
  }

  fetchLayer(name: string): Promise<FeatureCollection> {
    return this.getJson(`layer:${name}`, `/layers/${encodeURIComponent(name)}`);
  }
}
