import type {
  CallResponse,
  DependencyEdge,
  KnowledgeDoc,
  PredictResponse,
  SrResponse,
} from "./types";

export class HttpError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private fetchFn: FetchLike;

  constructor(private baseUrl: string, fetchFn?: FetchLike) {
    // bind so a bare global fetch keeps its expected receiver
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path);
    if (!res.ok) throw new HttpError(res.status, await res.text());
    return (await res.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw new HttpError(res.status, await res.text());
    return (await res.json()) as T;
  }

  async listApis(): Promise<string[]> {
    const body = await this.get<{ apis: string[] }>("/v1/apis");
    return body.apis;
  }

  /** Knowledge document, or null when the API has none mined yet. */
  async knowledge(api: string): Promise<KnowledgeDoc | null> {
    try {
      return await this.get<KnowledgeDoc>(
        `/v1/apis/${encodeURIComponent(api)}/knowledge`,
      );
    } catch (err) {
      if (err instanceof HttpError && err.status === 404) return null;
      throw err;
    }
  }

  async producers(api: string, param: string, k = 5): Promise<DependencyEdge[]> {
    const body = await this.get<{ producers: DependencyEdge[] }>(
      `/v1/apis/${encodeURIComponent(api)}/params/${encodeURIComponent(param)}/producers?k=${k}`,
    );
    return body.producers;
  }

  predict(api: string, params: Record<string, string>): Promise<PredictResponse> {
    return this.post<PredictResponse>("/v1/predict", { api, params });
  }

  call(
    api: string,
    params: Record<string, string>,
    session?: string,
  ): Promise<CallResponse> {
    const body: Record<string, unknown> = { api, params };
    if (session !== undefined) body.session = session;
    return this.post<CallResponse>("/v1/call", body);
  }

  sr(): Promise<SrResponse> {
    return this.get<SrResponse>("/v1/metrics/sr");
  }
}
