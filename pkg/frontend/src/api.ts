import type {
  HealthResponse,
  NeighborsResponse,
  QueryResponse,
  TreeResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

export interface ApiOptions {
  baseUrl?: string;
  token?: string;
}

export class ConsoleApi {
  constructor(private readonly options: ApiOptions = {}) {}

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const headers = new Headers(init.headers);
    if (this.options.token) {
      headers.set('authorization', `Bearer ${this.options.token}`);
    }
    if (init.body !== undefined) {
      headers.set('content-type', 'application/json');
    }
    const base = (this.options.baseUrl ?? '').replace(/\/$/, '');
    const response = await fetch(base + path, { ...init, headers });
    // error bodies are {"detail": ...}; anything else becomes a status line
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const detail =
        body && typeof body.detail === 'string'
          ? body.detail
          : `request failed with HTTP ${response.status}`;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  health(): Promise<HealthResponse> {
    return this.request('/v1/healthz');
  }

  query(text: string): Promise<QueryResponse> {
    return this.request('/v1/query', {
      method: 'POST',
      body: JSON.stringify({ query: text }),
    });
  }

  tree(ticketId: string): Promise<TreeResponse> {
    return this.request(`/v1/tickets/${encodeURIComponent(ticketId)}/tree`);
  }

  neighbors(ticketId: string): Promise<NeighborsResponse> {
    return this.request(`/v1/graph/neighbors/${encodeURIComponent(ticketId)}`);
  }
}
