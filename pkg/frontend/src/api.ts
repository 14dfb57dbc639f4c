/** Thin typed client over the moderation service HTTP API.
 *
 * The UI never computes a moderation decision itself: every state change in
 * the app goes through one of these calls and uses whatever the service
 * sends back.
 */

import type { Label, Metrics, QueueItem, QueuePage, Thresholds } from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Service-reported failure (HTTP 4xx/5xx with an {error, message} body). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }

  get isConflict(): boolean {
    return this.status === 409;
  }

  get isNotFound(): boolean {
    return this.status === 404;
  }
}

async function parseJson(resp: Response): Promise<any> {
  const text = await resp.text();
  try {
    return text ? JSON.parse(text) : {};
  } catch {
    throw new ApiError(resp.status, 'bad_response', `non-JSON response (${resp.status})`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'Content-Type': 'application/json' } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const payload = await parseJson(resp);
    if (!resp.ok) {
      throw new ApiError(resp.status, payload.error ?? 'error', payload.message ?? 'request failed');
    }
    return payload as T;
  }

  fetchQueue(limit: number, offset: number): Promise<QueuePage> {
    return this.request<QueuePage>('GET', `/api/queue?status=gray&limit=${limit}&offset=${offset}`);
  }

  getItem(id: string): Promise<QueueItem> {
    return this.request<QueueItem>('GET', `/api/items/${encodeURIComponent(id)}`);
  }

  submitDecision(id: string, label: Label, moderator: string): Promise<QueueItem> {
    return this.request<QueueItem>('POST', `/api/queue/${encodeURIComponent(id)}/decision`, {
      label,
      moderator,
    });
  }

  getThresholds(): Promise<Thresholds> {
    return this.request<Thresholds>('GET', '/api/thresholds');
  }

  setCoverage(coverage: number): Promise<Thresholds> {
    return this.request<Thresholds>('PUT', '/api/thresholds', { coverage });
  }

  getMetrics(): Promise<Metrics> {
    return this.request<Metrics>('GET', '/api/metrics');
  }
}
