// HTTP client for the serve endpoint. Plan responses are cached keyed by
// the request digest, so re-submitting an identical request is a cache hit
// that never touches the network. Only the most recently issued request is
// live: when a response lands for a superseded digest it is discarded.

import type { Catalog, PlanRequest, PlanResponse, ScenarioDescriptor } from './types';

export class EndpointError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = 'EndpointError';
    this.status = status;
    this.code = code;
  }
}

export class StaleResponse extends Error {
  constructor(digest: string) {
    super(`response for superseded request ${digest.slice(0, 12)} discarded`);
    this.name = 'StaleResponse';
  }
}

/** JSON with object keys sorted recursively, mirroring the planner's canonical form. */
export function canonicalJson(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(',')}]`;
  }
  if (value !== null && typeof value === 'object') {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`);
    return `{${entries.join(',')}}`;
  }
  return JSON.stringify(value);
}

export async function requestDigest(request: PlanRequest): Promise<string> {
  const bytes = new TextEncoder().encode(canonicalJson(request));
  const hash = await crypto.subtle.digest('SHA-256', bytes);
  return Array.from(new Uint8Array(hash), (b) => b.toString(16).padStart(2, '0')).join('');
}

export interface PlanResult {
  response: PlanResponse;
  requestDigest: string;
  fromCache: boolean;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StudioClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;
  private readonly cache = new Map<string, PlanResponse>();
  private latestDigest: string | null = null;

  constructor(base = '', fetchImpl?: FetchLike) {
    this.base = base.replace(/\/$/, '');
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  get cacheSize(): number {
    return this.cache.size;
  }

  async scenarios(): Promise<ScenarioDescriptor[]> {
    const doc = (await this.get('/scenarios')) as { scenarios: ScenarioDescriptor[] };
    return doc.scenarios;
  }

  async catalog(): Promise<Catalog> {
    return (await this.get('/catalog')) as Catalog;
  }

  async health(): Promise<boolean> {
    try {
      const doc = (await this.get('/health')) as { ok?: boolean };
      return doc.ok === true;
    } catch {
      return false;
    }
  }

  /**
   * Request a plan. Resolves from the digest-keyed cache when the exact
   * request was answered before; throws StaleResponse when a newer request
   * was issued while this one was in flight.
   */
  async plan(request: PlanRequest): Promise<PlanResult> {
    const digest = await requestDigest(request);
    this.latestDigest = digest;
    const cached = this.cache.get(digest);
    if (cached !== undefined) {
      return { response: cached, requestDigest: digest, fromCache: true };
    }
    const response = (await this.post('/plan', request)) as PlanResponse;
    if (this.latestDigest !== digest) {
      throw new StaleResponse(digest);
    }
    this.cache.set(digest, response);
    return { response, requestDigest: digest, fromCache: false };
  }

  private async get(path: string): Promise<unknown> {
    const resp = await this.fetchImpl(`${this.base}${path}`);
    return this.decode(resp);
  }

  private async post(path: string, body: unknown): Promise<unknown> {
    const resp = await this.fetchImpl(`${this.base}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    return this.decode(resp);
  }

  private async decode(resp: Response): Promise<unknown> {
    if (resp.ok) {
      return resp.json();
    }
    let code = `http_${resp.status}`;
    let message = resp.statusText;
    try {
      const doc = (await resp.json()) as { error?: { code?: string; message?: string } };
      if (doc.error) {
        code = doc.error.code ?? code;
        message = doc.error.message ?? message;
      }
    } catch {
      // non-JSON error body, keep the HTTP defaults
    }
    throw new EndpointError(resp.status, code, message);
  }
}
