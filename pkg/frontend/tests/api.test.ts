import { describe, expect, it } from 'vitest';

import { StudioClient, StaleResponse, EndpointError, canonicalJson, requestDigest } from '../src/api';
import type { PlanRequest, PlanResponse } from '../src/types';

function request(overrides: Partial<PlanRequest> = {}): PlanRequest {
  return {
    scenario: 'remind_water',
    variant: 'E',
    gamma: 1,
    seed: 0,
    mode: 'scripted',
    search: 'beam',
    overrides: [],
    ...overrides,
  };
}

function planResponse(tag: string): PlanResponse {
  return {
    request: request(),
    digest: tag,
    trajectory: {},
    metrics: {} as PlanResponse['metrics'],
    render: { times: [], links: [], facings: [], tools: [], annotations: [] },
  };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

function deferred<T>(): { promise: Promise<T>; resolve: (value: T) => void } {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

describe('canonicalJson', () => {
  it('sorts object keys recursively', () => {
    const text = canonicalJson({ b: 1, a: { d: [2, { z: 1, y: 2 }], c: 3 } });
    expect(text).toBe('{"a":{"c":3,"d":[2,{"y":2,"z":1}]},"b":1}');
  });

  it('keeps array order', () => {
    expect(canonicalJson([3, 1, 2])).toBe('[3,1,2]');
  });
});

describe('requestDigest', () => {
  it('is stable across key order and call count', async () => {
    const a = await requestDigest(request());
    const b = await requestDigest(request());
    expect(a).toBe(b);
    expect(a).toMatch(/^[0-9a-f]{64}$/);
  });

  it('differs when any field differs', async () => {
    const a = await requestDigest(request());
    const b = await requestDigest(request({ gamma: 0.5 }));
    expect(a).not.toBe(b);
  });
});

describe('StudioClient.plan', () => {
  it('caches by request digest and answers repeats without a new request', async () => {
    let calls = 0;
    const client = new StudioClient('http://host', async () => {
      calls += 1;
      return jsonResponse(planResponse('one'));
    });
    const first = await client.plan(request());
    const second = await client.plan(request());
    expect(first.fromCache).toBe(false);
    expect(second.fromCache).toBe(true);
    expect(second.response.digest).toBe(first.response.digest);
    expect(calls).toBe(1);
    expect(client.cacheSize).toBe(1);
  });

  it('discards a response that lands after a newer request was issued', async () => {
    const slots = [deferred<Response>(), deferred<Response>()];
    let call = 0;
    const client = new StudioClient('http://host', () => slots[call++]!.promise);

    const stale = client.plan(request({ gamma: 0 }));
    const fresh = client.plan(request({ gamma: 1 }));

    slots[1]!.resolve(jsonResponse(planResponse('fresh')));
    const kept = await fresh;
    expect(kept.response.digest).toBe('fresh');

    slots[0]!.resolve(jsonResponse(planResponse('stale')));
    await expect(stale).rejects.toBeInstanceOf(StaleResponse);
    expect(client.cacheSize).toBe(1);
  });

  it('surfaces endpoint error codes', async () => {
    const client = new StudioClient('http://host', async () =>
      jsonResponse({ error: { code: 'unknown_scenario', message: 'no such scenario' } }, 404),
    );
    const failure = client.plan(request({ scenario: 'nope' }));
    await expect(failure).rejects.toMatchObject({
      code: 'unknown_scenario',
      status: 404,
    });
    await expect(
      client.plan(request({ scenario: 'nope2' })),
    ).rejects.toBeInstanceOf(EndpointError);
  });
});
