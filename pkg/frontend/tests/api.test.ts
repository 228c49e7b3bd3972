import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiError, ConsoleApi } from '../src/api.js';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), { status });
}

function stubFetch(response: Response) {
  const mock = vi.fn(async () => response);
  vi.stubGlobal('fetch', mock);
  return mock;
}

function lastCall(mock: ReturnType<typeof vi.fn>): [string, RequestInit] {
  const call = mock.mock.calls[mock.mock.calls.length - 1];
  return [call![0] as string, call![1] as RequestInit];
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('ConsoleApi', () => {
  it('posts the query as a json body', async () => {
    const mock = stubFetch(jsonResponse({ answer: 'hi' }));
    const api = new ConsoleApi();

    const payload = await api.query('csv upload error');

    const [url, init] = lastCall(mock);
    expect(url).toBe('/v1/query');
    expect(init.method).toBe('POST');
    expect(JSON.parse(init.body as string)).toEqual({ query: 'csv upload error' });
    expect((init.headers as Headers).get('content-type')).toBe('application/json');
    expect(payload).toEqual({ answer: 'hi' });
  });

  it('prefixes the base url and strips its trailing slash', async () => {
    const mock = stubFetch(jsonResponse({ status: 'ok' }));
    const api = new ConsoleApi({ baseUrl: 'http://1.2.3.4:8077/' });

    await api.health();

    const [url] = lastCall(mock);
    expect(url).toBe('http://1.2.3.4:8077/v1/healthz');
  });

  it('sends a bearer token only when one is configured', async () => {
    const mock = stubFetch(jsonResponse({ status: 'ok' }));

    await new ConsoleApi({ token: 'sekrit' }).health();
    let [, init] = lastCall(mock);
    expect((init.headers as Headers).get('authorization')).toBe('Bearer sekrit');

    vi.unstubAllGlobals();
    const bare = stubFetch(jsonResponse({ status: 'ok' }));
    await new ConsoleApi().health();
    [, init] = lastCall(bare);
    expect((init.headers as Headers).get('authorization')).toBeNull();
  });

  it('url encodes ticket ids in tree and neighbor paths', async () => {
    const mock = stubFetch(jsonResponse({ nodes: [] }));
    const api = new ConsoleApi();

    await api.tree('ENT 22/970');
    expect(lastCall(mock)[0]).toBe('/v1/tickets/ENT%2022%2F970/tree');

    await api.neighbors('ENT 22/970');
    expect(lastCall(mock)[0]).toBe('/v1/graph/neighbors/ENT%2022%2F970');
  });

  it('raises ApiError with the service detail message', async () => {
    stubFetch(jsonResponse({ detail: 'invalid or missing token' }, 401));
    const api = new ConsoleApi();

    const err = await api.health().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(401);
    expect((err as ApiError).message).toBe('invalid or missing token');
  });

  it('falls back to a status line when the error body is not json', async () => {
    stubFetch(new Response('boom', { status: 503 }));
    const api = new ConsoleApi();

    const err = await api.health().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).message).toBe('request failed with HTTP 503');
  });
});
