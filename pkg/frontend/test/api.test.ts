import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, apiBaseFromLocation } from '../src/api.js';

function stubFetch(status: number, body: unknown): void {
  vi.stubGlobal(
    'fetch',
    vi.fn(async () => ({
      ok: status >= 200 && status < 300,
      status,
      json: async () => body,
    })),
  );
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('api client', () => {
  it('returns parsed documents on success', async () => {
    stubFetch(200, [{ round: '2021-11-03', state: 'scored', targets: ['DAX'] }]);
    const rounds = await new ApiClient('http://hub').rounds();
    expect(rounds[0].round).toBe('2021-11-03');
    expect(fetch).toHaveBeenCalledWith('http://hub/api/rounds');
  });

  it('throws with the server-reported error message', async () => {
    stubFetch(404, { error: 'no leaderboard yet (no round has been scored)' });
    await expect(new ApiClient().leaderboard()).rejects.toThrow(/no leaderboard yet/);
  });

  it('falls back to the status code for non-JSON errors', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn(async () => ({
        ok: false,
        status: 502,
        json: async () => {
          throw new Error('not json');
        },
      })),
    );
    await expect(new ApiClient().rounds()).rejects.toThrow(/502/);
  });

  it('encodes query parameters', async () => {
    stubFetch(200, { target: 'wind', round: '2021-11-03', reserved_aliases: [], forecasts: {}, observations: [] });
    await new ApiClient().forecasts('wind', '2021-11-03');
    expect(fetch).toHaveBeenCalledWith('/api/forecasts?target=wind&round=2021-11-03');
  });
});

describe('api base resolution', () => {
  it('defaults to same-origin', () => {
    expect(apiBaseFromLocation('')).toBe('');
    expect(apiBaseFromLocation('?theme=dark')).toBe('');
  });

  it('honours the api override and strips a trailing slash', () => {
    expect(apiBaseFromLocation('?api=http://localhost:8732/')).toBe('http://localhost:8732');
  });
});
