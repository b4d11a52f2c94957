/** Typed fetchers for the hub's read-only JSON API.
 *
 * The base URL defaults to the page's own origin and can be overridden
 * with a `?api=http://host:port` query parameter.
 */

import type {
  ForecastsDoc,
  LeaderboardDoc,
  RoundInfo,
  ScoreRow,
  ShareRow,
  TargetName,
} from './types.js';

export class ApiClient {
  constructor(private readonly base: string = '') {}

  private async get<T>(path: string): Promise<T> {
    const resp = await fetch(this.base + path);
    if (!resp.ok) {
      let detail = `${resp.status}`;
      try {
        const body = (await resp.json()) as { error?: string };
        if (body.error) detail = body.error;
      } catch {
        // non-JSON error body: keep the status code
      }
      throw new Error(`${path}: ${detail}`);
    }
    return (await resp.json()) as T;
  }

  rounds(): Promise<RoundInfo[]> {
    return this.get('/api/rounds');
  }

  leaderboard(): Promise<LeaderboardDoc> {
    return this.get('/api/leaderboard');
  }

  forecasts(target: TargetName, round: string): Promise<ForecastsDoc> {
    return this.get(`/api/forecasts?target=${encodeURIComponent(target)}&round=${encodeURIComponent(round)}`);
  }

  scores(target: TargetName): Promise<ScoreRow[]> {
    return this.get(`/api/scores?target=${encodeURIComponent(target)}`);
  }

  shareBeatingBenchmark(): Promise<ShareRow[]> {
    return this.get('/api/analysis/share-beating-benchmark');
  }
}

export function apiBaseFromLocation(search: string): string {
  const base = new URLSearchParams(search).get('api');
  return base ? base.replace(/\/$/, '') : '';
}
