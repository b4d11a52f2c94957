/** Shapes of the hub's read-only JSON API documents. */

export type TargetName = 'DAX' | 'temperature' | 'wind';

export const TARGETS: TargetName[] = ['DAX', 'temperature', 'wind'];

export const QUANTILE_COLUMNS = ['q0.025', 'q0.25', 'q0.5', 'q0.75', 'q0.975'] as const;
export type QuantileColumn = (typeof QUANTILE_COLUMNS)[number];

export interface RoundInfo {
  round: string; // YYYY-MM-DD
  state: 'pending' | 'open' | 'closed' | 'scored';
  targets: TargetName[];
  accepted_aliases?: string[];
}

export interface CoverageSummary {
  n: number;
  rate_50: number;
  rate_95: number;
}

export interface LeaderboardEntry {
  alias: string;
  position: number;
  average_rank: number;
  best_rank: number;
  temperature_average_rank: number | null;
  tiebreak: 'none' | 'best_rank' | 'temperature_rank' | 'coin_flip';
  missed_rounds: number;
  exceeded_skip_allowance: boolean;
  skill_by_target: Partial<Record<TargetName, Record<string, number>>>;
  mean_skill_by_target: Partial<Record<TargetName, number>>;
  coverage: CoverageSummary | null;
}

export interface ReferenceEntry {
  alias: string;
  skill_by_target: Partial<Record<TargetName, Record<string, number>>>;
  mean_skill_by_target: Partial<Record<TargetName, number>>;
  coverage: CoverageSummary | null;
}

export interface LeaderboardDoc {
  seed: number;
  rounds_included: string[];
  entries: LeaderboardEntry[];
  references: ReferenceEntry[];
}

export interface ForecastRow {
  horizon: string;
  valid_time: string; // ISO-8601 Z
  quantiles: Record<QuantileColumn, number>;
}

export interface ObservationPoint {
  horizon: string;
  valid_time: string;
  value: number | null; // null marks a gap
}

export interface ForecastsDoc {
  target: TargetName;
  round: string;
  reserved_aliases: string[];
  forecasts: Record<string, ForecastRow[]>;
  observations: ObservationPoint[];
}

export interface ScoreRow {
  alias: string;
  target: TargetName;
  horizon: string;
  n_rounds: number;
  mean_score: number;
  skill: number;
  is_reference: boolean;
}

export interface ShareRow {
  target: TargetName;
  round: string;
  share: number | null;
  n_submitters: number;
}
