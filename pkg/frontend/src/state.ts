/** View state: what the user is currently looking at.
 *
 * Selections are always re-resolved against the data the hub actually
 * returned, so a vanished alias or round can never dangle.
 */

import type { RoundInfo, TargetName } from './types.js';

export type SortKey =
  | 'position'
  | 'average_rank'
  | 'skill_DAX'
  | 'skill_temperature'
  | 'skill_wind'
  | 'coverage_50'
  | 'coverage_95';

export interface ViewState {
  target: TargetName;
  aliases: string[]; // multi-select for the fan chart
  roundStart: string | '';
  roundEnd: string | '';
  sortKey: SortKey;
}

export function initialState(): ViewState {
  return { target: 'wind', aliases: [], roundStart: '', roundEnd: '', sortKey: 'position' };
}

/** Drop selections that no longer resolve against the fetched data. */
export function resolveSelections(
  state: ViewState,
  availableAliases: string[],
  rounds: RoundInfo[],
): ViewState {
  const roundNames = rounds.map((r) => r.round);
  const aliases = state.aliases.filter((a) => availableAliases.includes(a));
  const roundStart = roundNames.includes(state.roundStart) ? state.roundStart : '';
  const roundEnd = roundNames.includes(state.roundEnd) ? state.roundEnd : '';
  return { ...state, aliases, roundStart, roundEnd };
}

/** Scored rounds inside the selected range (whole season when unset). */
export function selectedRounds(state: ViewState, rounds: RoundInfo[]): string[] {
  return rounds
    .filter((r) => r.state === 'scored')
    .map((r) => r.round)
    .filter((name) => (state.roundStart === '' || name >= state.roundStart)
      && (state.roundEnd === '' || name <= state.roundEnd));
}
