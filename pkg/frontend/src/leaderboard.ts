/** Leaderboard table: ranked participants on top, reference forecasts
 * (benchmarks, post-processing, combinations) below in a distinct style
 * and without positions. Sorting is a pure client-side reorder.
 */

import { esc, fmtPercent, fmtRank, fmtSkill } from './format.js';
import type { SortKey } from './state.js';
import type { LeaderboardDoc, LeaderboardEntry, ReferenceEntry, TargetName } from './types.js';

const TIEBREAK_MARK: Record<LeaderboardEntry['tiebreak'], string> = {
  none: '',
  best_rank: '†',
  temperature_rank: '‡',
  coin_flip: '⚂',
};

const COLUMNS: { key: SortKey; label: string }[] = [
  { key: 'position', label: '#' },
  { key: 'average_rank', label: 'avg rank' },
  { key: 'skill_DAX', label: 'skill DAX' },
  { key: 'skill_temperature', label: 'skill temp' },
  { key: 'skill_wind', label: 'skill wind' },
  { key: 'coverage_50', label: 'cov 50%' },
  { key: 'coverage_95', label: 'cov 95%' },
];

function sortValue(entry: LeaderboardEntry, key: SortKey): number {
  switch (key) {
    case 'position':
      return entry.position;
    case 'average_rank':
      return entry.average_rank;
    case 'skill_DAX':
    case 'skill_temperature':
    case 'skill_wind': {
      const target = key.slice('skill_'.length) as TargetName;
      const skill = entry.mean_skill_by_target[target];
      return skill === undefined ? Number.NEGATIVE_INFINITY : skill;
    }
    case 'coverage_50':
      return entry.coverage ? entry.coverage.rate_50 : Number.NEGATIVE_INFINITY;
    case 'coverage_95':
      return entry.coverage ? entry.coverage.rate_95 : Number.NEGATIVE_INFINITY;
  }
}

/** Higher is better for skill and coverage; lower for ranks/positions. */
function descending(key: SortKey): boolean {
  return key.startsWith('skill_') || key.startsWith('coverage_');
}

function skillCell(
  row: LeaderboardEntry | ReferenceEntry,
  target: TargetName,
): string {
  const value = row.mean_skill_by_target[target];
  if (value === undefined) return '<td class="num empty">–</td>';
  const cls = value > 0 ? 'num pos' : value < 0 ? 'num neg' : 'num';
  return `<td class="${cls}" data-field="mean_skill_by_target.${target}">${fmtSkill(value)}</td>`;
}

function coverageCells(row: LeaderboardEntry | ReferenceEntry): string {
  if (!row.coverage) return '<td class="num empty">–</td><td class="num empty">–</td>';
  return (
    `<td class="num" data-field="coverage.rate_50">${fmtPercent(row.coverage.rate_50)}</td>` +
    `<td class="num" data-field="coverage.rate_95">${fmtPercent(row.coverage.rate_95)}</td>`
  );
}

export function renderLeaderboard(doc: LeaderboardDoc, sortKey: SortKey): string {
  const entries = [...doc.entries].sort((a, b) => {
    const va = sortValue(a, sortKey);
    const vb = sortValue(b, sortKey);
    if (va !== vb) return descending(sortKey) ? vb - va : va - vb;
    return a.position - b.position; // stable fallback: official order
  });

  const th = (c: { key: SortKey; label: string }) => {
    const active = c.key === sortKey ? ' class="sorted"' : '';
    return `<th${active}><button data-sort="${c.key}">${esc(c.label)}</button></th>`;
  };
  const headerCells =
    th(COLUMNS[0]) + '<th>alias</th>' + COLUMNS.slice(1).map(th).join('');

  const rows = entries
    .map((e) => {
      const mark = TIEBREAK_MARK[e.tiebreak];
      const tiebreak = mark
        ? ` <span class="tiebreak" title="tiebreak applied: ${esc(e.tiebreak)}">${mark}</span>`
        : '';
      const flag = e.exceeded_skip_allowance
        ? ` <span class="flag" title="missed ${e.missed_rounds} rounds">!</span>`
        : '';
      return (
        '<tr class="participant">' +
        `<td class="num" data-field="position">${e.position}</td>` +
        `<td class="alias">${esc(e.alias)}${tiebreak}${flag}</td>` +
        `<td class="num" data-field="average_rank">${fmtRank(e.average_rank)}</td>` +
        skillCell(e, 'DAX') +
        skillCell(e, 'temperature') +
        skillCell(e, 'wind') +
        coverageCells(e) +
        '</tr>'
      );
    })
    .join('\n');

  const refRows = doc.references
    .map(
      (r) =>
        '<tr class="reference">' +
        '<td class="num empty">–</td>' +
        `<td class="alias">${esc(r.alias)}</td>` +
        '<td class="num empty">–</td>' +
        skillCell(r, 'DAX') +
        skillCell(r, 'temperature') +
        skillCell(r, 'wind') +
        coverageCells(r) +
        '</tr>',
    )
    .join('\n');

  return (
    '<table class="leaderboard">\n' +
    `<thead><tr>${headerCells}</tr></thead>\n` +
    `<tbody>\n${rows}\n${refRows}\n</tbody>\n` +
    '</table>\n' +
    `<p class="footnote">${doc.entries.length} ranked participants, ` +
    `${doc.references.length} reference forecasts (unranked). ` +
    'Tiebreaks: † best rank, ‡ temperature rank, ⚂ seeded draw. ' +
    `Rounds included: ${doc.rounds_included.length}; seed ${doc.seed}.</p>`
  );
}
