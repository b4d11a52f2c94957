import { describe, expect, it } from 'vitest';

import { renderLeaderboard } from '../src/leaderboard.js';
import { fmtPercent, fmtRank, fmtSkill } from '../src/format.js';
import type { LeaderboardDoc, TargetName } from '../src/types.js';
import { numericTokens, tableCellTexts } from './helpers.js';

import leaderboardFixture from './fixtures/leaderboard.json';

const doc = leaderboardFixture as unknown as LeaderboardDoc;

describe('leaderboard table', () => {
  it('renders a deterministic snapshot', () => {
    expect(renderLeaderboard(doc, 'position')).toMatchSnapshot();
  });

  it('shows 17 ranked rows and 5 visually distinct reference rows', () => {
    const html = renderLeaderboard(doc, 'position');
    expect(html.match(/<tr class="participant">/g)).toHaveLength(17);
    expect(html.match(/<tr class="reference">/g)).toHaveLength(5);
    // references carry no position
    const refBlock = html.slice(html.indexOf('<tr class="reference">'));
    expect(refBlock).not.toMatch(/data-field="position"/);
  });

  it('keeps official position order under the default sort', () => {
    const html = renderLeaderboard(doc, 'position');
    const positions = [...html.matchAll(/data-field="position">(\d+)</g)].map((m) => Number(m[1]));
    expect(positions).toEqual([...positions].sort((a, b) => a - b));
  });

  it('sorts by wind skill client-side without touching the data', () => {
    const html = renderLeaderboard(doc, 'skill_wind');
    const aliases = [...html.matchAll(/<tr class="participant">.*?<td class="alias">([a-z_]+)/gs)].map(
      (m) => m[1],
    );
    const expected = [...doc.entries]
      .sort((a, b) => (b.mean_skill_by_target.wind ?? -1e9) - (a.mean_skill_by_target.wind ?? -1e9))
      .map((e) => e.alias);
    expect(aliases).toEqual(expected);
    // positions still show the official standings, not the sorted order
    expect(html).toContain(`data-field="position">${expected.length ? doc.entries.find((e) => e.alias === expected[0])!.position : 0}<`);
  });

  it('marks applied tiebreaks and skip-allowance violations', () => {
    const html = renderLeaderboard(doc, 'position');
    const tied = doc.entries.filter((e) => e.tiebreak !== 'none');
    expect(tied.length).toBeGreaterThan(0);
    expect(html.match(/class="tiebreak"/g)).toHaveLength(tied.length);
    const flagged = doc.entries.filter((e) => e.exceeded_skip_allowance);
    expect(flagged.length).toBeGreaterThan(0);
    expect(html.match(/class="flag"/g)).toHaveLength(flagged.length);
  });

  it('displays only numbers that exist as API fields (after rounding)', () => {
    const html = renderLeaderboard(doc, 'position');
    const allowed = new Set<string>();
    for (const row of [...doc.entries, ...doc.references]) {
      for (const t of ['DAX', 'temperature', 'wind'] as TargetName[]) {
        const v = row.mean_skill_by_target[t];
        if (v !== undefined) allowed.add(fmtSkill(v));
      }
      if (row.coverage) {
        allowed.add(fmtPercent(row.coverage.rate_50));
        allowed.add(fmtPercent(row.coverage.rate_95));
      }
      if ('position' in row) {
        allowed.add(String(row.position));
        allowed.add(fmtRank(row.average_rank));
        allowed.add(String(row.missed_rounds));
      }
    }
    // footnote counts are document-level fields
    allowed.add(String(doc.entries.length));
    allowed.add(String(doc.references.length));
    allowed.add(String(doc.rounds_included.length));
    allowed.add(String(doc.seed));
    allowed.add('50%');
    allowed.add('95%'); // nominal interval levels in the column headers

    const body = renderLeaderboard(doc, 'position');
    const tokens = numericTokens(tableCellTexts(body).concat(
      [...body.matchAll(/<p class="footnote">(.*?)<\/p>/gs)].map((m) => m[1]),
    ));
    for (const token of tokens) {
      expect(allowed, `displayed number ${token} has no API source`).toContain(token);
    }
  });
});
