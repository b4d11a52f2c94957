/** Skill panel: per horizon, one dot per alias at its skill score.
 *
 * The zero line is benchmark parity (the benchmark's own dots sit
 * exactly there). Reference forecasts (combinations, post-processing)
 * are drawn as highlighted diamonds. A second view charts the weekly
 * share of participants beating the benchmark.
 */

import { esc, fmtShare, fmtSkill } from './format.js';
import { aliasColor } from './fanchart.js';
import type { ScoreRow, ShareRow, TargetName } from './types.js';

const WIDTH = 880;
const HEIGHT = 330;
const MARGIN = { left: 64, right: 16, top: 16, bottom: 36 };

function yScale(min: number, max: number): (v: number) => number {
  const span = max - min || 1;
  return (v) => HEIGHT - MARGIN.bottom - ((v - min) / span) * (HEIGHT - MARGIN.top - MARGIN.bottom);
}

export function renderSkillPanel(rows: ScoreRow[], target: TargetName): string {
  const targetRows = rows.filter((r) => r.target === target);
  if (targetRows.length === 0) {
    return `<p class="empty-state">No scores for ${esc(target)} yet.</p>`;
  }
  const horizons = [...new Set(targetRows.map((r) => r.horizon))];
  const skills = targetRows.map((r) => r.skill);
  const yMin = Math.min(...skills, 0);
  const yMax = Math.max(...skills, 0);
  const y = yScale(yMin, yMax);
  const band = (WIDTH - MARGIN.left - MARGIN.right) / horizons.length;
  const xCenter = (h: string) => MARGIN.left + band * (horizons.indexOf(h) + 0.5);

  const participants = [...new Set(targetRows.filter((r) => !r.is_reference).map((r) => r.alias))];

  const dots = targetRows
    .map((r) => {
      const cx = xCenter(r.horizon);
      const cy = y(r.skill);
      const title = `<title>${esc(r.alias)} ${r.horizon}: skill ${fmtSkill(r.skill)} over ${r.n_rounds} rounds</title>`;
      if (r.is_reference) {
        const half = 5;
        return (
          `<path class="ref-dot" data-alias="${esc(r.alias)}" data-skill="${fmtSkill(r.skill)}" ` +
          `d="M${cx},${(cy - half).toFixed(1)} L${cx + half},${cy.toFixed(1)} L${cx},${(cy + half).toFixed(1)} L${cx - half},${cy.toFixed(1)}Z" ` +
          `fill="#b8860b" stroke="#6b4e00">${title}</path>`
        );
      }
      const color = aliasColor(participants.indexOf(r.alias));
      return (
        `<circle class="dot" data-alias="${esc(r.alias)}" data-skill="${fmtSkill(r.skill)}" ` +
        `cx="${cx.toFixed(1)}" cy="${cy.toFixed(1)}" r="4" fill="${color}" fill-opacity="0.8">${title}</circle>`
      );
    })
    .join('\n');

  const zero = y(0);
  const axis =
    `<line x1="${MARGIN.left}" y1="${zero.toFixed(1)}" x2="${WIDTH - MARGIN.right}" y2="${zero.toFixed(1)}" stroke="#444" stroke-dasharray="4 3"/>` +
    `<text class="tick" x="${MARGIN.left - 8}" y="${zero.toFixed(1)}" text-anchor="end" dominant-baseline="middle">0 (benchmark)</text>` +
    `<text class="tick" x="${MARGIN.left - 8}" y="${y(yMax).toFixed(1)}" text-anchor="end" dominant-baseline="middle">${fmtSkill(yMax)}</text>` +
    `<text class="tick" x="${MARGIN.left - 8}" y="${y(yMin).toFixed(1)}" text-anchor="end" dominant-baseline="middle">${fmtSkill(yMin)}</text>` +
    horizons
      .map(
        (h) =>
          `<text class="tick" x="${xCenter(h).toFixed(1)}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle">${esc(h)}</text>`,
      )
      .join('');

  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" class="skillpanel">` +
    axis +
    dots +
    '</svg>' +
    '<p class="footnote">Dots above the dashed line beat the benchmark; diamonds are ' +
    'reference forecasts (combinations and post-processing).</p>'
  );
}

export function renderShareChart(rows: ShareRow[], target: TargetName): string {
  const targetRows = rows.filter((r) => r.target === target);
  if (targetRows.length === 0) {
    return `<p class="empty-state">No weekly comparison data for ${esc(target)} yet.</p>`;
  }
  const shares = targetRows.filter((r) => r.share !== null).map((r) => r.share as number);
  if (shares.length === 0) {
    return '<p class="empty-state">No week had comparable submissions.</p>';
  }
  const yMin = Math.min(...shares, 0);
  const yMax = Math.max(...shares);
  const y = yScale(yMin, yMax);
  const band = (WIDTH - MARGIN.left - MARGIN.right) / targetRows.length;
  const xAt = (i: number) => MARGIN.left + band * (i + 0.5);

  let d = '';
  let pen = 'M';
  const points: string[] = [];
  targetRows.forEach((r, i) => {
    if (r.share === null) {
      pen = 'M'; // gap for weeks without a comparable share
      return;
    }
    d += `${pen}${xAt(i).toFixed(1)},${y(r.share).toFixed(1)}`;
    pen = 'L';
    points.push(
      `<circle class="dot" data-round="${r.round}" data-share="${fmtShare(r.share)}" ` +
        `cx="${xAt(i).toFixed(1)}" cy="${y(r.share).toFixed(1)}" r="3.5" fill="#1f77b4">` +
        `<title>${r.round}: ${fmtShare(r.share)} of ${r.n_submitters} submitters beat the benchmark</title></circle>`,
    );
  });

  const labelled = targetRows.filter((_, i) => i % 2 === 0);
  const axis =
    `<text class="tick" x="${MARGIN.left - 8}" y="${y(yMax).toFixed(1)}" text-anchor="end" dominant-baseline="middle">${fmtShare(yMax)}</text>` +
    `<text class="tick" x="${MARGIN.left - 8}" y="${y(yMin).toFixed(1)}" text-anchor="end" dominant-baseline="middle">${fmtShare(yMin)}</text>` +
    labelled
      .map((r) => {
        const i = targetRows.indexOf(r);
        return `<text class="tick" x="${xAt(i).toFixed(1)}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle">${r.round.slice(5)}</text>`;
      })
      .join('');

  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" class="sharechart">` +
    axis +
    `<path fill="none" stroke="#1f77b4" stroke-width="1.8" d="${d}"/>` +
    points.join('\n') +
    '</svg>' +
    '<p class="footnote">Share of that week\'s submitters whose five-horizon mean score beat the benchmark.</p>'
  );
}
