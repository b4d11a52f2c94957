/** Fan chart: observed series vs everyone's interval forecasts.
 *
 * For each selected alias and round, the five quantiles over the round's
 * valid times become a nested pair of shaded bands (95% outer, 50%
 * inner) plus a median line. The observed series is drawn on top, with
 * real gaps where an observation is missing. Pure string rendering:
 * the same documents always produce the same SVG.
 */

import { esc, fmtValue } from './format.js';
import type { ForecastRow, ForecastsDoc } from './types.js';

const WIDTH = 880;
const HEIGHT = 360;
const MARGIN = { left: 56, right: 16, top: 16, bottom: 40 };

export const ALIAS_PALETTE = [
  '#1f77b4',
  '#d62728',
  '#2ca02c',
  '#9467bd',
  '#ff7f0e',
  '#8c564b',
  '#17becf',
  '#e377c2',
];

export function aliasColor(index: number): string {
  return ALIAS_PALETTE[index % ALIAS_PALETTE.length];
}

interface Scale {
  (value: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

function epoch(iso: string): number {
  return Date.parse(iso);
}

function pathFrom(points: [number, number][]): string {
  return points.map(([x, y], i) => `${i === 0 ? 'M' : 'L'}${x.toFixed(1)},${y.toFixed(1)}`).join('');
}

function bandPath(
  rows: ForecastRow[],
  lower: 'q0.025' | 'q0.25',
  upper: 'q0.975' | 'q0.75',
  x: Scale,
  y: Scale,
): string {
  const fwd = rows.map((r) => [x(epoch(r.valid_time)), y(r.quantiles[upper])] as [number, number]);
  const back = [...rows]
    .reverse()
    .map((r) => [x(epoch(r.valid_time)), y(r.quantiles[lower])] as [number, number]);
  return pathFrom(fwd) + pathFrom(back).replace(/^M/, 'L') + 'Z';
}

export function renderFanChart(docs: ForecastsDoc[], aliases: string[]): string {
  if (docs.length === 0) {
    return '<p class="empty-state">No scored rounds in the selected range.</p>';
  }

  // collect plotted values for the scales and the two traceable axis ticks
  const values: number[] = [];
  const times: number[] = [];
  for (const doc of docs) {
    for (const obs of doc.observations) {
      times.push(epoch(obs.valid_time));
      if (obs.value !== null) values.push(obs.value);
    }
    for (const alias of aliases) {
      for (const row of doc.forecasts[alias] ?? []) {
        times.push(epoch(row.valid_time));
        values.push(row.quantiles['q0.025'], row.quantiles['q0.975']);
      }
    }
  }
  if (values.length === 0) {
    return '<p class="empty-state">Nothing to draw: no forecasts or observations for this selection.</p>';
  }

  const yMin = Math.min(...values);
  const yMax = Math.max(...values);
  const x = linearScale(Math.min(...times), Math.max(...times), MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(yMin, yMax, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];

  // forecast bands, one group per (alias, round)
  const missingNotes: string[] = [];
  aliases.forEach((alias, i) => {
    const color = aliasColor(i);
    for (const doc of docs) {
      const rows = doc.forecasts[alias];
      if (!rows || rows.length === 0) {
        missingNotes.push(`${alias}: no accepted submission for ${doc.round}`);
        continue;
      }
      const ordered = [...rows].sort((a, b) => epoch(a.valid_time) - epoch(b.valid_time));
      parts.push(
        `<g class="alias-band" data-alias="${esc(alias)}" data-round="${doc.round}">` +
          `<path class="band95" fill="${color}" fill-opacity="0.15" stroke="none" d="${bandPath(ordered, 'q0.025', 'q0.975', x, y)}"/>` +
          `<path class="band50" fill="${color}" fill-opacity="0.3" stroke="none" d="${bandPath(ordered, 'q0.25', 'q0.75', x, y)}"/>` +
          `<path class="median" fill="none" stroke="${color}" stroke-width="1.5" d="${pathFrom(
            ordered.map((r) => [x(epoch(r.valid_time)), y(r.quantiles['q0.5'])]),
          )}"/>` +
          ordered
            .map(
              (r) =>
                `<circle cx="${x(epoch(r.valid_time)).toFixed(1)}" cy="${y(r.quantiles['q0.5']).toFixed(1)}" r="2.5" fill="${color}" data-median="${fmtValue(r.quantiles['q0.5'])}">` +
                `<title>${esc(alias)} ${r.horizon} @ ${r.valid_time}: median ${fmtValue(r.quantiles['q0.5'])}</title></circle>`,
            )
            .join('') +
          '</g>',
      );
    }
  });

  // observed series: merged over rounds, gaps where value is null
  const observed = new Map<string, number | null>();
  for (const doc of docs) {
    for (const obs of doc.observations) {
      if (!observed.has(obs.valid_time) || observed.get(obs.valid_time) === null) {
        observed.set(obs.valid_time, obs.value);
      }
    }
  }
  const obsSorted = [...observed.entries()].sort((a, b) => epoch(a[0]) - epoch(b[0]));
  let segment: [number, number][] = [];
  const segments: [number, number][][] = [];
  for (const [ts, value] of obsSorted) {
    if (value === null) {
      if (segment.length) segments.push(segment);
      segment = [];
    } else {
      segment.push([x(epoch(ts)), y(value)]);
    }
  }
  if (segment.length) segments.push(segment);
  parts.push(
    '<g class="observed">' +
      segments.map((s) => `<path fill="none" stroke="#111" stroke-width="1.8" d="${pathFrom(s)}"/>`).join('') +
      obsSorted
        .filter(([, v]) => v !== null)
        .map(
          ([ts, v]) =>
            `<circle cx="${x(epoch(ts)).toFixed(1)}" cy="${y(v as number).toFixed(1)}" r="2" fill="#111" data-observed="${fmtValue(v as number)}">` +
            `<title>observed @ ${ts}: ${fmtValue(v as number)}</title></circle>`,
        )
        .join('') +
      '</g>',
  );

  // axes: y ticks sit exactly at plotted API values (min and max)
  const axis =
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${HEIGHT - MARGIN.bottom}" stroke="#999"/>` +
    `<line x1="${MARGIN.left}" y1="${HEIGHT - MARGIN.bottom}" x2="${WIDTH - MARGIN.right}" y2="${HEIGHT - MARGIN.bottom}" stroke="#999"/>` +
    `<text class="tick" x="${MARGIN.left - 6}" y="${y(yMax).toFixed(1)}" text-anchor="end" dominant-baseline="middle">${fmtValue(yMax)}</text>` +
    `<text class="tick" x="${MARGIN.left - 6}" y="${y(yMin).toFixed(1)}" text-anchor="end" dominant-baseline="middle">${fmtValue(yMin)}</text>` +
    docs
      .map((doc) => {
        const first = doc.observations[0];
        if (!first) return '';
        const tx = x(epoch(first.valid_time));
        return `<text class="tick" x="${tx.toFixed(1)}" y="${HEIGHT - MARGIN.bottom + 16}" text-anchor="middle">${doc.round}</text>`;
      })
      .join('');

  const legend =
    '<div class="legend">' +
    aliases
      .map(
        (alias, i) =>
          `<span class="legend-item"><span class="swatch" style="background:${aliasColor(i)}"></span>${esc(alias)}</span>`,
      )
      .join('') +
    '<span class="legend-item"><span class="swatch" style="background:#111"></span>observed</span>' +
    '</div>' +
    (missingNotes.length
      ? `<p class="legend-note">${missingNotes.map(esc).join('; ')}</p>`
      : '');

  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" class="fanchart">` +
    axis +
    parts.join('\n') +
    '</svg>' +
    legend
  );
}
