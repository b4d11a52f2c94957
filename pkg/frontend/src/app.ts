/** Browser bootstrap: wires the pure renderers to the live API.
 *
 * All data handling stays in the renderers and state helpers; this file
 * only fetches, caches the latest documents, and re-renders on events.
 * Fetch races resolve last-write-wins via a sequence counter, and fetch
 * failures surface as a banner while the previous content stays up.
 */

import { ApiClient, apiBaseFromLocation } from './api.js';
import { renderFanChart } from './fanchart.js';
import { renderLeaderboard } from './leaderboard.js';
import { initialState, resolveSelections, selectedRounds, type SortKey, type ViewState } from './state.js';
import { renderShareChart, renderSkillPanel } from './skillpanel.js';
import { TARGETS, type ForecastsDoc, type LeaderboardDoc, type RoundInfo, type TargetName } from './types.js';
import { esc } from './format.js';

const api = new ApiClient(apiBaseFromLocation(window.location.search));

let state: ViewState = initialState();
let rounds: RoundInfo[] = [];
let leaderboard: LeaderboardDoc | null = null;
let fetchSeq = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function banner(message: string | null): void {
  const box = el<HTMLDivElement>('banner');
  if (message === null) {
    box.hidden = true;
  } else {
    box.hidden = false;
    box.textContent = `${message} — showing the last good data.`;
  }
}

function knownAliases(): string[] {
  const names = new Set<string>();
  for (const r of rounds) for (const a of r.accepted_aliases ?? []) names.add(a);
  for (const ref of leaderboard?.references ?? []) names.add(ref.alias);
  return [...names].sort();
}

function renderControls(): void {
  el<HTMLSelectElement>('target').innerHTML = TARGETS.map(
    (t) => `<option value="${t}"${t === state.target ? ' selected' : ''}>${t}</option>`,
  ).join('');

  const aliasBox = el<HTMLDivElement>('aliases');
  aliasBox.innerHTML = knownAliases()
    .map(
      (a) =>
        `<label><input type="checkbox" value="${esc(a)}"${state.aliases.includes(a) ? ' checked' : ''}> ${esc(a)}</label>`,
    )
    .join('');

  const names = rounds.filter((r) => r.state === 'scored').map((r) => r.round);
  const options = (selected: string) =>
    ['<option value="">(all)</option>']
      .concat(names.map((n) => `<option value="${n}"${n === selected ? ' selected' : ''}>${n}</option>`))
      .join('');
  el<HTMLSelectElement>('round-start').innerHTML = options(state.roundStart);
  el<HTMLSelectElement>('round-end').innerHTML = options(state.roundEnd);
}

function renderLeaderboardView(): void {
  if (leaderboard) {
    el<HTMLDivElement>('leaderboard-view').innerHTML = renderLeaderboard(leaderboard, state.sortKey);
  }
}

async function refreshForecasts(): Promise<void> {
  const seq = ++fetchSeq;
  const wanted = selectedRounds(state, rounds);
  const aliases = state.aliases.length ? state.aliases : knownAliases();
  try {
    const docs: ForecastsDoc[] = [];
    for (const round of wanted) {
      const info = rounds.find((r) => r.round === round);
      if (info && !info.targets.includes(state.target)) continue;
      docs.push(await api.forecasts(state.target, round));
    }
    if (seq !== fetchSeq) return; // a newer request already landed
    banner(null);
    el<HTMLDivElement>('fanchart-view').innerHTML = renderFanChart(docs, aliases);
  } catch (err) {
    if (seq === fetchSeq) banner(`loading forecasts failed: ${(err as Error).message}`);
  }
}

async function refreshSkill(): Promise<void> {
  const seq = ++fetchSeq;
  try {
    const [scores, shares] = await Promise.all([api.scores(state.target), api.shareBeatingBenchmark()]);
    if (seq !== fetchSeq) return;
    banner(null);
    el<HTMLDivElement>('skill-view').innerHTML = renderSkillPanel(scores, state.target);
    el<HTMLDivElement>('share-view').innerHTML = renderShareChart(shares, state.target);
  } catch (err) {
    if (seq === fetchSeq) banner(`loading scores failed: ${(err as Error).message}`);
  }
}

function wireEvents(): void {
  el<HTMLDivElement>('leaderboard-view').addEventListener('click', (ev) => {
    const button = (ev.target as HTMLElement).closest('button[data-sort]');
    if (button) {
      state = { ...state, sortKey: button.getAttribute('data-sort') as SortKey };
      renderLeaderboardView();
    }
  });

  el<HTMLSelectElement>('target').addEventListener('change', (ev) => {
    state = { ...state, target: (ev.target as HTMLSelectElement).value as TargetName };
    void refreshForecasts();
    void refreshSkill();
  });

  el<HTMLDivElement>('aliases').addEventListener('change', () => {
    const checked = [...el<HTMLDivElement>('aliases').querySelectorAll('input:checked')].map(
      (n) => (n as HTMLInputElement).value,
    );
    state = resolveSelections({ ...state, aliases: checked }, knownAliases(), rounds);
    void refreshForecasts();
  });

  for (const id of ['round-start', 'round-end'] as const) {
    el<HTMLSelectElement>(id).addEventListener('change', (ev) => {
      const value = (ev.target as HTMLSelectElement).value;
      state = id === 'round-start' ? { ...state, roundStart: value } : { ...state, roundEnd: value };
      void refreshForecasts();
    });
  }

  for (const tab of document.querySelectorAll('nav button[data-tab]')) {
    tab.addEventListener('click', () => {
      for (const section of document.querySelectorAll('main > section')) {
        (section as HTMLElement).hidden = section.id !== tab.getAttribute('data-tab');
      }
      for (const other of document.querySelectorAll('nav button[data-tab]')) {
        other.classList.toggle('active', other === tab);
      }
    });
  }
}

async function boot(): Promise<void> {
  wireEvents();
  try {
    rounds = await api.rounds();
    leaderboard = await api.leaderboard();
    banner(null);
  } catch (err) {
    banner(`loading failed: ${(err as Error).message}`);
  }
  state = resolveSelections(state, knownAliases(), rounds);
  renderControls();
  renderLeaderboardView();
  void refreshForecasts();
  void refreshSkill();
}

void boot();
