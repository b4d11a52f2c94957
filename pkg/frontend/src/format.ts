/** Display rounding.
 *
 * The dashboard never aggregates: every number on screen is an API field
 * passed through exactly one of these helpers, which makes the
 * traceability tests straightforward.
 */

/** Skill scores and ranks: three decimals, explicit sign for skill. */
export function fmtSkill(value: number): string {
  const s = value.toFixed(3);
  return value > 0 ? `+${s}` : s;
}

export function fmtRank(value: number): string {
  return value.toFixed(2);
}

/** Coverage rates: one decimal, percent. */
export function fmtPercent(value: number): string {
  return `${value.toFixed(1)}%`;
}

/** Forecast and observation values in target units. */
export function fmtValue(value: number): string {
  return value.toFixed(1);
}

export function fmtShare(value: number): string {
  return value.toFixed(2);
}

/** Escape text nodes and attribute values. */
export function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
