/** Shared test utilities: extracting displayed numbers from rendered markup
 * so they can be traced back to fixture fields.
 */

export function tableCellTexts(html: string): string[] {
  const cells = [...html.matchAll(/<t[dh][^>]*>(.*?)<\/t[dh]>/gs)].map((m) => m[1]);
  return cells.map((c) => c.replace(/<[^>]+>/g, '').trim()).filter((c) => c.length > 0);
}

export function svgTextContents(markup: string): string[] {
  return [...markup.matchAll(/<text[^>]*>(.*?)<\/text>/gs)].map((m) => m[1].trim());
}

export function dataAttributeValues(markup: string, attr: string): string[] {
  const re = new RegExp(`data-${attr}="([^"]*)"`, 'g');
  return [...markup.matchAll(re)].map((m) => m[1]);
}

/** All numeric-looking tokens in a rendered fragment's visible text. */
export function numericTokens(texts: string[]): string[] {
  const out: string[] = [];
  for (const text of texts) {
    for (const m of text.matchAll(/[+-]?\d+(?:\.\d+)?%?/g)) {
      out.push(m[0]);
    }
  }
  return out;
}
