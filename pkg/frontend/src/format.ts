/** Number and code formatting helpers. Rendered metrics always use three
 * decimals so they compare exactly against the API payload. */

export function fmt3(value: number): string {
  return value.toFixed(3);
}

export function fmtSigned3(value: number): string {
  const text = value.toFixed(3);
  return value >= 0 ? `+${text}` : text;
}

export function fmtCost(value: number): string {
  return `$${value.toFixed(4)}`;
}

const KEYWORDS = new Set([
  "feature",
  "drop",
  "usefulness",
  "expr",
  "reason",
  "and",
  "or",
  "not",
  "true",
  "false",
  "col",
]);

const TOKEN_PATTERN =
  /(#[^\n]*)|("(?:[^"\\]|\\.)*")|(\b\d+(?:\.\d+)?(?:[eE][+-]?\d+)?\b)|([A-Za-z_][A-Za-z0-9_]*)/g;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Tiny tokenizer-driven highlighter for the feature language. */
export function highlightCode(source: string): string {
  let html = "";
  let last = 0;
  for (const match of source.matchAll(TOKEN_PATTERN)) {
    const start = match.index ?? 0;
    html += escapeHtml(source.slice(last, start));
    const [text, comment, str, num, ident] = match;
    if (comment !== undefined) {
      html += `<span class="tok-comment">${escapeHtml(text)}</span>`;
    } else if (str !== undefined) {
      html += `<span class="tok-string">${escapeHtml(text)}</span>`;
    } else if (num !== undefined) {
      html += `<span class="tok-number">${escapeHtml(text)}</span>`;
    } else if (ident !== undefined && KEYWORDS.has(ident)) {
      html += `<span class="tok-keyword">${escapeHtml(text)}</span>`;
    } else {
      html += `<span class="tok-ident">${escapeHtml(text)}</span>`;
    }
    last = start + text.length;
  }
  html += escapeHtml(source.slice(last));
  return html;
}
