/** Small presentation helpers shared by the components. */

export const EXCERPT_CHARS = 400;

export function excerpt(text: string, limit: number = EXCERPT_CHARS): string {
  if (text.length <= limit) {
    return text;
  }
  return text.slice(0, limit) + "…";
}

/** Width fraction for the token-length indicator bar, relative to the
 * longest candidate on screen. */
export function lengthFraction(tokenCount: number, maxTokenCount: number): number {
  if (maxTokenCount <= 0) {
    return 0;
  }
  return Math.max(0, Math.min(1, tokenCount / maxTokenCount));
}

export function formatScore(value: number): string {
  return value.toFixed(4);
}

export function formatTheta(value: number): string {
  return (value * 100).toFixed(1) + "%";
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}
