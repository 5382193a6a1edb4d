/** String-template rendering helpers. Views build SVG/HTML as strings so
 * the same code runs in the browser and in node tests. */

export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Fixed-width number for SVG attributes; avoids exponent notation. */
export function px(value: number): string {
  return value.toFixed(2);
}
