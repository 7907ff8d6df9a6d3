/** String templating helpers shared by the views. */

export function esc(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function badge(label: string, cls: string): string {
  return `<span class="badge badge-${esc(cls)}">${esc(label)}</span>`;
}

export function fmtNumber(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return value.toFixed(4);
}
