/** Metrics dashboard: the gateway's counter table plus the health line. */

import { esc, fmtNumber } from "../html.js";
import { HealthDoc, MetricsDoc } from "../types.js";

export function renderMetrics(metrics: MetricsDoc, health: HealthDoc | null): string {
  const rows = Object.entries(metrics)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(
      ([key, value]) =>
        `<tr><td>${esc(key)}</td><td class="num">${esc(fmtNumber(value))}</td></tr>`,
    );
  const healthLine = health
    ? `<p class="health">service ${esc(health.status)}, clock ${esc(health.now)}, ` +
      `${health.users} users, ${health.store_records} records</p>`
    : `<p class="health">health unknown</p>`;
  return [
    `<section class="metrics">`,
    healthLine,
    `<table><thead><tr><th>Counter</th><th>Value</th></tr></thead>`,
    `<tbody>${rows.join("")}</tbody></table>`,
    `</section>`,
  ].join("");
}
