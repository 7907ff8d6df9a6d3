/** Availability grid: 7x24 learned scores with quiet-hour overrides.
 *
 * Scores are display-only shading; the only writable state on this view is
 * the quiet-hour set and the availability threshold.
 */

import { esc } from "../html.js";
import { AvailabilityDoc, PreferencesDoc } from "../types.js";

const DAYS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];

export interface AvailabilityModel {
  availability: AvailabilityDoc;
  preferences: PreferencesDoc;
}

export function renderAvailabilityGrid(model: AvailabilityModel): string {
  const quiet = new Set(model.preferences.quiet_hours);
  const scores = model.availability.scores;
  const header = [
    `<tr><th></th>`,
    ...Array.from({ length: 24 }, (_, h) => `<th>${h}</th>`),
    `</tr>`,
  ].join("");
  const rows = DAYS.map((day, d) => {
    const cells = Array.from({ length: 24 }, (_, h) => {
      const bin = d * 24 + h;
      const score = scores[bin] ?? 0;
      const cls = quiet.has(bin) ? "cell quiet" : "cell";
      return (
        `<td class="${cls}" data-action="toggle-quiet" data-bin="${bin}" ` +
        `style="background: rgba(46, 125, 50, ${score.toFixed(3)})" ` +
        `title="${day} ${String(h).padStart(2, "0")}:00 score ${score.toFixed(3)}"></td>`
      );
    });
    return `<tr><th>${day}</th>${cells.join("")}</tr>`;
  });
  const tau = model.preferences.availability_threshold;
  const channelOrder = model.preferences.channel_order
    .map((c) => c.kind + (c.url ? ` ${c.url}` : "") + (c.path ? ` ${c.path}` : ""))
    .join(" > ");
  const digest =
    model.preferences.digest_window_hours !== undefined
      ? `${model.preferences.digest_window_hours} h`
      : "service default";
  return [
    `<section class="availability">`,
    `<p>Click a cell to toggle its quiet-hour override. Shading shows the learned`,
    ` engagement score; scores update only from feedback, never from this grid.</p>`,
    `<table class="grid"><thead>${header}</thead><tbody>${rows.join("")}</tbody></table>`,
    `<label>Availability threshold `,
    `<input id="tau" type="number" min="0.01" max="0.99" step="0.01" value="${esc(tau)}">`,
    `</label>`,
    `<button data-action="save-threshold">Save threshold</button>`,
    `<dl class="prefs-summary">`,
    `<dt>Channels</dt><dd>${esc(channelOrder)}</dd>`,
    `<dt>Digest window</dt><dd>${esc(digest)}</dd>`,
    `<dt>Timezone offset</dt><dd>${esc(model.preferences.timezone_offset_minutes)} min</dd>`,
    `</dl>`,
    `</section>`,
  ].join("");
}
