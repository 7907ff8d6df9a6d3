/** Decision explorer: per-alert triage traces in plain language.
 *
 * Layer comes from the leading trace entry. Learned rows expose the Q-values
 * behind the choice; suppress rows carry the missed-alert complaint action.
 */

import { badge, esc, fmtNumber } from "../html.js";
import { DecisionDoc } from "../types.js";

const LAYER_LABELS: Record<string, string> = {
  safeguard: "Safeguard",
  dedup: "Dedup",
  baseline: "Baseline",
  learned: "Learned",
};

export function layerOf(decision: DecisionDoc): string {
  const head = decision.trace[0];
  const prefix = head ? head[0].split(".", 1)[0]! : decision.policy_kind;
  return LAYER_LABELS[prefix] ?? prefix;
}

function explainEntry(name: string, value: number): string {
  switch (name) {
    case "safeguard.critical":
      return "critical alert, issued immediately by the safeguard";
    case "dedup.recent_cluster_activity_minutes":
      return `repeat of a cluster last active ${value.toFixed(1)} min ago`;
    case "baseline.error_severity":
      return "error severity always issues";
    case "baseline.urgency_threshold":
      return `urgency ${fmtNumber(value)} at or above the issue threshold`;
    case "baseline.not_available":
      return "source reported not available";
    case "baseline.residual":
      return "no immediate trigger, batched into a digest";
    case "learned.epsilon":
      return `exploration rate ${fmtNumber(value)}`;
    case "learned.explored":
      return value > 0 ? "exploratory draw" : "greedy choice";
    default:
      return `${name} = ${fmtNumber(value)}`;
  }
}

function qValues(decision: DecisionDoc): string {
  const q: Record<string, number> = {};
  for (const [name, value] of decision.trace) {
    if (name.startsWith("learned.q_")) q[name.slice("learned.q_".length)] = value;
  }
  const arms = ["issue", "aggregate", "suppress"].filter((a) => a in q);
  if (arms.length === 0) return "";
  const parts = arms.map((a) => `Q(${a})=${fmtNumber(q[a]!)}`);
  return `<span class="q-values">${esc(parts.join(" "))}</span>`;
}

function explainTrace(decision: DecisionDoc): string {
  const items = decision.trace
    .filter(([name]) => !name.startsWith("learned.q_"))
    .map(([name, value]) => `<li>${esc(explainEntry(name, value))}</li>`);
  return `<ul class="trace">${items.join("")}</ul>`;
}

export function renderDecisions(decisions: DecisionDoc[]): string {
  if (decisions.length === 0) {
    return `<section class="decisions"><p class="empty">No decisions match the filter.</p></section>`;
  }
  const rows = decisions.map((d) => {
    const complaint =
      d.action === "suppress"
        ? `<button data-action="report-missed" data-decision="${esc(d.decision_id)}">` +
          `Report missed alert</button>`
        : "";
    return [
      `<tr data-decision="${esc(d.decision_id)}">`,
      `<td>${esc(d.decision_id)}</td>`,
      `<td>${esc(d.alert_id)}</td>`,
      `<td>${badge(d.action, d.action)}</td>`,
      `<td>${badge(layerOf(d), "layer")}</td>`,
      `<td>${qValues(d)}${explainTrace(d)}</td>`,
      `<td><time datetime="${esc(d.decided_at)}">${esc(d.decided_at)}</time></td>`,
      `<td>${complaint}</td>`,
      `</tr>`,
    ].join("");
  });
  return (
    `<section class="decisions"><table><thead><tr>` +
    `<th>Decision</th><th>Alert</th><th>Action</th><th>Layer</th>` +
    `<th>Why</th><th>Decided</th><th></th>` +
    `</tr></thead><tbody>${rows.join("")}</tbody></table></section>`
  );
}

export function renderDecisionFilter(filter: { alertId?: string; user?: string }): string {
  return [
    `<form id="decision-filter">`,
    `<label>Alert id <input name="alert_id" value="${esc(filter.alertId ?? "")}"></label>`,
    `<label>User <input name="user" value="${esc(filter.user ?? "")}"></label>`,
    `<button type="submit" data-action="apply-decision-filter">Apply</button>`,
    `</form>`,
  ].join("");
}
