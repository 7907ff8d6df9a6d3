/** Rule editor: existing rules, recommended candidates, and the draft form. */

import { badge, esc } from "../html.js";
import { RuleDoc } from "../types.js";
import { FieldErrors } from "../validate.js";

export interface RulesModel {
  rules: RuleDoc[];
  recommendations: RuleDoc[];
  draftErrors: FieldErrors;
}

function matchSummary(rule: RuleDoc): string {
  const parts: string[] = [];
  if (rule.match.source) parts.push(`source=${rule.match.source}`);
  if (rule.match.type) parts.push(`type=${rule.match.type}`);
  if (rule.match.tags_any?.length) parts.push(`tags~${rule.match.tags_any.join(",")}`);
  for (const [k, v] of Object.entries(rule.match.payload_eq ?? {})) {
    parts.push(`payload.${k}=${JSON.stringify(v)}`);
  }
  return parts.length > 0 ? parts.join(" ") : "every event";
}

function assignSummary(rule: RuleDoc): string {
  const a = rule.assign;
  const parts: string[] = [];
  if (a.severity) parts.push(a.severity);
  if (a.criticality) parts.push(a.criticality);
  if (a.urgency !== undefined) parts.push(`urgency ${a.urgency}`);
  if (a.duration) parts.push(a.duration);
  return parts.length > 0 ? parts.join(", ") : "taxonomy defaults";
}

function fieldError(errors: FieldErrors, field: string): string {
  const msg = errors[field];
  if (!msg) return "";
  return `<span class="field-error" data-field="${esc(field)}">${esc(msg)}</span>`;
}

export function renderRules(model: RulesModel): string {
  const rows = model.rules.map((rule) => {
    const id = esc(rule.rule_id);
    return [
      `<tr data-rule="${id}">`,
      `<td>${id}</td>`,
      `<td>${esc(matchSummary(rule))}</td>`,
      `<td>${esc(assignSummary(rule))}</td>`,
      `<td><input type="checkbox" data-action="toggle-rule" data-id="${id}"${
        rule.enabled ? " checked" : ""
      }></td>`,
      `<td>${esc(rule.created_by)}</td>`,
      `<td><button data-action="delete-rule" data-id="${id}">Delete</button></td>`,
      `</tr>`,
    ].join("");
  });
  const table =
    model.rules.length > 0
      ? `<table class="rules"><thead><tr><th>Rule</th><th>Match</th><th>Assign</th>` +
        `<th>Enabled</th><th>Origin</th><th></th></tr></thead><tbody>${rows.join("")}</tbody></table>`
      : `<p class="empty">No rules yet.</p>`;

  const recs = model.recommendations.map((rec, i) => {
    return [
      `<li class="recommendation">`,
      `${esc(matchSummary(rec))} ${badge(assignSummary(rec), "assign")} `,
      `<button data-action="enable-recommendation" data-index="${i}">Enable</button>`,
      `</li>`,
    ].join("");
  });
  const recBlock =
    recs.length > 0
      ? `<ul class="recommendations">${recs.join("")}</ul>`
      : `<p class="empty">No candidates; the unmatched pool is quiet.</p>`;

  const e = model.draftErrors;
  const form = [
    `<form id="rule-form">`,
    `<label>User <input name="user_id" id="rule-user">${fieldError(e, "user_id")}</label>`,
    `<label>Source <input name="source" id="rule-source"></label>`,
    `<label>Type <input name="type" id="rule-type"></label>`,
    `<label>Tags (comma separated) <input name="tags" id="rule-tags">${fieldError(e, "match.tags_any")}</label>`,
    `<label>Severity <select name="severity" id="rule-severity"><option value=""></option>` +
      `<option>error</option><option>warning</option><option>info</option>` +
      `<option>not_available</option></select>${fieldError(e, "assign.severity")}</label>`,
    `<label>Criticality <select name="criticality" id="rule-criticality"><option value=""></option>` +
      `<option>critical</option><option>non_critical</option></select>${fieldError(e, "assign.criticality")}</label>`,
    `<label>Urgency <input name="urgency" id="rule-urgency" type="number" step="0.05">${fieldError(
      e,
      "assign.urgency",
    )}</label>`,
    `<label>Duration <select name="duration" id="rule-duration"><option value=""></option>` +
      `<option>repeated</option><option>one_shot</option></select>${fieldError(e, "assign.duration")}</label>`,
    fieldError(e, "form"),
    `<button type="submit" data-action="save-rule">Save rule</button>`,
    `</form>`,
  ].join("");

  return [
    `<section class="rules-view">`,
    `<h2>Rules</h2>`,
    table,
    `<h2>Recommended candidates</h2>`,
    recBlock,
    `<h2>New rule</h2>`,
    form,
    `</section>`,
  ].join("");
}
