/** Client-side rule validation mirroring the service's schema.
 *
 * A draft that fails here never becomes a request. Field keys use the
 * document path (assign.urgency etc.) so views can place errors inline.
 */

import { ApiError } from "./client.js";

export interface RuleDraft {
  user_id: string;
  match: {
    source?: string;
    type?: string;
    tags_any?: string[];
    payload_eq?: Record<string, unknown>;
  };
  assign: {
    severity?: string;
    criticality?: string;
    urgency?: number;
    duration?: string;
  };
  enabled?: boolean;
}

export type FieldErrors = Record<string, string>;

const SEVERITIES = new Set(["error", "warning", "info", "not_available"]);
const CRITICALITIES = new Set(["critical", "non_critical"]);
const DURATIONS = new Set(["repeated", "one_shot"]);

export function validateRuleDraft(draft: RuleDraft): FieldErrors {
  const errors: FieldErrors = {};
  if (!draft.user_id.trim()) {
    errors["user_id"] = "user id is required";
  }
  const a = draft.assign;
  if (a.severity !== undefined && !SEVERITIES.has(a.severity)) {
    errors["assign.severity"] = `unknown severity ${a.severity}`;
  }
  if (a.criticality !== undefined && !CRITICALITIES.has(a.criticality)) {
    errors["assign.criticality"] = `unknown criticality ${a.criticality}`;
  }
  if (a.duration !== undefined && !DURATIONS.has(a.duration)) {
    errors["assign.duration"] = `unknown duration ${a.duration}`;
  }
  if (a.urgency !== undefined) {
    if (!Number.isFinite(a.urgency) || a.urgency < 0 || a.urgency > 1) {
      errors["assign.urgency"] = `urgency must be in [0, 1], got ${a.urgency}`;
    }
  }
  for (const tag of draft.match.tags_any ?? []) {
    if (!tag.trim()) {
      errors["match.tags_any"] = "tags must be non-empty";
      break;
    }
  }
  return errors;
}

/** Maps a server rejection onto form fields; unmatched details land on "form". */
export function fieldErrorsFromApi(err: ApiError): FieldErrors {
  const detail = err.detail;
  if (/urgency/i.test(detail)) return { "assign.urgency": detail };
  if (/severity/i.test(detail)) return { "assign.severity": detail };
  if (/criticality/i.test(detail)) return { "assign.criticality": detail };
  if (/duration/i.test(detail)) return { "assign.duration": detail };
  if (/user_id/i.test(detail)) return { user_id: detail };
  return { form: detail };
}
