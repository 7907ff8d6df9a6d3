/** Binds user intents to API calls through the retry queue.
 *
 * Each method is one user action and enqueues exactly one call. Mutating
 * actions go through the queue so a transport failure keeps them pending
 * instead of dropping them; reads happen directly in the app layer.
 */

import { ApiClient, RuleBody } from "./client.js";
import { ActionQueue } from "./queue.js";
import { openSignal } from "./recency.js";
import {
  Criticality,
  Duration,
  NotificationDoc,
  PreferencesDoc,
  RuleDoc,
  Severity,
} from "./types.js";
import { FieldErrors, RuleDraft, validateRuleDraft } from "./validate.js";

export class ConsoleController {
  constructor(
    readonly client: ApiClient,
    readonly queue: ActionQueue,
  ) {}

  // ---------------------------------------------------------------- inbox

  open(n: NotificationDoc, nowMs: number): void {
    const sent = n.dispatched_at ?? n.scheduled_at;
    const signal = openSignal(sent, nowMs);
    this.queue.enqueue(`open ${n.notification_id}`, () =>
      this.client.sendFeedback(n.notification_id, signal),
    );
  }

  act(notificationId: string): void {
    this.queue.enqueue(`act ${notificationId}`, () =>
      this.client.sendFeedback(notificationId, "acted"),
    );
  }

  dismiss(notificationId: string): void {
    this.queue.enqueue(`dismiss ${notificationId}`, () =>
      this.client.sendFeedback(notificationId, "dismissed"),
    );
  }

  markIrrelevant(notificationId: string): void {
    this.queue.enqueue(`mark ${notificationId}`, () =>
      this.client.sendFeedback(notificationId, "marked_irrelevant"),
    );
  }

  acknowledge(notificationId: string): void {
    this.queue.enqueue(`ack ${notificationId}`, () =>
      this.client.acknowledge(notificationId),
    );
  }

  // ---------------------------------------------------------------- rules

  /** Validates the draft; returns field errors without sending when invalid. */
  saveRule(draft: RuleDraft): FieldErrors {
    const errors = validateRuleDraft(draft);
    if (Object.keys(errors).length > 0) {
      return errors;
    }
    const body: RuleBody = {
      user_id: draft.user_id,
      match: {
        ...(draft.match.source ? { source: draft.match.source } : {}),
        ...(draft.match.type ? { type: draft.match.type } : {}),
        ...(draft.match.tags_any?.length ? { tags_any: draft.match.tags_any } : {}),
        ...(draft.match.payload_eq ? { payload_eq: draft.match.payload_eq } : {}),
      },
      assign: {
        // memberships were checked by validateRuleDraft above
        ...(draft.assign.severity ? { severity: draft.assign.severity as Severity } : {}),
        ...(draft.assign.criticality
          ? { criticality: draft.assign.criticality as Criticality }
          : {}),
        ...(draft.assign.urgency !== undefined ? { urgency: draft.assign.urgency } : {}),
        ...(draft.assign.duration ? { duration: draft.assign.duration as Duration } : {}),
      },
      enabled: draft.enabled ?? true,
    };
    this.queue.enqueue(`save rule for ${draft.user_id}`, () =>
      this.client.createRule(body),
    );
    return {};
  }

  /** One-click enable: persists a recommended candidate as a live rule. */
  enableRecommendation(rec: RuleDoc): void {
    this.queue.enqueue(`enable ${rec.rule_id}`, () =>
      this.client.createRule({
        user_id: rec.user_id,
        match: rec.match,
        assign: rec.assign,
        enabled: true,
      }),
    );
  }

  setRuleEnabled(ruleId: string, enabled: boolean): void {
    this.queue.enqueue(`toggle ${ruleId}`, () =>
      this.client.updateRule(ruleId, { enabled }),
    );
  }

  removeRule(ruleId: string): void {
    this.queue.enqueue(`delete ${ruleId}`, () => this.client.deleteRule(ruleId));
  }

  // --------------------------------------------------------------- decisions

  reportMissedAlert(decisionId: string): void {
    this.queue.enqueue(`missed ${decisionId}`, () =>
      this.client.reportMissedAlert(decisionId),
    );
  }

  // ------------------------------------------------------------ availability

  /** Grid edits write quiet_hours and the threshold, nothing else. */
  toggleQuietHour(prefs: PreferencesDoc, bin: number): void {
    const quiet = new Set(prefs.quiet_hours);
    if (quiet.has(bin)) {
      quiet.delete(bin);
    } else {
      quiet.add(bin);
    }
    const hours = [...quiet].sort((a, b) => a - b);
    this.queue.enqueue(`quiet hour ${bin}`, () =>
      this.client.putPreferences(prefs.user_id, {
        quiet_hours: hours,
        availability_threshold: prefs.availability_threshold,
      }),
    );
  }

  setThreshold(prefs: PreferencesDoc, threshold: number): void {
    this.queue.enqueue(`threshold ${threshold}`, () =>
      this.client.putPreferences(prefs.user_id, {
        quiet_hours: [...prefs.quiet_hours].sort((a, b) => a - b),
        availability_threshold: threshold,
      }),
    );
  }
}
