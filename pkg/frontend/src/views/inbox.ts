/** Inbox view: notifications newest-first with the feedback actions.
 *
 * Action buttons map one-to-one onto the feedback and acknowledge endpoints.
 * Acknowledge is offered only on safeguard-issued singles; everything else
 * carries the four feedback actions until a signal is recorded.
 */

import { badge, esc } from "../html.js";
import { NotificationDoc } from "../types.js";

export interface InboxModel {
  notifications: NotificationDoc[];
  /** alert_ids whose decision came from the safeguard layer */
  safeguardAlertIds: ReadonlySet<string>;
}

function sentAt(n: NotificationDoc): string {
  return n.dispatched_at ?? n.scheduled_at;
}

/** Severity read from the rendered body marker; digests have none. */
export function severityBadge(n: NotificationDoc): string {
  if (n.kind === "digest") return "digest";
  const marker = /^\[(ERROR|WARNING|INFO|NOT_AVAILABLE)\]/.exec(n.body);
  return marker ? marker[1]!.toLowerCase() : "single";
}

function preview(body: string): string {
  const firstLine = body.split("\n", 1)[0] ?? "";
  return firstLine.length > 120 ? `${firstLine.slice(0, 117)}...` : firstLine;
}

function actionButtons(n: NotificationDoc, safeguard: ReadonlySet<string>): string {
  if (n.dispatched_at === null) {
    return badge("pending dispatch", "pending");
  }
  if (n.feedback !== null) {
    return badge(n.feedback, "recorded");
  }
  const id = esc(n.notification_id);
  const sent = esc(sentAt(n));
  const buttons = [
    `<button data-action="open" data-id="${id}" data-sent="${sent}">Open</button>`,
    `<button data-action="act" data-id="${id}">Act</button>`,
    `<button data-action="dismiss" data-id="${id}">Dismiss</button>`,
    `<button data-action="mark-irrelevant" data-id="${id}">Mark irrelevant</button>`,
  ];
  const firstAlert = n.alert_ids[0];
  const critical =
    n.kind === "single" && firstAlert !== undefined && safeguard.has(firstAlert);
  if (critical && n.acknowledged_at === null) {
    buttons.push(`<button data-action="ack" data-id="${id}">Acknowledge</button>`);
  }
  if (n.acknowledged_at !== null) {
    buttons.push(badge("acknowledged", "ack"));
  }
  return buttons.join(" ");
}

export function renderInbox(model: InboxModel): string {
  const ordered = [...model.notifications].sort((a, b) => {
    const at = sentAt(a);
    const bt = sentAt(b);
    if (at !== bt) return at < bt ? 1 : -1;
    return a.notification_id < b.notification_id ? 1 : -1;
  });
  if (ordered.length === 0) {
    return `<section class="inbox"><p class="empty">No notifications yet.</p></section>`;
  }
  const items = ordered.map((n) => {
    return [
      `<li class="inbox-item" data-notification="${esc(n.notification_id)}">`,
      badge(severityBadge(n), severityBadge(n)),
      `<span class="item-id">${esc(n.notification_id)}</span>`,
      `<span class="item-body">${esc(preview(n.body))}</span>`,
      `<time datetime="${esc(sentAt(n))}">${esc(sentAt(n))}</time>`,
      `<span class="item-actions">${actionButtons(n, model.safeguardAlertIds)}</span>`,
      `</li>`,
    ].join("");
  });
  return `<section class="inbox"><ul class="inbox-list">${items.join("")}</ul></section>`;
}

/** Offline banner with the pending count; empty string when the queue is clear. */
export function renderQueueBanner(pendingCount: number, lastError: string | null): string {
  if (pendingCount === 0) return "";
  const noun = pendingCount === 1 ? "action" : "actions";
  const reason = lastError ? ` (${esc(lastError)})` : "";
  return (
    `<div class="banner" role="alert">${pendingCount} ${noun} waiting to reach the service${reason} ` +
    `<button data-action="retry-queue">Retry now</button></div>`
  );
}
