import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { renderAvailabilityGrid } from "../src/views/availability.js";
import { renderDecisionFilter, renderDecisions } from "../src/views/decisions.js";
import { renderInbox, renderQueueBanner } from "../src/views/inbox.js";
import { renderMetrics } from "../src/views/metrics.js";
import { renderRules } from "../src/views/rules.js";
import { makeDecision, makeNotification, makePrefs, makeRule } from "./fake_server.js";

// every affordance that would let a user push a notification into the future
const FORBIDDEN = /snooze|mute|defer|silence/i;

function allViews(): string {
  const inbox = renderInbox({
    notifications: [
      makeNotification(),
      makeNotification({ body: "[WARNING] net.flap: link down (srv-b)" }),
      makeNotification({
        kind: "digest",
        alert_ids: ["al-x", "al-y"],
        window_id: "wd-00000001",
        body: "2 alerts\n- job.lag (2): queue depth 40",
      }),
      makeNotification({ dispatched_at: null }),
      makeNotification({ feedback: "acted" }),
    ],
    safeguardAlertIds: new Set(["al-x"]),
  });
  const rules = renderRules({
    rules: [makeRule(), makeRule({ enabled: false })],
    recommendations: [makeRule({ created_by: "recommendation", enabled: false })],
    draftErrors: { "assign.urgency": "urgency must be in [0, 1], got 1.5" },
  });
  const availability = renderAvailabilityGrid({
    availability: {
      user_id: "u1",
      timezone_offset_minutes: 60,
      scores: Array.from({ length: 168 }, (_, i) => (i % 24) / 24),
    },
    preferences: makePrefs({ quiet_hours: [0, 1, 2], digest_window_hours: 4 }),
  });
  const decisions =
    renderDecisionFilter({ alertId: "al-1" }) +
    renderDecisions([
      makeDecision({ trace: [["safeguard.critical", 1.0]] }),
      makeDecision({
        action: "suppress",
        trace: [["dedup.recent_cluster_activity_minutes", 3.2]],
      }),
      makeDecision({
        action: "aggregate",
        window_id: "wd-00000009",
        policy_kind: "learned",
        trace: [
          ["learned.q_issue", 0.1],
          ["learned.q_aggregate", 0.9],
          ["learned.q_suppress", 0.0],
          ["learned.epsilon", 0.02],
          ["learned.explored", 1.0],
        ],
      }),
      makeDecision({ action: "suppress", trace: [["baseline.not_available", 1.0]] }),
      makeDecision({ action: "aggregate", window_id: "wd-00000010", trace: [["baseline.residual", 1.0]] }),
      makeDecision({ trace: [["baseline.urgency_threshold", 0.85]] }),
    ]);
  const metrics = renderMetrics(
    { notifications_issued: 12, decisions_suppress: 4, mean_q: 0.125 },
    { status: "ok", now: "2026-01-05T10:00:00.000Z", users: 2, store_records: 77 },
  );
  const banner = renderQueueBanner(2, "service unreachable: fetch failed");
  return [inbox, rules, availability, decisions, metrics, banner].join("\n");
}

describe("snooze-free surface", () => {
  it("no rendered view exposes a snooze affordance", () => {
    const everything = allViews();
    expect(everything.length).toBeGreaterThan(1000);
    expect(everything).not.toMatch(FORBIDDEN);
  });

  it("the static shell is clean too", () => {
    const here = dirname(fileURLToPath(import.meta.url));
    const shell = readFileSync(join(here, "..", "index.html"), "utf8");
    expect(shell).not.toMatch(FORBIDDEN);
  });

  it("inbox buttons map exactly onto the feedback vocabulary and ack", () => {
    const html = renderInbox({
      notifications: [makeNotification({ alert_ids: ["al-x"] })],
      safeguardAlertIds: new Set(["al-x"]),
    });
    const actions = [...html.matchAll(/data-action="([^"]+)"/g)].map((m) => m[1]);
    expect(actions).toEqual(["open", "act", "dismiss", "mark-irrelevant", "ack"]);
  });
});
