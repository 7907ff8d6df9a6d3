/** Browser wiring: state, tab routing, and event delegation.
 *
 * Views render to strings; this module owns the DOM. Reads go straight to
 * the client, mutations through the controller's queue, and every mutation
 * schedules a refresh so the optimistic render reconciles against what the
 * server actually stored.
 */

import { ApiClient } from "./client.js";
import { ConsoleController } from "./controller.js";
import { ActionQueue } from "./queue.js";
import {
  DecisionDoc,
  HealthDoc,
  MetricsDoc,
  NotificationDoc,
  PreferencesDoc,
  RuleDoc,
} from "./types.js";
import { FieldErrors, RuleDraft } from "./validate.js";
import { renderAvailabilityGrid } from "./views/availability.js";
import { layerOf, renderDecisionFilter, renderDecisions } from "./views/decisions.js";
import { renderInbox, renderQueueBanner } from "./views/inbox.js";
import { renderMetrics } from "./views/metrics.js";
import { renderRules } from "./views/rules.js";

type Tab = "inbox" | "rules" | "availability" | "decisions" | "metrics";

const TABS: Tab[] = ["inbox", "rules", "availability", "decisions", "metrics"];

interface AppState {
  tab: Tab;
  user: string;
  notifications: NotificationDoc[];
  decisions: DecisionDoc[];
  decisionFilter: { alertId?: string; user?: string };
  rules: RuleDoc[];
  recommendations: RuleDoc[];
  prefs: PreferencesDoc | null;
  scores: number[] | null;
  metrics: MetricsDoc;
  health: HealthDoc | null;
  draftErrors: FieldErrors;
  loadError: string | null;
}

export function mount(root: HTMLElement, client: ApiClient, user: string): void {
  const state: AppState = {
    tab: "inbox",
    user,
    notifications: [],
    decisions: [],
    decisionFilter: {},
    rules: [],
    recommendations: [],
    prefs: null,
    scores: null,
    metrics: {},
    health: null,
    draftErrors: {},
    loadError: null,
  };
  const queue = new ActionQueue(() => paint());
  const controller = new ConsoleController(client, queue);

  function safeguardAlertIds(): Set<string> {
    const ids = new Set<string>();
    for (const d of state.decisions) {
      if (layerOf(d) === "Safeguard") ids.add(d.alert_id);
    }
    return ids;
  }

  function paint(): void {
    const tabs = TABS.map(
      (t) =>
        `<button data-action="tab" data-tab="${t}" class="${
          t === state.tab ? "tab active" : "tab"
        }">${t}</button>`,
    ).join("");
    let body = "";
    if (state.loadError) {
      body = `<div class="banner" role="alert">${state.loadError} <button data-action="reload">Reload</button></div>`;
    } else if (state.tab === "inbox") {
      body = renderInbox({
        notifications: state.notifications,
        safeguardAlertIds: safeguardAlertIds(),
      });
    } else if (state.tab === "rules") {
      body = renderRules({
        rules: state.rules,
        recommendations: state.recommendations,
        draftErrors: state.draftErrors,
      });
    } else if (state.tab === "availability") {
      body =
        state.prefs && state.scores
          ? renderAvailabilityGrid({
              availability: {
                user_id: state.user,
                timezone_offset_minutes: state.prefs.timezone_offset_minutes,
                scores: state.scores,
              },
              preferences: state.prefs,
            })
          : `<p class="empty">Loading availability.</p>`;
    } else if (state.tab === "decisions") {
      body = renderDecisionFilter(state.decisionFilter) + renderDecisions(state.decisions);
    } else {
      body = renderMetrics(state.metrics, state.health);
    }
    root.innerHTML =
      renderQueueBanner(queue.size, queue.lastError) +
      `<nav>${tabs}</nav>` +
      `<main>${body}</main>`;
  }

  async function refresh(): Promise<void> {
    state.loadError = null;
    try {
      if (state.tab === "inbox") {
        [state.notifications, state.decisions] = await Promise.all([
          client.listNotifications(state.user),
          client.listDecisions({ user: state.user }),
        ]);
      } else if (state.tab === "rules") {
        [state.rules, state.recommendations] = await Promise.all([
          client.listRules(state.user),
          client.listRecommendations(state.user),
        ]);
      } else if (state.tab === "availability") {
        const [prefs, avail] = await Promise.all([
          client.getPreferences(state.user),
          client.getAvailability(state.user),
        ]);
        state.prefs = prefs;
        state.scores = avail.scores;
      } else if (state.tab === "decisions") {
        state.decisions = await client.listDecisions({
          ...state.decisionFilter,
          user: state.decisionFilter.user ?? state.user,
        });
      } else {
        const [metrics, health] = await Promise.all([
          client.getMetrics(),
          client.getHealth(),
        ]);
        state.metrics = metrics;
        state.health = health;
      }
    } catch (err) {
      state.loadError = err instanceof Error ? err.message : String(err);
    }
    paint();
  }

  function refreshSoon(): void {
    // let the queued call land first, then reconcile
    void queue.drain().then(() => refresh());
  }

  function findNotification(id: string): NotificationDoc | undefined {
    return state.notifications.find((n) => n.notification_id === id);
  }

  root.addEventListener("click", (ev) => {
    const target = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target) return;
    const action = target.dataset.action;
    const id = target.dataset.id ?? "";
    if (action === "tab") {
      state.tab = target.dataset.tab as Tab;
      void refresh();
      return;
    }
    if (action === "reload") {
      void refresh();
      return;
    }
    if (action === "retry-queue") {
      void queue.retry().then(() => refresh());
      return;
    }
    if (action === "open") {
      const n = findNotification(id);
      if (n) controller.open(n, Date.now());
      refreshSoon();
    } else if (action === "act") {
      controller.act(id);
      refreshSoon();
    } else if (action === "dismiss") {
      controller.dismiss(id);
      refreshSoon();
    } else if (action === "mark-irrelevant") {
      controller.markIrrelevant(id);
      refreshSoon();
    } else if (action === "ack") {
      controller.acknowledge(id);
      refreshSoon();
    } else if (action === "delete-rule") {
      controller.removeRule(id);
      refreshSoon();
    } else if (action === "toggle-rule") {
      const box = target as HTMLInputElement;
      controller.setRuleEnabled(id, box.checked);
      refreshSoon();
    } else if (action === "enable-recommendation") {
      const rec = state.recommendations[Number(target.dataset.index)];
      if (rec) controller.enableRecommendation(rec);
      refreshSoon();
    } else if (action === "report-missed") {
      controller.reportMissedAlert(target.dataset.decision ?? "");
      refreshSoon();
    } else if (action === "toggle-quiet") {
      if (state.prefs) {
        controller.toggleQuietHour(state.prefs, Number(target.dataset.bin));
        refreshSoon();
      }
    } else if (action === "save-threshold") {
      const input = root.querySelector<HTMLInputElement>("#tau");
      if (state.prefs && input) {
        controller.setThreshold(state.prefs, Number(input.value));
        refreshSoon();
      }
    }
  });

  root.addEventListener("submit", (ev) => {
    const form = ev.target as HTMLFormElement;
    ev.preventDefault();
    if (form.id === "rule-form") {
      const value = (sel: string) =>
        root.querySelector<HTMLInputElement | HTMLSelectElement>(sel)?.value.trim() ?? "";
      const tags = value("#rule-tags");
      const urgency = value("#rule-urgency");
      const draft: RuleDraft = {
        user_id: value("#rule-user") || state.user,
        match: {
          ...(value("#rule-source") ? { source: value("#rule-source") } : {}),
          ...(value("#rule-type") ? { type: value("#rule-type") } : {}),
          ...(tags ? { tags_any: tags.split(",").map((t) => t.trim()) } : {}),
        },
        assign: {
          ...(value("#rule-severity") ? { severity: value("#rule-severity") } : {}),
          ...(value("#rule-criticality")
            ? { criticality: value("#rule-criticality") }
            : {}),
          ...(urgency ? { urgency: Number(urgency) } : {}),
          ...(value("#rule-duration") ? { duration: value("#rule-duration") } : {}),
        },
      };
      state.draftErrors = controller.saveRule(draft);
      if (Object.keys(state.draftErrors).length > 0) {
        paint();
      } else {
        refreshSoon();
      }
    } else if (form.id === "decision-filter") {
      const data = new FormData(form);
      const alertId = String(data.get("alert_id") ?? "").trim();
      const user = String(data.get("user") ?? "").trim();
      state.decisionFilter = {
        ...(alertId ? { alertId } : {}),
        ...(user ? { user } : {}),
      };
      void refresh();
    }
  });

  void refresh();
}
