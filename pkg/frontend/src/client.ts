/** Thin typed wrapper over the gateway's HTTP API.
 *
 * The fetch implementation is injectable so tests can run against an
 * in-memory fake; the default is the browser global.
 */

import { z } from "zod";
import {
  AckResponseSchema,
  AvailabilitySchema,
  DecisionListSchema,
  FeedbackResponseSchema,
  FeedbackSignal,
  HealthSchema,
  MetricsSchema,
  MissedAlertResponseSchema,
  NotificationListSchema,
  PolicySchema,
  PreferencesSchema,
  RecommendationListSchema,
  RuleAssign,
  RuleListSchema,
  RuleMatch,
  RuleSchema,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Server rejected the request; carries the error envelope. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code} (${status}): ${detail}`);
    this.name = "ApiError";
  }
}

/** Request never reached the server; the action that caused it should be retried. */
export class TransportError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${cause instanceof Error ? cause.message : String(cause)}`);
    this.name = "TransportError";
  }
}

function toApiError(status: number, doc: unknown): ApiError {
  if (doc && typeof doc === "object") {
    const env = doc as Record<string, unknown>;
    const code = typeof env.error === "string" ? env.error : `http_${status}`;
    const detail = typeof env.detail === "string" ? env.detail : JSON.stringify(doc);
    return new ApiError(status, code, detail);
  }
  return new ApiError(status, `http_${status}`, String(doc));
}

export interface ClientOptions {
  baseUrl: string;
  token: string;
  fetchFn?: FetchLike;
}

export interface RuleBody {
  user_id: string;
  match: RuleMatch;
  assign: RuleAssign;
  enabled?: boolean;
}

export interface PreferencesPatch {
  quiet_hours?: number[];
  availability_threshold?: number;
}

export interface DecisionFilter {
  alertId?: string;
  user?: string;
  since?: string;
}

const API = "/api/v1";

export class ApiClient {
  private readonly base: string;
  private readonly token: string;
  private readonly fetchFn: FetchLike;

  constructor(opts: ClientOptions) {
    this.base = opts.baseUrl.replace(/\/+$/, "");
    this.token = opts.token;
    this.fetchFn = opts.fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(
    schema: z.ZodType<T>,
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {
      authorization: `Bearer ${this.token}`,
    };
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers["content-type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    let res: Response;
    try {
      res = await this.fetchFn(this.base + API + path, init);
    } catch (err) {
      throw new TransportError(err);
    }
    if (res.status === 204) {
      return schema.parse(null);
    }
    const text = await res.text();
    let doc: unknown = null;
    if (text) {
      try {
        doc = JSON.parse(text);
      } catch {
        doc = text;
      }
    }
    if (!res.ok) {
      throw toApiError(res.status, doc);
    }
    return schema.parse(doc);
  }

  // ------------------------------------------------------------ notifications

  async listNotifications(user: string, limit = 100) {
    const q = new URLSearchParams({ user, limit: String(limit) });
    const doc = await this.request(NotificationListSchema, "GET", `/notifications?${q}`);
    return doc.notifications;
  }

  acknowledge(notificationId: string) {
    return this.request(
      AckResponseSchema,
      "POST",
      `/notifications/${encodeURIComponent(notificationId)}/ack`,
    );
  }

  sendFeedback(notificationId: string, signal: FeedbackSignal) {
    return this.request(FeedbackResponseSchema, "POST", "/feedback", {
      notification_id: notificationId,
      signal,
    });
  }

  reportMissedAlert(decisionId: string) {
    return this.request(MissedAlertResponseSchema, "POST", "/feedback", {
      decision_id: decisionId,
    });
  }

  // -------------------------------------------------------------------- rules

  async listRules(user?: string) {
    const q = user ? `?${new URLSearchParams({ user })}` : "";
    const doc = await this.request(RuleListSchema, "GET", `/rules${q}`);
    return doc.rules;
  }

  createRule(body: RuleBody) {
    return this.request(RuleSchema, "POST", "/rules", body);
  }

  updateRule(ruleId: string, patch: Partial<RuleBody>) {
    return this.request(
      RuleSchema,
      "PUT",
      `/rules/${encodeURIComponent(ruleId)}`,
      patch,
    );
  }

  deleteRule(ruleId: string) {
    return this.request(z.null(), "DELETE", `/rules/${encodeURIComponent(ruleId)}`);
  }

  async listRecommendations(user: string) {
    const q = new URLSearchParams({ user });
    const doc = await this.request(RecommendationListSchema, "GET", `/recommendations?${q}`);
    return doc.recommendations;
  }

  // -------------------------------------------------------------------- users

  getPreferences(userId: string) {
    return this.request(
      PreferencesSchema,
      "GET",
      `/users/${encodeURIComponent(userId)}/preferences`,
    );
  }

  putPreferences(userId: string, patch: PreferencesPatch) {
    return this.request(
      PreferencesSchema,
      "PUT",
      `/users/${encodeURIComponent(userId)}/preferences`,
      patch,
    );
  }

  getAvailability(userId: string) {
    return this.request(
      AvailabilitySchema,
      "GET",
      `/users/${encodeURIComponent(userId)}/availability`,
    );
  }

  // ---------------------------------------------------------------- decisions

  async listDecisions(filter: DecisionFilter = {}) {
    const q = new URLSearchParams();
    if (filter.alertId) q.set("alert_id", filter.alertId);
    if (filter.user) q.set("user", filter.user);
    if (filter.since) q.set("since", filter.since);
    const suffix = q.size > 0 ? `?${q}` : "";
    const doc = await this.request(DecisionListSchema, "GET", `/decisions${suffix}`);
    return doc.decisions;
  }

  getPolicy(user: string) {
    const q = new URLSearchParams({ user });
    return this.request(PolicySchema, "GET", `/policy?${q}`);
  }

  // --------------------------------------------------------------------- misc

  getMetrics() {
    return this.request(MetricsSchema, "GET", "/metrics");
  }

  getHealth() {
    return this.request(HealthSchema, "GET", "/health");
  }
}
