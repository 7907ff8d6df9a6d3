/** Wire document schemas for the /api/v1 surface.
 *
 * Every response the console consumes is parsed through one of these, so a
 * drifting server field shows up as a loud schema error instead of an
 * undefined leaking into a view.
 */

import { z } from "zod";

export const SeveritySchema = z.enum(["error", "warning", "info", "not_available"]);
export type Severity = z.infer<typeof SeveritySchema>;

export const CriticalitySchema = z.enum(["critical", "non_critical"]);
export type Criticality = z.infer<typeof CriticalitySchema>;

export const DurationSchema = z.enum(["repeated", "one_shot"]);
export type Duration = z.infer<typeof DurationSchema>;

export const FeedbackSignalSchema = z.enum([
  "opened_immediately",
  "opened_later",
  "acted",
  "dismissed",
  "deleted_unopened",
  "marked_irrelevant",
  "ignored",
]);
export type FeedbackSignal = z.infer<typeof FeedbackSignalSchema>;

export const ChannelSchema = z.object({
  kind: z.enum(["console", "webhook", "email_file"]),
  url: z.string().optional(),
  path: z.string().optional(),
});
export type Channel = z.infer<typeof ChannelSchema>;

export const NotificationSchema = z.object({
  notification_id: z.string(),
  user_id: z.string(),
  kind: z.enum(["single", "digest"]),
  alert_ids: z.array(z.string()),
  window_id: z.string().nullable(),
  channel: ChannelSchema,
  body: z.string(),
  scheduled_at: z.string(),
  dispatched_at: z.string().nullable(),
  acknowledged_at: z.string().nullable(),
  feedback: FeedbackSignalSchema.nullable(),
});
export type NotificationDoc = z.infer<typeof NotificationSchema>;

export const RuleMatchSchema = z.object({
  source: z.string().optional(),
  type: z.string().optional(),
  tags_any: z.array(z.string()).optional(),
  payload_eq: z.record(z.string(), z.unknown()).optional(),
});
export type RuleMatch = z.infer<typeof RuleMatchSchema>;

export const RuleAssignSchema = z.object({
  severity: SeveritySchema.optional(),
  criticality: CriticalitySchema.optional(),
  urgency: z.number().optional(),
  duration: DurationSchema.optional(),
});
export type RuleAssign = z.infer<typeof RuleAssignSchema>;

export const RuleSchema = z.object({
  rule_id: z.string(),
  user_id: z.string(),
  match: RuleMatchSchema,
  assign: RuleAssignSchema,
  enabled: z.boolean(),
  created_by: z.string(),
});
export type RuleDoc = z.infer<typeof RuleSchema>;

export const TraceEntrySchema = z.tuple([z.string(), z.number()]);
export type TraceEntry = z.infer<typeof TraceEntrySchema>;

export const DecisionSchema = z.object({
  decision_id: z.string(),
  alert_id: z.string(),
  action: z.enum(["issue", "aggregate", "suppress"]),
  window_id: z.string().nullable(),
  policy_kind: z.enum(["baseline", "learned", "safeguard"]),
  feature_vector: z.array(z.number()),
  trace: z.array(TraceEntrySchema),
  decided_at: z.string(),
});
export type DecisionDoc = z.infer<typeof DecisionSchema>;

export const PreferencesSchema = z.object({
  user_id: z.string(),
  channel_order: z.array(ChannelSchema),
  quiet_hours: z.array(z.number().int()),
  availability_threshold: z.number(),
  digest_window_hours: z.number().optional(),
  timezone_offset_minutes: z.number().int(),
});
export type PreferencesDoc = z.infer<typeof PreferencesSchema>;

// 168 hour-of-week scores, bin 0 = Monday 00:00 in the user's local offset.
export const AvailabilitySchema = z.object({
  user_id: z.string(),
  timezone_offset_minutes: z.number().int(),
  scores: z.array(z.number()).length(168),
});
export type AvailabilityDoc = z.infer<typeof AvailabilitySchema>;

export const PolicySchema = z.object({
  user_id: z.string(),
  weights: z.array(z.array(z.number())),
  epsilon: z.number(),
  epsilon_decay: z.number(),
  epsilon_floor: z.number(),
  update_count: z.number().int(),
  learning_rate: z.number(),
  rng_seed: z.number().int(),
  draw_count: z.number().int(),
});
export type PolicyDoc = z.infer<typeof PolicySchema>;

export const MetricsSchema = z.record(z.string(), z.number());
export type MetricsDoc = z.infer<typeof MetricsSchema>;

export const HealthSchema = z.object({
  status: z.string(),
  now: z.string(),
  users: z.number().int(),
  store_records: z.number().int(),
});
export type HealthDoc = z.infer<typeof HealthSchema>;

export const AckResponseSchema = z.object({
  notification_id: z.string(),
  acknowledged: z.literal(true),
});

export const FeedbackResponseSchema = z.object({
  notification_id: z.string(),
  signal: FeedbackSignalSchema,
  observed_at: z.string(),
});

export const MissedAlertResponseSchema = z.object({
  decision_id: z.string(),
  recorded: z.literal(true),
});

export const NotificationListSchema = z.object({
  notifications: z.array(NotificationSchema),
});
export const RuleListSchema = z.object({ rules: z.array(RuleSchema) });
export const RecommendationListSchema = z.object({
  recommendations: z.array(RuleSchema),
});
export const DecisionListSchema = z.object({ decisions: z.array(DecisionSchema) });
