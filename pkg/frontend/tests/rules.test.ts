import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/client.js";
import { ConsoleController } from "../src/controller.js";
import { ActionQueue } from "../src/queue.js";
import { fieldErrorsFromApi, validateRuleDraft } from "../src/validate.js";
import { renderRules } from "../src/views/rules.js";
import { FakeServer, makeRule } from "./fake_server.js";

function setup(server: FakeServer) {
  const client = new ApiClient({
    baseUrl: "http://svc",
    token: server.token,
    fetchFn: server.fetchFn,
  });
  const queue = new ActionQueue();
  return { client, queue, controller: new ConsoleController(client, queue) };
}

describe("rule editing", () => {
  it("enabling a recommended candidate round-trips enabled=true via GET", async () => {
    const rec = makeRule({
      rule_id: "rec-u1-batch-c-job.lag",
      match: { source: "batch-c", type: "job.lag" },
      enabled: false,
      created_by: "recommendation",
    });
    const server = new FakeServer({ recommendations: [rec] });
    const { controller, queue, client } = setup(server);

    controller.enableRecommendation(rec);
    await queue.drain();

    const rules = await client.listRules("u1");
    expect(rules.length).toBe(1);
    expect(rules[0]!.enabled).toBe(true);
    expect(rules[0]!.match).toEqual({ source: "batch-c", type: "job.lag" });
    expect(rules[0]!.rule_id).toMatch(/^ru-/);
  });

  it("rejects urgency 1.5 inline without sending a request", async () => {
    const server = new FakeServer();
    const { controller, queue } = setup(server);

    const errors = controller.saveRule({
      user_id: "u1",
      match: { type: "disk.full" },
      assign: { urgency: 1.5 },
    });
    await queue.drain();

    expect(errors["assign.urgency"]).toMatch(/\[0, 1\]/);
    expect(server.callsTo("POST", "/api/v1/rules").length).toBe(0);
    expect(queue.size).toBe(0);
  });

  it("a valid draft saves and then lists", async () => {
    const server = new FakeServer();
    const { controller, queue, client } = setup(server);

    const errors = controller.saveRule({
      user_id: "u1",
      match: { source: "srv-a", type: "disk.full" },
      assign: { severity: "error", urgency: 0.9 },
    });
    await queue.drain();

    expect(errors).toEqual({});
    const rules = await client.listRules("u1");
    expect(rules.length).toBe(1);
    expect(rules[0]!.assign.urgency).toBe(0.9);
  });

  it("deleted rules disappear from subsequent GETs", async () => {
    const rule = makeRule();
    const server = new FakeServer({ rules: [rule] });
    const { controller, queue, client } = setup(server);

    controller.removeRule(rule.rule_id);
    await queue.drain();

    expect(await client.listRules("u1")).toEqual([]);
  });

  it("toggling enabled goes through PUT and sticks", async () => {
    const rule = makeRule({ enabled: true });
    const server = new FakeServer({ rules: [rule] });
    const { controller, queue, client } = setup(server);

    controller.setRuleEnabled(rule.rule_id, false);
    await queue.drain();

    const listed = await client.listRules("u1");
    expect(listed[0]!.enabled).toBe(false);
    const puts = server.callsTo("PUT", `/api/v1/rules/${rule.rule_id}`);
    expect(puts.length).toBe(1);
    expect(puts[0]!.body).toEqual({ enabled: false });
  });
});

describe("client-side validation", () => {
  it("mirrors the service checks field by field", () => {
    const errors = validateRuleDraft({
      user_id: "  ",
      match: { tags_any: ["ok", ""] },
      assign: { severity: "fatal", criticality: "sort_of", urgency: -0.2, duration: "forever" },
    });
    expect(Object.keys(errors).sort()).toEqual([
      "assign.criticality",
      "assign.duration",
      "assign.severity",
      "assign.urgency",
      "match.tags_any",
      "user_id",
    ]);
  });

  it("accepts a clean draft", () => {
    expect(
      validateRuleDraft({
        user_id: "u1",
        match: { source: "srv-a" },
        assign: { severity: "warning", urgency: 0.0, duration: "repeated" },
      }),
    ).toEqual({});
  });

  it("maps server rejections back onto the offending field", () => {
    const err = new ApiError(400, "invalid", "assigned urgency must be in [0, 1], got 2");
    expect(fieldErrorsFromApi(err)).toEqual({
      "assign.urgency": "assigned urgency must be in [0, 1], got 2",
    });
    const unknown = new ApiError(409, "conflict", "rule ru-1 is immutable");
    expect(fieldErrorsFromApi(unknown)).toEqual({ form: "rule ru-1 is immutable" });
  });
});

describe("rules view", () => {
  it("renders rows, recommendation enables, and inline errors", () => {
    const rule = makeRule({ enabled: false });
    const rec = makeRule({ created_by: "recommendation", enabled: false });
    const html = renderRules({
      rules: [rule],
      recommendations: [rec],
      draftErrors: { "assign.urgency": "urgency must be in [0, 1], got 1.5" },
    });
    expect(html).toContain(`data-rule="${rule.rule_id}"`);
    expect(html).toContain('data-action="delete-rule"');
    expect(html).toContain('data-action="enable-recommendation" data-index="0"');
    expect(html).toContain('data-field="assign.urgency"');
    expect(html).toContain("urgency must be in [0, 1], got 1.5");
    // unchecked box for a disabled rule
    expect(html).not.toContain("checked");
  });
});
