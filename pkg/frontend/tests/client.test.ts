import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, TransportError } from "../src/client.js";
import { FakeServer, makeNotification, makePrefs } from "./fake_server.js";

describe("api client", () => {
  it("sends the bearer token and fails cleanly without it", async () => {
    const server = new FakeServer({ notifications: [makeNotification()] });
    const good = new ApiClient({
      baseUrl: "http://svc",
      token: server.token,
      fetchFn: server.fetchFn,
    });
    expect((await good.listNotifications("u1")).length).toBe(1);

    const bad = new ApiClient({
      baseUrl: "http://svc",
      token: "wrong",
      fetchFn: server.fetchFn,
    });
    await expect(bad.listNotifications("u1")).rejects.toMatchObject({
      name: "ApiError",
      status: 401,
    });
  });

  it("maps error envelopes onto ApiError", async () => {
    const server = new FakeServer();
    const client = new ApiClient({
      baseUrl: "http://svc",
      token: server.token,
      fetchFn: server.fetchFn,
    });
    try {
      await client.getPreferences("nobody");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).code).toBe("not_found");
      expect((err as ApiError).detail).toContain("nobody");
    }
  });

  it("wraps network failures in TransportError", async () => {
    const server = new FakeServer();
    server.failNext(1);
    const client = new ApiClient({
      baseUrl: "http://svc",
      token: server.token,
      fetchFn: server.fetchFn,
    });
    await expect(client.getMetrics()).rejects.toBeInstanceOf(TransportError);
  });

  it("rejects a response that drifts from the documented schema", async () => {
    const client = new ApiClient({
      baseUrl: "http://svc",
      token: "tok",
      fetchFn: async () =>
        new Response(JSON.stringify({ rules: [{ rule_id: 42 }] }), {
          status: 200,
          headers: { "content-type": "application/json" },
        }),
    });
    await expect(client.listRules()).rejects.toThrowError();
  });

  it("treats DELETE 204 as success with no body", async () => {
    const server = new FakeServer({
      rules: [
        {
          rule_id: "ru-00000001",
          user_id: "u1",
          match: {},
          assign: {},
          enabled: true,
          created_by: "user",
        },
      ],
    });
    const client = new ApiClient({
      baseUrl: "http://svc",
      token: server.token,
      fetchFn: server.fetchFn,
    });
    await client.deleteRule("ru-00000001");
    expect(await client.listRules()).toEqual([]);
  });

  it("round-trips preferences and availability documents", async () => {
    const server = new FakeServer({
      prefs: [makePrefs({ quiet_hours: [3], availability_threshold: 0.4 })],
      scores: { u1: Array.from({ length: 168 }, () => 0.25) },
    });
    const client = new ApiClient({
      baseUrl: "http://svc",
      token: server.token,
      fetchFn: server.fetchFn,
    });
    const prefs = await client.getPreferences("u1");
    expect(prefs.quiet_hours).toEqual([3]);
    const avail = await client.getAvailability("u1");
    expect(avail.scores.length).toBe(168);
    expect(avail.scores[0]).toBe(0.25);
  });

  it("reads health without authentication", async () => {
    const server = new FakeServer();
    const client = new ApiClient({
      baseUrl: "http://svc",
      token: "wrong",
      fetchFn: server.fetchFn,
    });
    const health = await client.getHealth();
    expect(health.status).toBe("ok");
  });
});
