import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/client.js";
import { ConsoleController } from "../src/controller.js";
import { ActionQueue } from "../src/queue.js";
import { renderAvailabilityGrid } from "../src/views/availability.js";
import { FakeServer, makePrefs } from "./fake_server.js";

function setup(server: FakeServer) {
  const client = new ApiClient({
    baseUrl: "http://svc",
    token: server.token,
    fetchFn: server.fetchFn,
  });
  const queue = new ActionQueue();
  return { client, queue, controller: new ConsoleController(client, queue) };
}

function gridModel(quiet: number[] = []) {
  return {
    availability: {
      user_id: "u1",
      timezone_offset_minutes: 0,
      scores: Array.from({ length: 168 }, (_, i) => (i % 24) / 24),
    },
    preferences: makePrefs({ quiet_hours: quiet }),
  };
}

describe("availability grid", () => {
  it("renders all 168 hour-of-week cells", () => {
    const html = renderAvailabilityGrid(gridModel());
    for (const bin of [0, 167]) {
      expect(html).toContain(`data-bin="${bin}"`);
    }
    expect((html.match(/data-action="toggle-quiet"/g) ?? []).length).toBe(168);
    // Monday leads the rows
    expect(html.indexOf("Mon")).toBeLessThan(html.indexOf("Sun"));
  });

  it("marks quiet-hour overrides and shades by learned score", () => {
    const html = renderAvailabilityGrid(gridModel([5, 30]));
    expect((html.match(/class="cell quiet"/g) ?? []).length).toBe(2);
    expect(html).toContain("rgba(46, 125, 50, 0.250)");
  });

  it("toggling a quiet hour writes only quiet_hours and the threshold", async () => {
    const server = new FakeServer({ prefs: [makePrefs({ quiet_hours: [5] })] });
    const { controller, queue, client } = setup(server);
    const prefs = await client.getPreferences("u1");

    controller.toggleQuietHour(prefs, 30);
    await queue.drain();

    const puts = server.callsTo("PUT", "/api/v1/users/u1/preferences");
    expect(puts.length).toBe(1);
    expect(Object.keys(puts[0]!.body as object).sort()).toEqual([
      "availability_threshold",
      "quiet_hours",
    ]);
    expect((puts[0]!.body as { quiet_hours: number[] }).quiet_hours).toEqual([5, 30]);

    const after = await client.getPreferences("u1");
    expect(after.quiet_hours).toEqual([5, 30]);
  });

  it("toggling twice removes the override again", async () => {
    const server = new FakeServer({ prefs: [makePrefs({ quiet_hours: [] })] });
    const { controller, queue, client } = setup(server);

    let prefs = await client.getPreferences("u1");
    controller.toggleQuietHour(prefs, 7);
    await queue.drain();
    prefs = await client.getPreferences("u1");
    expect(prefs.quiet_hours).toEqual([7]);

    controller.toggleQuietHour(prefs, 7);
    await queue.drain();
    prefs = await client.getPreferences("u1");
    expect(prefs.quiet_hours).toEqual([]);
  });

  it("saving the threshold round-trips and never touches the scores", async () => {
    const server = new FakeServer({ prefs: [makePrefs()] });
    const { controller, queue, client } = setup(server);
    const prefs = await client.getPreferences("u1");

    controller.setThreshold(prefs, 0.35);
    controller.toggleQuietHour({ ...prefs, availability_threshold: 0.35 }, 12);
    await queue.drain();

    const after = await client.getPreferences("u1");
    expect(after.availability_threshold).toBe(0.35);
    expect(after.quiet_hours).toEqual([12]);

    // learned scores are read-only: no write ever carries histogram state
    for (const call of server.calls) {
      if (call.method === "PUT") {
        const keys = Object.keys(call.body as object);
        expect(keys).not.toContain("scores");
        expect(keys).not.toContain("engaged");
        expect(keys).not.toContain("seen");
      }
    }
  });
});
