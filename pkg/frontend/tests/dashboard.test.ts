import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Dashboard } from "../src/dashboard.js";

interface Route {
  body: unknown;
  status?: number;
  headers?: Record<string, string>;
}

/** In-memory service double keyed by "METHOD path" with call counting. */
function fakeService(routes: Record<string, Route | Route[]>) {
  const calls: string[] = [];
  const impl = (async (input: string, init?: RequestInit) => {
    const key = `${init?.method ?? "GET"} ${String(input).split("?")[0]}`;
    calls.push(key);
    const route = routes[key];
    const next = Array.isArray(route) ? route.shift() : route;
    if (!next) return new Response(JSON.stringify({ detail: "missing" }), { status: 404 });
    return new Response(JSON.stringify(next.body), {
      status: next.status ?? 200,
      headers: next.headers,
    });
  }) as typeof fetch;
  return { client: new ApiClient("", impl), calls };
}

const THRESHOLD = { crop_name: "default", threshold_sm: 30, release_sm: 52.5 };
const CATALOGUE = { crops: [THRESHOLD], selected: "default" };

function feedBody(records: unknown[] = []) {
  return { body: { channel: "x", records } };
}

describe("Dashboard.selectCrop", () => {
  it("confirms the switch through a threshold re-read", async () => {
    const tomato = { crop_name: "tomato", threshold_sm: 40, release_sm: 62.5 };
    const { client, calls } = fakeService({
      "POST /crops/select": { body: tomato },
      "GET /crops/threshold": { body: tomato },
    });
    const dash = new Dashboard(client);
    dash.state.catalogue = structuredClone(CATALOGUE);
    await dash.selectCrop("tomato");
    expect(calls).toEqual(["POST /crops/select", "GET /crops/threshold"]);
    expect(dash.state.active).toEqual(tomato);
    expect(dash.state.catalogue?.selected).toBe("tomato");
    expect(dash.state.connection).toBe("ok");
  });

  it("keeps the previous selection when the service rejects it", async () => {
    const { client } = fakeService({
      "POST /crops/select": { body: { detail: "unknown crop" }, status: 404 },
    });
    const dash = new Dashboard(client);
    dash.state.active = structuredClone(THRESHOLD);
    dash.state.catalogue = structuredClone(CATALOGUE);
    await dash.selectCrop("kale");
    expect(dash.state.connection).toBe("error");
    expect(dash.state.lastError).toBe("unknown crop");
    expect(dash.state.active?.crop_name).toBe("default");
    expect(dash.state.catalogue?.selected).toBe("default");
  });
});

describe("Dashboard.poll", () => {
  const telemetryRecord = {
    entry_id: 1,
    created_at: 100,
    timestamp: "t1",
    field1: 41.5,
    field4: 0,
    field5: 0,
  };

  it("merges feeds and picks up the prediction and frame", async () => {
    const { client, calls } = fakeService({
      "GET /channels/telemetry/feed": feedBody([telemetryRecord]),
      "GET /channels/events/feed": feedBody([
        { entry_id: 1, created_at: 101, timestamp: "t1", field1: 1, field2: 29.9 },
      ]),
      "GET /crops/threshold": { body: THRESHOLD },
      "GET /nodes/node1/predictions/latest": {
        body: {
          prediction_id: 1,
          node_id: "node1",
          created_at: 102,
          timestamp: "t2",
          label: "healthy",
          confidence: 0.9,
          image_id: 5,
          lesion_box: null,
        },
      },
      "GET /nodes/node1/images/latest": {
        body: "P5 raster stand-in",
        headers: { "x-image-id": "5" },
      },
    });
    const dash = new Dashboard(client);
    await dash.poll();
    expect(dash.state.points).toHaveLength(1);
    expect(dash.state.events[0]?.action).toBe("PumpOn");
    expect(dash.state.prediction?.label).toBe("healthy");
    expect(dash.state.image?.imageId).toBe(5);
    expect(dash.state.connection).toBe("ok");
    expect(calls).toContain("GET /nodes/node1/images/latest");
  });

  it("does not refetch the frame while the image id is unchanged", async () => {
    const predictionRoute = {
      body: {
        prediction_id: 1,
        node_id: "node1",
        created_at: 102,
        timestamp: "t2",
        label: "healthy",
        confidence: 0.9,
        image_id: 5,
        lesion_box: null,
      },
    };
    const { client, calls } = fakeService({
      "GET /channels/telemetry/feed": feedBody(),
      "GET /channels/events/feed": feedBody(),
      "GET /crops/threshold": { body: THRESHOLD },
      "GET /nodes/node1/predictions/latest": predictionRoute,
      "GET /nodes/node1/images/latest": { body: "bytes", headers: { "x-image-id": "5" } },
    });
    const dash = new Dashboard(client);
    await dash.poll();
    await dash.poll();
    const imageFetches = calls.filter((c) => c.includes("images/latest"));
    expect(imageFetches).toHaveLength(1);
  });

  it("tolerates a node with no predictions yet", async () => {
    const { client } = fakeService({
      "GET /channels/telemetry/feed": feedBody(),
      "GET /channels/events/feed": feedBody(),
      "GET /crops/threshold": { body: THRESHOLD },
      "GET /nodes/node1/predictions/latest": { body: { detail: "none" }, status: 404 },
    });
    const dash = new Dashboard(client);
    await dash.poll();
    expect(dash.state.prediction).toBeNull();
    expect(dash.state.connection).toBe("ok");
  });

  it("flags the connection on failure and recovers on the next poll", async () => {
    const { client } = fakeService({
      "GET /channels/telemetry/feed": [
        { body: { detail: "boom" }, status: 500 },
        feedBody([telemetryRecord]),
      ],
      "GET /channels/events/feed": [feedBody(), feedBody()],
      "GET /crops/threshold": [{ body: THRESHOLD }, { body: THRESHOLD }],
      "GET /nodes/node1/predictions/latest": [
        { body: { detail: "none" }, status: 404 },
        { body: { detail: "none" }, status: 404 },
      ],
    });
    const dash = new Dashboard(client);
    await dash.poll();
    expect(dash.state.connection).toBe("error");
    await dash.poll();
    expect(dash.state.connection).toBe("ok");
    expect(dash.state.points).toHaveLength(1);
  });

  it("notifies the renderer after each cycle", async () => {
    const { client } = fakeService({
      "GET /channels/telemetry/feed": feedBody(),
      "GET /channels/events/feed": feedBody(),
      "GET /crops/threshold": { body: THRESHOLD },
      "GET /nodes/node1/predictions/latest": { body: { detail: "none" }, status: 404 },
    });
    let renders = 0;
    const dash = new Dashboard(client, () => {
      renders += 1;
    });
    await dash.poll();
    expect(renders).toBe(1);
  });
});
