import { describe, expect, it } from "vitest";

import {
  CHART_HEIGHT,
  CHART_WIDTH,
  PAD_X,
  PAD_Y,
  buildChart,
  moistureToY,
  timeToX,
} from "../src/chart.js";
import type { IrrigationEvent, TelemetryPoint } from "../src/state.js";

function point(entryId: number, at: number, moisture: number, relayOn = false): TelemetryPoint {
  return { entryId, at, timestamp: `t${entryId}`, moisture, relayOn, stale: false };
}

function pumpEvent(entryId: number, at: number, action: "PumpOn" | "PumpOff"): IrrigationEvent {
  return { entryId, at, timestamp: `t${entryId}`, action, moisture: 30 };
}

const NO_LINES = { threshold: null, release: null };

describe("scales", () => {
  it("pins the moisture domain to 0..100", () => {
    expect(moistureToY(0)).toBe(CHART_HEIGHT - PAD_Y);
    expect(moistureToY(100)).toBe(PAD_Y);
    expect(moistureToY(50)).toBe(CHART_HEIGHT / 2);
  });

  it("maps the time span onto the padded width", () => {
    expect(timeToX(0, 0, 10)).toBe(PAD_X);
    expect(timeToX(10, 0, 10)).toBe(CHART_WIDTH - PAD_X);
    expect(timeToX(5, 0, 10)).toBe(CHART_WIDTH / 2);
  });

  it("survives a single-sample span", () => {
    expect(Number.isFinite(timeToX(7, 7, 7))).toBe(true);
  });
});

describe("buildChart", () => {
  it("draws one polyline vertex per point", () => {
    const svg = buildChart([point(1, 0, 40), point(2, 10, 45), point(3, 20, 50)], [], NO_LINES);
    const polyline = svg.querySelector("polyline.moisture-line");
    expect(polyline?.getAttribute("points")?.split(" ")).toHaveLength(3);
  });

  it("omits the polyline when there are no points", () => {
    const svg = buildChart([], [], NO_LINES);
    expect(svg.querySelector("polyline")).toBeNull();
  });

  it("places the threshold guide at the scale position", () => {
    const svg = buildChart([point(1, 0, 40)], [], { threshold: 30, release: 52.5 });
    const guide = svg.querySelector("line.threshold-line");
    expect(guide?.getAttribute("y1")).toBe(String(moistureToY(30)));
    expect(svg.querySelector("line.release-line")).not.toBeNull();
  });

  it("marks events with their action", () => {
    const svg = buildChart(
      [point(1, 0, 40), point(2, 100, 30)],
      [pumpEvent(10, 50, "PumpOn"), pumpEvent(11, 90, "PumpOff")],
      NO_LINES,
    );
    const marks = [...svg.querySelectorAll("circle.event-mark")];
    expect(marks.map((m) => m.getAttribute("data-action"))).toEqual(["PumpOn", "PumpOff"]);
    expect(marks[0].querySelector("title")?.textContent).toContain("PumpOn");
  });

  it("shades contiguous relay-on runs", () => {
    const points = [
      point(1, 0, 40),
      point(2, 10, 39, true),
      point(3, 20, 41, true),
      point(4, 30, 43),
      point(5, 40, 42, true),
    ];
    const svg = buildChart(points, [], NO_LINES);
    const bands = [...svg.querySelectorAll("rect.relay-band")];
    expect(bands).toHaveLength(2);
    const first = bands[0];
    expect(Number(first.getAttribute("x"))).toBeCloseTo(timeToX(10, 0, 40));
  });
});
