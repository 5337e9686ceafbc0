/** SVG time-series chart: moisture line, pump-run shading, threshold lines,
 * and irrigation event markers. Pure DOM construction, no layout queries,
 * so it renders identically under jsdom and a browser.
 */

import type { IrrigationEvent, TelemetryPoint } from "./state.js";

export const CHART_WIDTH = 640;
export const CHART_HEIGHT = 240;
export const PAD_X = 42;
export const PAD_Y = 18;

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartThresholds {
  threshold: number | null;
  release: number | null;
}

/** Moisture is a 0..100 percentage; a fixed domain keeps the guide lines still. */
export function moistureToY(value: number, height = CHART_HEIGHT): number {
  const inner = height - 2 * PAD_Y;
  return height - PAD_Y - (value / 100) * inner;
}

export function timeToX(
  at: number,
  t0: number,
  t1: number,
  width = CHART_WIDTH,
): number {
  const span = t1 - t0 || 1;
  const inner = width - 2 * PAD_X;
  return PAD_X + ((at - t0) / span) * inner;
}

function el<K extends string>(tag: K, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

function guideLine(value: number, label: string, cls: string): SVGElement[] {
  const y = moistureToY(value);
  const line = el("line", {
    class: cls,
    x1: String(PAD_X),
    x2: String(CHART_WIDTH - PAD_X),
    y1: String(y),
    y2: String(y),
    "stroke-dasharray": "6 4",
  });
  const text = el("text", {
    class: `${cls}-label`,
    x: String(CHART_WIDTH - PAD_X + 4),
    y: String(y + 4),
  });
  text.textContent = label;
  return [line, text];
}

/** Contiguous relay-on runs, as [startAt, endAt] pairs in series time. */
function relayRuns(points: readonly TelemetryPoint[]): Array<[number, number]> {
  const runs: Array<[number, number]> = [];
  let start: number | null = null;
  for (const p of points) {
    if (p.relayOn && start === null) start = p.at;
    if (!p.relayOn && start !== null) {
      runs.push([start, p.at]);
      start = null;
    }
  }
  const last = points[points.length - 1];
  if (start !== null && last) runs.push([start, last.at]);
  return runs;
}

export function buildChart(
  points: readonly TelemetryPoint[],
  events: readonly IrrigationEvent[],
  thresholds: ChartThresholds,
): SVGSVGElement {
  const svg = el("svg", {
    class: "tracker-chart",
    viewBox: `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`,
    role: "img",
  }) as SVGSVGElement;

  const times = [...points.map((p) => p.at), ...events.map((e) => e.at)];
  const t0 = times.length ? Math.min(...times) : 0;
  const t1 = times.length ? Math.max(...times) : 1;

  for (const [startAt, endAt] of relayRuns(points)) {
    const x0 = timeToX(startAt, t0, t1);
    const x1 = timeToX(endAt, t0, t1);
    svg.append(
      el("rect", {
        class: "relay-band",
        x: String(x0),
        y: String(PAD_Y),
        width: String(Math.max(x1 - x0, 1)),
        height: String(CHART_HEIGHT - 2 * PAD_Y),
      }),
    );
  }

  if (thresholds.threshold !== null) {
    svg.append(...guideLine(thresholds.threshold, "irrigate", "threshold-line"));
  }
  if (thresholds.release !== null) {
    svg.append(...guideLine(thresholds.release, "release", "release-line"));
  }

  if (points.length > 0) {
    const coords = points
      .map((p) => `${timeToX(p.at, t0, t1)},${moistureToY(p.moisture)}`)
      .join(" ");
    svg.append(el("polyline", { class: "moisture-line", points: coords, fill: "none" }));
  }

  for (const event of events) {
    const cy =
      event.moisture === null ? CHART_HEIGHT - PAD_Y : moistureToY(event.moisture);
    const mark = el("circle", {
      class: `event-mark event-${event.action.toLowerCase()}`,
      "data-action": event.action,
      cx: String(timeToX(event.at, t0, t1)),
      cy: String(cy),
      r: "5",
    });
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${event.action} at ${event.timestamp}`;
    mark.append(title);
    svg.append(mark);
  }

  // y-axis extremes, enough orientation for a 0..100 domain
  for (const v of [0, 50, 100]) {
    const label = el("text", {
      class: "axis-label",
      x: "4",
      y: String(moistureToY(v) + 4),
    });
    label.textContent = String(v);
    svg.append(label);
  }

  return svg;
}
