/** Live irrigation screen: the moisture/relay chart plus a one-line readout
 * of the newest sample. Shows an empty state until the node reports.
 */

import { buildChart } from "../chart.js";
import type { DashboardState } from "../state.js";

export function renderTrackerView(state: DashboardState): HTMLElement {
  const section = document.createElement("section");
  section.className = "tracker-view";

  const heading = document.createElement("h2");
  heading.textContent = "Live irrigation";
  section.append(heading);

  if (state.points.length === 0 && state.events.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No telemetry yet — waiting for the node to report.";
    section.append(empty);
    return section;
  }

  section.append(
    buildChart(state.points, state.events, {
      threshold: state.active?.threshold_sm ?? null,
      release: state.active?.release_sm ?? null,
    }),
  );

  const latest = state.points[state.points.length - 1];
  if (latest) {
    const readout = document.createElement("p");
    readout.className = "latest-readout";
    const pump = latest.relayOn ? "pump on" : "pump off";
    const stale = latest.stale ? ", running on cached thresholds" : "";
    readout.textContent = `Soil moisture ${latest.moisture.toFixed(1)} at ${latest.timestamp} (${pump}${stale})`;
    section.append(readout);
  }

  return section;
}
