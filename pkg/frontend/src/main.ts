/** Entry point: wires the controller to the three screens.
 *
 * Service base URL resolution, first match wins:
 *   1. `?api=<url>` query parameter
 *   2. `data-api` attribute on <html>
 *   3. http://127.0.0.1:8000 (the default `scrop serve` address)
 */

import { ApiClient } from "./api.js";
import { Dashboard } from "./dashboard.js";
import type { DashboardState } from "./state.js";
import { renderCropView } from "./views/crops.js";
import { renderPredictionView } from "./views/prediction.js";
import { renderTrackerView } from "./views/tracker.js";

export function resolveBaseUrl(win: Window = window): string {
  const fromQuery = new URLSearchParams(win.location.search).get("api");
  if (fromQuery) return fromQuery;
  const fromAttr = win.document.documentElement.dataset.api;
  if (fromAttr) return fromAttr;
  return "http://127.0.0.1:8000";
}

export function render(root: HTMLElement, state: DashboardState, dash: Dashboard): void {
  root.replaceChildren(
    renderCropView(state, { onSelect: (name) => void dash.selectCrop(name) }),
    renderTrackerView(state),
    renderPredictionView(state),
  );
}

export function mount(root: HTMLElement, api: ApiClient): Dashboard {
  const dash = new Dashboard(api, (state) => render(root, state, dash));
  render(root, dash.state, dash);
  return dash;
}

const appRoot = document.getElementById("app");
if (appRoot) {
  const dash = mount(appRoot, new ApiClient(resolveBaseUrl()));
  void dash.start();
}
