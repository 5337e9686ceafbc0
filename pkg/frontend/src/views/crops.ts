/** Crop selection screen: catalogue dropdown, switch button, and a banner
 * confirming the threshold the controller will now act on.
 */

import type { DashboardState } from "../state.js";

export interface CropViewHandlers {
  onSelect: (cropName: string) => void;
}

function bannerText(state: DashboardState): { text: string; error: boolean } {
  if (state.connection === "error" && state.lastError) {
    return { text: `Service unreachable: ${state.lastError}`, error: true };
  }
  if (state.active) {
    const { crop_name, threshold_sm, release_sm } = state.active;
    return {
      text: `Growing ${crop_name}: irrigate at ${threshold_sm}, stop at ${release_sm}`,
      error: false,
    };
  }
  return { text: "Loading crop catalogue…", error: false };
}

export function renderCropView(
  state: DashboardState,
  handlers: CropViewHandlers,
): HTMLElement {
  const section = document.createElement("section");
  section.className = "crop-view";

  const heading = document.createElement("h2");
  heading.textContent = "Crop selection";
  section.append(heading);

  const form = document.createElement("form");
  const select = document.createElement("select");
  select.name = "crop";
  for (const crop of state.catalogue?.crops ?? []) {
    const option = document.createElement("option");
    option.value = crop.crop_name;
    option.textContent = `${crop.crop_name} (${crop.threshold_sm}–${crop.release_sm})`;
    option.selected = crop.crop_name === state.catalogue?.selected;
    select.append(option);
  }
  select.disabled = !state.catalogue;

  const button = document.createElement("button");
  button.type = "submit";
  button.textContent = "Switch crop";
  button.disabled = !state.catalogue;

  form.append(select, button);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (select.value) handlers.onSelect(select.value);
  });
  section.append(form);

  const banner = document.createElement("p");
  const { text, error } = bannerText(state);
  banner.className = error ? "banner banner-error" : "banner banner-ok";
  banner.textContent = text;
  section.append(banner);

  return section;
}
