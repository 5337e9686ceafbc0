/** Crop health screen: latest classifier verdict with the camera frame and,
 * for diseased verdicts, the lesion bounding box overlaid at the service's
 * coordinates.
 *
 * The box is positioned with percentages relative to the frame so it lands
 * correctly however the photo is scaled; jsdom has no canvas raster, so
 * painting is skipped silently when no 2d context exists.
 */

import { decodeNetpbm } from "../ppm.js";
import type { DashboardState } from "../state.js";

export const HEALTHY_LABEL = "healthy";

function paintFrame(canvas: HTMLCanvasElement, bytes: Uint8Array): boolean {
  let decoded;
  try {
    decoded = decodeNetpbm(bytes);
  } catch {
    return false;
  }
  canvas.width = decoded.width;
  canvas.height = decoded.height;
  const ctx = canvas.getContext?.("2d");
  if (ctx) {
    ctx.putImageData(new ImageData(decoded.rgba, decoded.width, decoded.height), 0, 0);
  }
  return true;
}

export function renderPredictionView(state: DashboardState): HTMLElement {
  const section = document.createElement("section");
  section.className = "prediction-view";

  const heading = document.createElement("h2");
  heading.textContent = "Crop health";
  section.append(heading);

  const prediction = state.prediction;
  if (!prediction) {
    const pending = document.createElement("p");
    pending.className = "pending-state";
    pending.textContent = "No prediction yet — the camera reports once a day.";
    section.append(pending);
    return section;
  }

  const healthy = prediction.label === HEALTHY_LABEL;
  const status = document.createElement("p");
  status.className = healthy ? "verdict verdict-ok" : "verdict verdict-alert";
  status.textContent = `${prediction.label} — ${(prediction.confidence * 100).toFixed(1)}% confident`;
  section.append(status);

  const meta = document.createElement("p");
  meta.className = "verdict-meta";
  meta.textContent = `Frame #${prediction.image_id}, taken ${prediction.timestamp}`;
  section.append(meta);

  if (state.image && state.image.imageId === prediction.image_id) {
    const frame = document.createElement("figure");
    frame.className = "photo-frame";
    const canvas = document.createElement("canvas");
    canvas.className = "leaf-photo";
    if (paintFrame(canvas, state.image.bytes)) {
      frame.append(canvas);
      const box = prediction.lesion_box;
      if (box && canvas.width > 0 && canvas.height > 0) {
        const [x0, y0, x1, y1] = box;
        const overlay = document.createElement("div");
        overlay.className = "lesion-box";
        overlay.style.left = `${(x0 / canvas.width) * 100}%`;
        overlay.style.top = `${(y0 / canvas.height) * 100}%`;
        overlay.style.width = `${((x1 - x0) / canvas.width) * 100}%`;
        overlay.style.height = `${((y1 - y0) / canvas.height) * 100}%`;
        overlay.title = "suspected lesion area";
        frame.append(overlay);
      }
      section.append(frame);
    }
  }

  return section;
}
