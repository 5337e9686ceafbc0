/** Poll-driven controller: owns the DashboardState, talks to the ApiClient,
 * and notifies the renderer after every state change. One poll cycle is one
 * serialized batch of reads; overlapping timers collapse into a single
 * in-flight cycle.
 */

import { ApiClient } from "./api.js";
import {
  DEFAULT_NODE,
  EVENTS_CHANNEL,
  MAX_POINTS,
  POLL_INTERVAL_MS,
  TELEMETRY_CHANNEL,
  initialState,
  mergeSeries,
  toIrrigationEvent,
  toTelemetryPoint,
  type DashboardState,
} from "./state.js";

function describe(err: unknown): string {
  if (err instanceof Error) return err.message;
  return String(err);
}

export class Dashboard {
  state: DashboardState = initialState();
  private polling = false;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: DashboardState) => void = () => {},
    private readonly nodeId = DEFAULT_NODE,
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  private fail(err: unknown): void {
    this.state.connection = "error";
    this.state.lastError = describe(err);
    this.emit();
  }

  /** Load the crop catalogue and the active threshold. */
  async refreshCrops(): Promise<void> {
    try {
      const [catalogue, active] = await Promise.all([
        this.api.listCrops(),
        this.api.activeThreshold(),
      ]);
      this.state.catalogue = catalogue;
      this.state.active = active;
      this.state.connection = "ok";
      this.state.lastError = null;
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  /**
   * Submit a crop switch and confirm it by re-reading /crops/threshold.
   * On failure the previous selection stays in place.
   */
  async selectCrop(cropName: string): Promise<void> {
    try {
      await this.api.selectCrop(cropName);
      const active = await this.api.activeThreshold();
      this.state.active = active;
      if (this.state.catalogue) {
        this.state.catalogue = { ...this.state.catalogue, selected: active.crop_name };
      }
      this.state.connection = "ok";
      this.state.lastError = null;
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  /** One poll cycle: feeds, active threshold, prediction, frame on change. */
  async poll(): Promise<void> {
    if (this.polling) return;
    this.polling = true;
    try {
      const [telemetry, events, active, prediction] = await Promise.all([
        this.api.channelFeed(TELEMETRY_CHANNEL, MAX_POINTS),
        this.api.channelFeed(EVENTS_CHANNEL, MAX_POINTS),
        this.api.activeThreshold(),
        this.api.latestPrediction(this.nodeId),
      ]);
      this.state.points = mergeSeries(
        this.state.points,
        telemetry.records.map(toTelemetryPoint).filter((p) => p !== null),
      );
      this.state.events = mergeSeries(
        this.state.events,
        events.records.map(toIrrigationEvent).filter((e) => e !== null),
      );
      this.state.active = active;
      // fetch the frame only when the prediction points at a new image
      if (prediction && prediction.image_id !== this.state.image?.imageId) {
        this.state.image = await this.api.latestImage(this.nodeId);
      }
      this.state.prediction = prediction;
      this.state.connection = "ok";
      this.state.lastError = null;
      this.emit();
    } catch (err) {
      this.fail(err);
    } finally {
      this.polling = false;
    }
  }

  /** Initial load plus a recurring poll every `intervalMs`. */
  async start(intervalMs = POLL_INTERVAL_MS): Promise<void> {
    await this.refreshCrops();
    await this.poll();
    this.timer = setInterval(() => {
      void this.poll();
    }, intervalMs);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }
}
