/** Dashboard state and the pure helpers that keep it consistent.
 *
 * Chart series stay sorted by server creation time no matter what order
 * poll responses land in; merging is idempotent so re-fetching the same
 * feed window never duplicates a point.
 */

import type {
  CropCatalogue,
  CropProfile,
  FeedRecord,
  LatestImage,
  Prediction,
} from "./api.js";

export const POLL_INTERVAL_MS = 15_000;
export const TELEMETRY_CHANNEL = "telemetry";
export const EVENTS_CHANNEL = "events";
export const DEFAULT_NODE = "node1";
/** Chart window: enough for 50 minutes of 15 s polls with headroom. */
export const MAX_POINTS = 240;

export interface TelemetryPoint {
  entryId: number;
  at: number;
  timestamp: string;
  moisture: number;
  relayOn: boolean;
  stale: boolean;
}

export interface IrrigationEvent {
  entryId: number;
  at: number;
  timestamp: string;
  action: "PumpOn" | "PumpOff";
  moisture: number | null;
}

export type Connection = "connecting" | "ok" | "error";

export interface DashboardState {
  connection: Connection;
  lastError: string | null;
  catalogue: CropCatalogue | null;
  active: CropProfile | null;
  points: TelemetryPoint[];
  events: IrrigationEvent[];
  prediction: Prediction | null;
  image: LatestImage | null;
}

export function initialState(): DashboardState {
  return {
    connection: "connecting",
    lastError: null,
    catalogue: null,
    active: null,
    points: [],
    events: [],
    prediction: null,
    image: null,
  };
}

/** Telemetry channel convention: field1=moisture, field4=relay, field5=stale. */
export function toTelemetryPoint(rec: FeedRecord): TelemetryPoint | null {
  if (rec.field1 === null || rec.field1 === undefined) return null;
  return {
    entryId: rec.entry_id,
    at: rec.created_at,
    timestamp: rec.timestamp,
    moisture: rec.field1,
    relayOn: (rec.field4 ?? 0) >= 0.5,
    stale: (rec.field5 ?? 0) >= 0.5,
  };
}

/** Events channel convention: field1=1 pump on / 0 pump off, field2=moisture. */
export function toIrrigationEvent(rec: FeedRecord): IrrigationEvent | null {
  if (rec.field1 === null || rec.field1 === undefined) return null;
  return {
    entryId: rec.entry_id,
    at: rec.created_at,
    timestamp: rec.timestamp,
    action: rec.field1 >= 0.5 ? "PumpOn" : "PumpOff",
    moisture: rec.field2 ?? null,
  };
}

interface SeriesItem {
  entryId: number;
  at: number;
}

/**
 * Merge freshly fetched records into an existing series.
 *
 * Deduplicates on entry id (latest fetch wins), sorts ascending by server
 * time with the id as tiebreaker, and keeps only the newest `cap` items.
 */
export function mergeSeries<T extends SeriesItem>(
  existing: readonly T[],
  incoming: readonly T[],
  cap = MAX_POINTS,
): T[] {
  const byId = new Map<number, T>();
  for (const item of existing) byId.set(item.entryId, item);
  for (const item of incoming) byId.set(item.entryId, item);
  const merged = [...byId.values()].sort(
    (a, b) => a.at - b.at || a.entryId - b.entryId,
  );
  return merged.slice(Math.max(0, merged.length - cap));
}
