/** Typed client for the telemetry service HTTP JSON API.
 *
 * Every method maps 1:1 onto a documented route; nothing here reaches the
 * simulator directly. The fetch implementation is injectable so tests can
 * run against a canned transport.
 */

export interface CropProfile {
  crop_name: string;
  threshold_sm: number;
  release_sm: number;
}

export interface CropCatalogue {
  crops: CropProfile[];
  selected: string;
}

export interface FeedRecord {
  entry_id: number;
  created_at: number;
  timestamp: string;
  field1?: number | null;
  field2?: number | null;
  field3?: number | null;
  field4?: number | null;
  field5?: number | null;
}

export interface ChannelFeed {
  channel: string;
  records: FeedRecord[];
}

export interface Prediction {
  prediction_id: number;
  node_id: string;
  created_at: number;
  timestamp: string;
  label: string;
  confidence: number;
  image_id: number;
  lesion_box: [number, number, number, number] | null;
}

export interface LatestImage {
  imageId: number | null;
  bytes: Uint8Array;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `HTTP ${resp.status}`;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // wrap instead of storing the bare reference: browsers throw
    // "illegal invocation" when window.fetch is called unbound
    const impl = fetchFn ?? fetch;
    this.fetchFn = (input, init) => impl(input, init);
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) throw new ApiError(resp.status, await errorDetail(resp));
    return resp;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    return (await this.request(path, init)).json() as Promise<T>;
  }

  listCrops(): Promise<CropCatalogue> {
    return this.json<CropCatalogue>("/crops");
  }

  selectCrop(cropName: string): Promise<CropProfile> {
    return this.json<CropProfile>("/crops/select", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ crop_name: cropName }),
    });
  }

  activeThreshold(): Promise<CropProfile> {
    return this.json<CropProfile>("/crops/threshold");
  }

  channelFeed(channel: string, results = 100): Promise<ChannelFeed> {
    return this.json<ChannelFeed>(
      `/channels/${encodeURIComponent(channel)}/feed?results=${results}`,
    );
  }

  /** Latest prediction for a node, or null when none exists yet. */
  async latestPrediction(nodeId: string): Promise<Prediction | null> {
    try {
      return await this.json<Prediction>(
        `/nodes/${encodeURIComponent(nodeId)}/predictions/latest`,
      );
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  /** Latest camera frame (raw PPM/PGM bytes), or null when none exists. */
  async latestImage(nodeId: string): Promise<LatestImage | null> {
    let resp: Response;
    try {
      resp = await this.request(`/nodes/${encodeURIComponent(nodeId)}/images/latest`);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
    const header = resp.headers.get("x-image-id");
    const imageId = header === null ? null : Number(header);
    return {
      imageId: imageId !== null && Number.isFinite(imageId) ? imageId : null,
      bytes: new Uint8Array(await resp.arrayBuffer()),
    };
  }
}
