/** The one view state: every user action maps to a state change, and any
 * state is reproducible from its URL serialization (shareable views). */

export interface ViewState {
  logId: string | null;
  dimension: string;
  level: string | null;
  collapse: boolean;
  source: string | null;
  destination: string | null;
  /** evidence layers currently shown */
  visibleLayers: string[];
  /** time-bin width in seconds; null renders the static map */
  binWidthS: number | null;
  frameIndex: number;
  center: { lat: number; lon: number };
  zoom: number;
}

export const DEFAULT_VIEW: ViewState = {
  logId: null,
  dimension: "city",
  level: null,
  collapse: true,
  source: null,
  destination: null,
  visibleLayers: [],
  binWidthS: null,
  frameIndex: 0,
  center: { lat: 32.5, lon: 53.0 },
  zoom: 5,
};

/** Serialize to URL-hash parameters (stable key order). */
export function serializeView(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.logId) params.set("log", state.logId);
  params.set("dim", state.dimension);
  if (state.level) params.set("level", state.level);
  params.set("collapse", state.collapse ? "1" : "0");
  if (state.source) params.set("src", state.source);
  if (state.destination) params.set("dst", state.destination);
  if (state.visibleLayers.length) params.set("layers", state.visibleLayers.join(","));
  if (state.binWidthS !== null) params.set("bin", String(state.binWidthS));
  if (state.frameIndex) params.set("frame", String(state.frameIndex));
  params.set("c", `${state.center.lat.toFixed(5)},${state.center.lon.toFixed(5)}`);
  params.set("z", String(state.zoom));
  return params.toString();
}

/** Rebuild a view from its serialization; unknown keys are ignored. */
export function deserializeView(hash: string): ViewState {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const state: ViewState = { ...DEFAULT_VIEW, visibleLayers: [] };
  const log = params.get("log");
  if (log) state.logId = log;
  const dim = params.get("dim");
  if (dim) state.dimension = dim;
  const level = params.get("level");
  if (level) state.level = level;
  if (params.has("collapse")) state.collapse = params.get("collapse") !== "0";
  const src = params.get("src");
  if (src) state.source = src;
  const dst = params.get("dst");
  if (dst) state.destination = dst;
  const layers = params.get("layers");
  if (layers) state.visibleLayers = layers.split(",").filter((s) => s.length > 0);
  const bin = params.get("bin");
  if (bin !== null) {
    const width = Number(bin);
    if (Number.isFinite(width) && width > 0) state.binWidthS = width;
  }
  const frame = params.get("frame");
  if (frame !== null) {
    const index = Number(frame);
    if (Number.isInteger(index) && index >= 0) state.frameIndex = index;
  }
  const center = params.get("c");
  if (center) {
    const [lat, lon] = center.split(",").map(Number);
    if (Number.isFinite(lat) && Number.isFinite(lon)) state.center = { lat, lon };
  }
  const zoom = params.get("z");
  if (zoom !== null) {
    const z = Number(zoom);
    if (Number.isFinite(z)) state.zoom = z;
  }
  return state;
}

/** Query parameters for GET /logs/{id}/map derived from the view. */
export function mapQueryParams(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("dimension", state.dimension);
  if (state.level) params.set("level", state.level);
  params.set("collapse", state.collapse ? "true" : "false");
  if (state.source && state.destination) {
    params.set("source", state.source);
    params.set("destination", state.destination);
  }
  return params;
}
