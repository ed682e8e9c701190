/** Wire types for the geoflow HTTP API. Every number shown in the UI is
 * taken verbatim from these documents; the client computes no analytics. */

export type Position = [number, number]; // lon, lat

export interface PointGeometry {
  type: "Point";
  coordinates: Position;
}

export interface LineStringGeometry {
  type: "LineString";
  coordinates: Position[];
}

export type Geometry = PointGeometry | LineStringGeometry;

export interface NodeProperties {
  layer: string;
  label: string;
  visit_count: number;
  case_count: number;
}

export interface EdgeProperties {
  layer: string;
  source: string;
  target: string;
  frequency: number;
  case_frequency: number;
  mean_duration_s: number;
  distance_km: number | null;
  speed_kmh: number | null;
  width_hint: number;
  self_loop?: boolean;
}

export interface Feature<G = Geometry, P = Record<string, unknown>> {
  type: "Feature";
  geometry: G;
  properties: P;
}

export interface FeatureCollection<G = Geometry, P = Record<string, unknown>> {
  type: "FeatureCollection";
  features: Feature<G, P>[];
}

export type NodesLayer = FeatureCollection<PointGeometry, NodeProperties>;
export type EdgesLayer = FeatureCollection<Geometry, EdgeProperties>;

export interface MapSummary {
  dimension: string;
  level: string | null;
  collapse_repeats: boolean;
  filters: {
    from: string | null;
    to: string | null;
    source: string | null;
    destination: string | null;
    min_edge_frequency: number;
  };
  trace_count: number;
  node_count: number;
  edge_count: number;
  skipped_nodes: string[];
  skipped_edges: string[];
  unresolved_places: string[];
  negative_duration_count: number;
  provenance: string[];
}

export interface MapDocument {
  nodes: NodesLayer;
  edges: EdgesLayer;
  summary: MapSummary;
}

export interface VariantEntry {
  path: string[];
  case_count: number;
  total_distance_km: number | null;
  total_mean_duration_s: number | null;
  rank_by_distance: number;
  rank_by_traffic: number;
}

export interface VariantsDocument {
  dimension: string;
  filters: { source: string | null; destination: string | null };
  variant_count: number;
  variants: VariantEntry[];
}

export interface FrameEntry {
  window: { start: string; end: string };
  trace_count: number;
  nodes: NodesLayer;
  edges: EdgesLayer;
}

export interface FramesDocument {
  dimension: string;
  collapse_repeats: boolean;
  bin_width_s: number;
  frame_count: number;
  frames: FrameEntry[];
}

export interface LayerCatalogEntry {
  name: string;
  kind: string;
  feature_count: number;
}

export interface LayerCatalog {
  layers: LayerCatalogEntry[];
}

export interface UploadResponse {
  log_id: string;
  case_count: number;
  event_count: number;
  skipped_rows: number;
  unresolved_cities: string[];
  validation: { total: number };
}
