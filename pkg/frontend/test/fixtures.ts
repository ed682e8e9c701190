import type {
  EdgesLayer, FramesDocument, MapDocument, NodesLayer, VariantsDocument,
} from "../src/types.js";

export function nodesLayer(labels: Array<[string, number]>): NodesLayer {
  return {
    type: "FeatureCollection",
    features: labels.map(([label, visits], i) => ({
      type: "Feature",
      geometry: { type: "Point", coordinates: [45.0 + i, 35.0 + i] },
      properties: {
        layer: "events_nodes", label, visit_count: visits, case_count: visits,
      },
    })),
  };
}

export function edgesLayer(edges: Array<[string, string, number, number]>): EdgesLayer {
  return {
    type: "FeatureCollection",
    features: edges.map(([source, target, frequency, width_hint]) => ({
      type: "Feature",
      geometry: {
        type: "LineString",
        coordinates: [[45.0, 35.0], [46.0, 36.0]],
      },
      properties: {
        layer: "events_edges", source, target, frequency,
        case_frequency: frequency, mean_duration_s: 65460,
        distance_km: 82.893, speed_kmh: 4.559, width_hint,
      },
    })),
  };
}

export function mapDocument(): MapDocument {
  return {
    nodes: nodesLayer([["Mashhad", 1], ["Tehran", 1], ["Shiraz", 1]]),
    edges: edgesLayer([["Mashhad", "Tehran", 1, 5], ["Tehran", "Shiraz", 1, 5]]),
    summary: {
      dimension: "city",
      level: null,
      collapse_repeats: true,
      filters: {
        from: null, to: null, source: "Mashhad", destination: "Shiraz",
        min_edge_frequency: 0,
      },
      trace_count: 1,
      node_count: 3,
      edge_count: 2,
      skipped_nodes: [],
      skipped_edges: [],
      unresolved_places: [],
      negative_duration_count: 0,
      provenance: [],
    },
  };
}

export function emptyMapDocument(): MapDocument {
  const doc = mapDocument();
  return {
    nodes: { type: "FeatureCollection", features: [] },
    edges: { type: "FeatureCollection", features: [] },
    summary: { ...doc.summary, trace_count: 0, node_count: 0, edge_count: 0 },
  };
}

export function variantsDocument(): VariantsDocument {
  return {
    dimension: "city",
    filters: { source: "Mashhad", destination: "Shiraz" },
    variant_count: 2,
    variants: [
      {
        path: ["Mashhad", "Tehran", "Shiraz"], case_count: 7,
        total_distance_km: 639.499, total_mean_duration_s: 130680,
        rank_by_distance: 2, rank_by_traffic: 1,
      },
      {
        path: ["Mashhad", "Shiraz"], case_count: 2,
        total_distance_km: 500.0, total_mean_duration_s: 90000,
        rank_by_distance: 1, rank_by_traffic: 2,
      },
    ],
  };
}

export function framesDocument(frameCount: number): FramesDocument {
  return {
    dimension: "city",
    collapse_repeats: true,
    bin_width_s: 86400,
    frame_count: frameCount,
    frames: Array.from({ length: frameCount }, (_, i) => ({
      window: {
        start: `2017-05-${25 + i}T00:00:00Z`,
        end: `2017-05-${26 + i}T00:00:00Z`,
      },
      trace_count: 1,
      nodes: nodesLayer([["Mashhad", 1]]),
      edges: edgesLayer([]),
    })),
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
