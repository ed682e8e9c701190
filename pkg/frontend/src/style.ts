/** Visual encodings. Stroke width is a strictly increasing function of the
 * server's width_hint, which is itself monotone in edge frequency, so
 * thicker always means more parcels. */

import type { EdgeProperties, NodeProperties } from "./types.js";

/** Blue is reserved for the optimal (shortest) path. */
export const OPTIMAL_PATH_COLOR = "#1d4ed8";

/** Categorical palette for the remaining variants (never blue). */
export const VARIANT_PALETTE = [
  "#e4572e", "#17a398", "#9b5de5", "#f15bb5", "#fb8b24",
  "#60992d", "#a44a3f", "#5f6caf",
];

export const EDGE_COLOR = "#475569";
export const NODE_COLOR = "#b91c1c";
export const EVIDENCE_COLOR = "#8d99ae";

const BASE_STROKE_PX = 1.0;
const STROKE_PER_HINT_PX = 0.9;

/** Strictly increasing in width_hint (and therefore in frequency). */
export function strokeWidthPx(widthHint: number): number {
  return BASE_STROKE_PX + STROKE_PER_HINT_PX * widthHint;
}

/** Node radius grows with visit count but stays readable (sqrt scale). */
export function nodeRadiusPx(visitCount: number): number {
  return 4 + 3 * Math.sqrt(Math.max(0, Math.log10(Math.max(1, visitCount)) * 2));
}

export function variantColor(rankByDistance: number, index: number): string {
  if (rankByDistance === 1) return OPTIMAL_PATH_COLOR;
  return VARIANT_PALETTE[index % VARIANT_PALETTE.length];
}

function formatDuration(seconds: number): string {
  if (seconds >= 86400) return `${(seconds / 86400).toFixed(1)} d`;
  if (seconds >= 3600) return `${(seconds / 3600).toFixed(1)} h`;
  if (seconds >= 60) return `${(seconds / 60).toFixed(1)} min`;
  return `${seconds} s`;
}

/** Tooltip lines for an edge; values are shown verbatim from the API. */
export function edgeTooltipLines(props: EdgeProperties): string[] {
  const lines = [
    `${props.source} → ${props.target}`,
    `frequency: ${props.frequency}`,
    `mean duration: ${formatDuration(props.mean_duration_s)}`,
  ];
  if (props.distance_km !== null) lines.push(`distance: ${props.distance_km} km`);
  if (props.speed_kmh !== null) lines.push(`speed: ${props.speed_kmh} km/h`);
  if (props.self_loop) lines.push(`self-loop (${props.frequency}×)`);
  return lines;
}

export function nodeTooltipLines(props: NodeProperties): string[] {
  return [
    props.label,
    `visits: ${props.visit_count}`,
    `cases: ${props.case_count}`,
  ];
}

/** Legend entries describing the width scale and layer stack. */
export function legendEntries(evidenceLayers: string[]): string[] {
  return [
    "node size ∝ visits",
    "edge width ∝ parcel frequency",
    `optimal path in blue`,
    ...evidenceLayers.map((name) => `evidence: ${name}`),
  ];
}
