/** Variants panel view-model: a ranked list with the optimal path always
 * highlighted in blue. Pure data in, pure data out; DOM glue lives in the
 * bootstrap. */

import { variantColor } from "./style.js";
import type { VariantsDocument } from "./types.js";

export interface VariantRow {
  label: string;
  path: string[];
  caseCount: number;
  distanceKm: number | null;
  meanDurationS: number | null;
  rankByDistance: number;
  rankByTraffic: number;
  color: string;
  isOptimal: boolean;
}

export function variantRows(doc: VariantsDocument): VariantRow[] {
  return doc.variants.map((v, index) => ({
    label: v.path.join(" → "),
    path: v.path,
    caseCount: v.case_count,
    distanceKm: v.total_distance_km,
    meanDurationS: v.total_mean_duration_s,
    rankByDistance: v.rank_by_distance,
    rankByTraffic: v.rank_by_traffic,
    color: variantColor(v.rank_by_distance, index),
    isOptimal: v.rank_by_distance === 1,
  }));
}

export function optimalRow(rows: VariantRow[]): VariantRow | null {
  return rows.find((row) => row.isOptimal) ?? null;
}
