/** Leaflet implementation of the renderer: evidence panes render beneath
 * the event layers, nodes are circles sized by visit count, edges are
 * lines with stroke width from the server's width_hint, and self-loops
 * become circular markers with a count badge. */

import * as L from "leaflet";

import type { MapRenderer } from "./app.js";
import {
  EDGE_COLOR, EVIDENCE_COLOR, NODE_COLOR, edgeTooltipLines, legendEntries,
  nodeRadiusPx, nodeTooltipLines, strokeWidthPx,
} from "./style.js";
import type { UiConfig } from "./config.js";
import type {
  EdgeProperties, FeatureCollection, MapDocument, NodeProperties, Position,
} from "./types.js";

function latLng(position: Position): L.LatLngExpression {
  return [position[1], position[0]]; // GeoJSON is lon-first
}

export class LeafletMapView implements MapRenderer {
  readonly map: L.Map;
  private events = L.layerGroup();
  private highlight = L.layerGroup();
  private evidence = new Map<string, L.GeoJSON>();
  private nodeCoords = new Map<string, Position>();
  private banner: HTMLElement;
  private frameLabel: HTMLElement;

  constructor(container: HTMLElement, config: UiConfig,
              center: { lat: number; lon: number }, zoom: number) {
    this.map = L.map(container, { zoomControl: true }).setView(
      [center.lat, center.lon], zoom);
    L.tileLayer(config.tileUrl, { attribution: config.tileAttribution })
      .addTo(this.map);
    this.map.createPane("evidence").style.zIndex = "350"; // beneath overlays
    this.events.addTo(this.map);
    this.highlight.addTo(this.map);
    this.banner = this.attachBanner(container);
    this.frameLabel = this.attachFrameLabel(container);
    this.attachLegend();
  }

  private attachBanner(container: HTMLElement): HTMLElement {
    const el = document.createElement("div");
    el.className = "geoflow-banner";
    el.style.display = "none";
    container.appendChild(el);
    return el;
  }

  private attachFrameLabel(container: HTMLElement): HTMLElement {
    const el = document.createElement("div");
    el.className = "geoflow-frame-label";
    el.style.display = "none";
    container.appendChild(el);
    return el;
  }

  private attachLegend(): void {
    const Legend = L.Control.extend({
      onAdd: () => {
        const el = L.DomUtil.create("div", "geoflow-legend");
        el.innerHTML = legendEntries([...this.evidence.keys()])
          .map((line) => `<div>${line}</div>`) .join("");
        return el;
      },
    });
    new Legend({ position: "bottomright" }).addTo(this.map);
  }

  renderEvents(doc: { nodes: MapDocument["nodes"]; edges: MapDocument["edges"] }): void {
    this.events.clearLayers();
    this.highlight.clearLayers();
    this.nodeCoords.clear();
    for (const feature of doc.edges.features) {
      const props = feature.properties as EdgeProperties;
      const tooltip = edgeTooltipLines(props).join("<br>");
      if (feature.geometry.type === "LineString") {
        const line = L.polyline(feature.geometry.coordinates.map(latLng), {
          color: EDGE_COLOR,
          weight: strokeWidthPx(props.width_hint),
          opacity: 0.85,
        });
        line.bindTooltip(tooltip);
        this.events.addLayer(line);
      } else {
        // self-loop: circular marker with a count badge
        const marker = L.circleMarker(latLng(feature.geometry.coordinates), {
          radius: 6 + strokeWidthPx(props.width_hint),
          color: EDGE_COLOR,
          fill: false,
          weight: 2,
        });
        marker.bindTooltip(tooltip);
        this.events.addLayer(marker);
      }
    }
    for (const feature of doc.nodes.features) {
      const props = feature.properties as NodeProperties;
      this.nodeCoords.set(props.label, feature.geometry.coordinates);
      const marker = L.circleMarker(latLng(feature.geometry.coordinates), {
        radius: nodeRadiusPx(props.visit_count),
        color: NODE_COLOR,
        fillColor: NODE_COLOR,
        fillOpacity: 0.75,
        weight: 1,
      });
      marker.bindTooltip(nodeTooltipLines(props).join("<br>"));
      this.events.addLayer(marker);
    }
  }

  renderEvidence(name: string, collection: FeatureCollection, visible: boolean): void {
    const layer = L.geoJSON(collection as never, {
      pane: "evidence",
      style: { color: EVIDENCE_COLOR, weight: 1.5, opacity: 0.8 },
    });
    this.evidence.set(name, layer);
    if (visible) layer.addTo(this.map);
  }

  setEvidenceVisible(name: string, visible: boolean): void {
    const layer = this.evidence.get(name);
    if (!layer) return;
    if (visible) layer.addTo(this.map);
    else this.map.removeLayer(layer);
  }

  highlightPath(path: string[], color: string): void {
    this.highlight.clearLayers();
    const positions = path
      .map((label) => this.nodeCoords.get(label))
      .filter((p): p is Position => p !== undefined);
    if (positions.length < 2) return;
    this.highlight.addLayer(L.polyline(positions.map(latLng), {
      color,
      weight: 5,
      opacity: 0.9,
    }));
  }

  clearHighlight(): void {
    this.highlight.clearLayers();
  }

  showError(message: string): void {
    this.banner.textContent = message;
    this.banner.classList.add("geoflow-banner-error");
    this.banner.style.display = "block";
  }

  clearError(): void {
    this.banner.style.display = "none";
    this.banner.classList.remove("geoflow-banner-error");
  }

  showNotice(message: string): void {
    this.banner.textContent = message;
    this.banner.classList.remove("geoflow-banner-error");
    this.banner.style.display = "block";
  }

  setFrameLabel(label: string): void {
    this.frameLabel.textContent = label;
    this.frameLabel.style.display = label ? "block" : "none";
  }
}
