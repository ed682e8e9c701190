/** Browser bootstrap: builds the controls, restores the view from the URL
 * hash, and keeps the hash in sync so any view is shareable. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { loadConfig } from "./config.js";
import { LeafletMapView } from "./map-view.js";
import type { VariantRow } from "./panel.js";
import { DEFAULT_VIEW, deserializeView, serializeView } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, parent: HTMLElement, className?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  parent.appendChild(node);
  return node;
}

function renderVariantsPanel(
  container: HTMLElement, rows: VariantRow[], onSelect: (row: VariantRow) => void,
): void {
  container.innerHTML = "";
  if (rows.length === 0) {
    el("div", container, "muted").textContent = "no variants";
    return;
  }
  for (const row of rows) {
    const item = el("div", container, row.isOptimal ? "variant optimal" : "variant");
    const swatch = el("span", item, "swatch");
    swatch.style.background = row.color;
    const text = el("span", item);
    const distance = row.distanceKm === null ? "n/a" : `${row.distanceKm} km`;
    text.textContent =
      `#${row.rankByTraffic} ${row.label} — ${row.caseCount} cases, ${distance}`
      + (row.isOptimal ? " (optimal)" : "");
    item.addEventListener("click", () => onSelect(row));
  }
}

async function bootstrap(): Promise<void> {
  const config = await loadConfig();
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const sidebar = el("div", root, "sidebar");
  const mapContainer = el("div", root, "map");
  const state = window.location.hash.length > 1
    ? deserializeView(window.location.hash)
    : { ...DEFAULT_VIEW };

  const view = new LeafletMapView(mapContainer, config, state.center, state.zoom);
  const api = new ApiClient(config.apiBaseUrl);

  const variantsBox = document.createElement("div");
  const app = new App(
    state, api, view,
    { showVariants: (rows) => renderVariantsPanel(variantsBox, rows, (row) => app.highlightVariant(row)) },
    (hash) => history.replaceState(null, "", `#${hash}`),
  );
  view.map.on("moveend", () => {
    const center = view.map.getCenter();
    app.state = {
      ...app.state,
      center: { lat: center.lat, lon: center.lng },
      zoom: view.map.getZoom(),
    };
    history.replaceState(null, "", `#${serializeView(app.state)}`);
  });

  // upload
  el("h3", sidebar).textContent = "event log";
  const fileInput = el("input", sidebar);
  fileInput.type = "file";
  fileInput.accept = ".csv";
  const uploadNote = el("div", sidebar, "muted");
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    const body = new FormData();
    body.append("file", file);
    try {
      const response = await api.uploadLog(body);
      app.state = { ...app.state, logId: response.log_id };
      uploadNote.textContent =
        `${response.log_id}: ${response.case_count} cases / ${response.event_count} events`;
      await app.refreshMap();
      await app.refreshVariants();
    } catch (error) {
      view.showError(String(error));
    }
  });

  // dimension / level / endpoints
  el("h3", sidebar).textContent = "view";
  const dimension = el("select", sidebar);
  for (const value of ["city", "activity", "resource"]) {
    const option = el("option", dimension);
    option.value = value;
    option.textContent = `dimension: ${value}`;
  }
  dimension.value = app.state.dimension;
  dimension.addEventListener("change", async () => {
    app.state = { ...app.state, dimension: dimension.value };
    await app.refreshMap();
    await app.refreshVariants();
  });

  const level = el("select", sidebar);
  for (const value of ["", "office", "city", "province", "country"]) {
    const option = el("option", level);
    option.value = value;
    option.textContent = value ? `level: ${value}` : "level: none";
  }
  level.value = app.state.level ?? "";
  level.addEventListener("change", async () => {
    app.state = { ...app.state, level: level.value || null };
    await app.refreshMap();
  });

  el("h3", sidebar).textContent = "endpoints filter";
  const source = el("input", sidebar);
  source.placeholder = "source";
  const destination = el("input", sidebar);
  destination.placeholder = "destination";
  source.value = app.state.source ?? "";
  destination.value = app.state.destination ?? "";
  const applyBtn = el("button", sidebar);
  applyBtn.textContent = "apply";
  applyBtn.addEventListener("click", () => {
    void app.applyEndpointFilter(source.value || null, destination.value || null);
  });
  const clearBtn = el("button", sidebar);
  clearBtn.textContent = "clear";
  clearBtn.addEventListener("click", () => {
    source.value = "";
    destination.value = "";
    void app.applyEndpointFilter(null, null);
  });

  // variants panel
  el("h3", sidebar).textContent = "route variants";
  sidebar.appendChild(variantsBox);

  // evidence layers
  el("h3", sidebar).textContent = "evidence layers";
  const layerBox = el("div", sidebar);
  try {
    const catalog = await api.fetchLayerCatalog();
    for (const entry of catalog.layers) {
      const row = el("label", layerBox, "layer-toggle");
      const box = el("input", row);
      box.type = "checkbox";
      box.checked = app.state.visibleLayers.includes(entry.name);
      el("span", row).textContent = ` ${entry.name} (${entry.feature_count})`;
      box.addEventListener("change", () => void app.toggleLayer(entry.name, box.checked));
      if (box.checked) void app.toggleLayer(entry.name, true);
    }
  } catch {
    el("div", layerBox, "muted").textContent = "layer catalog unavailable";
  }

  // time scrubbing
  el("h3", sidebar).textContent = "time";
  const bin = el("input", sidebar);
  bin.type = "number";
  bin.placeholder = "bin width (s)";
  bin.value = app.state.binWidthS === null ? "" : String(app.state.binWidthS);
  const framesBtn = el("button", sidebar);
  framesBtn.textContent = "load frames";
  const slider = el("input", sidebar, "frame-slider");
  slider.type = "range";
  slider.min = "0";
  slider.disabled = true;
  const playBtn = el("button", sidebar);
  playBtn.textContent = "play";
  playBtn.disabled = true;

  framesBtn.addEventListener("click", async () => {
    const width = Number(bin.value);
    if (!Number.isFinite(width) || width <= 0) {
      view.showError("bin width must be a positive number of seconds");
      return;
    }
    await app.loadFrames(width);
    slider.max = String(Math.max(0, app.timeline.frameCount - 1));
    slider.value = "0";
    slider.disabled = !app.timeline.sliderEnabled;
    playBtn.disabled = !app.timeline.sliderEnabled;
    app.timeline.onChange((tl) => {
      slider.value = String(tl.frameIndex);
      playBtn.textContent = tl.playing ? "pause" : "play";
    });
  });
  slider.addEventListener("input", () => app.scrubTime(Number(slider.value)));
  playBtn.addEventListener("click", () => app.timeline.toggle());

  // initial paint for deep links
  if (app.state.logId) {
    await app.refreshMap();
    await app.refreshVariants();
  }
}

void bootstrap();
