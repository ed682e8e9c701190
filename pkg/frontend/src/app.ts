/** Controller wiring view state to API calls and the renderer.
 *
 * Every state change maps to exactly one API request or a pure re-style;
 * evidence toggles restyle or fetch the evidence layer only, never the
 * event layers. On API failure the last good layers stay on screen and a
 * banner reports the error.
 */

import { ApiClient, ApiError } from "./api.js";
import { optimalRow, variantRows, VariantRow } from "./panel.js";
import { mapQueryParams, serializeView, ViewState } from "./state.js";
import { Timeline } from "./timeline.js";
import type { FeatureCollection, FramesDocument, MapDocument } from "./types.js";

export interface MapRenderer {
  renderEvents(doc: { nodes: MapDocument["nodes"]; edges: MapDocument["edges"] }): void;
  renderEvidence(name: string, collection: FeatureCollection, visible: boolean): void;
  setEvidenceVisible(name: string, visible: boolean): void;
  highlightPath(path: string[], color: string): void;
  clearHighlight(): void;
  showError(message: string): void;
  clearError(): void;
  showNotice(message: string): void;
  setFrameLabel(label: string): void;
}

export interface PanelSink {
  showVariants(rows: VariantRow[]): void;
}

export class App {
  private frames: FramesDocument | null = null;
  private evidenceCache = new Map<string, FeatureCollection>();
  timeline = new Timeline([]);

  constructor(
    public state: ViewState,
    private api: ApiClient,
    private renderer: MapRenderer,
    private panel: PanelSink,
    private onStateChange: (hash: string) => void = () => {},
  ) {}

  private announce(): void {
    this.onStateChange(serializeView(this.state));
  }

  /** Fetch and draw the static map for the current state. */
  async refreshMap(): Promise<void> {
    if (!this.state.logId) return;
    try {
      const doc = await this.api.fetchMap(this.state.logId, mapQueryParams(this.state));
      this.renderer.clearError();
      this.renderer.renderEvents(doc);
      if (doc.summary.node_count === 0) {
        this.renderer.showNotice(
          this.state.source ? "no matching traces" : "no data in this view");
      }
    } catch (error) {
      this.keepLastGood(error);
    }
    this.announce();
  }

  /** Endpoints filter: one /map request plus a variants-panel refresh. */
  async applyEndpointFilter(source: string | null, destination: string | null): Promise<void> {
    this.state = { ...this.state, source, destination };
    await this.refreshMap();
    await this.refreshVariants();
  }

  async refreshVariants(): Promise<void> {
    if (!this.state.logId) return;
    const params = new URLSearchParams();
    params.set("dimension", this.state.dimension);
    if (this.state.source && this.state.destination) {
      params.set("source", this.state.source);
      params.set("destination", this.state.destination);
    }
    try {
      const doc = await this.api.fetchVariants(this.state.logId, params);
      const rows = variantRows(doc);
      this.panel.showVariants(rows);
      const best = optimalRow(rows);
      if (best) this.renderer.highlightPath(best.path, best.color);
      else this.renderer.clearHighlight();
    } catch (error) {
      this.keepLastGood(error);
    }
  }

  highlightVariant(row: VariantRow): void {
    this.renderer.highlightPath(row.path, row.color);
  }

  /** Load time-binned frames and show the current one. */
  async loadFrames(binWidthS: number): Promise<void> {
    if (!this.state.logId) return;
    const params = new URLSearchParams();
    params.set("dimension", this.state.dimension);
    params.set("collapse", this.state.collapse ? "true" : "false");
    params.set("bin_s", String(binWidthS));
    try {
      const doc = await this.api.fetchFrames(this.state.logId, params);
      this.frames = doc;
      this.state = { ...this.state, binWidthS, frameIndex: 0 };
      this.timeline.pause();
      this.timeline = new Timeline(doc.frames.map((f) => f.window));
      this.timeline.onChange(() => this.showCurrentFrame());
      this.showCurrentFrame();
    } catch (error) {
      this.keepLastGood(error);
    }
    this.announce();
  }

  /** Swap the displayed window; the viewport is never reset. */
  scrubTime(frameIndex: number): void {
    if (!this.frames) return;
    this.timeline.scrub(frameIndex);
  }

  private showCurrentFrame(): void {
    if (!this.frames || this.frames.frames.length === 0) return;
    const index = this.timeline.frameIndex;
    const frame = this.frames.frames[index];
    this.state = { ...this.state, frameIndex: index };
    this.renderer.renderEvents(frame);
    this.renderer.setFrameLabel(this.timeline.view().label);
    this.announce();
  }

  /** Evidence toggle: first show fetches once, later toggles re-style. */
  async toggleLayer(name: string, visible: boolean): Promise<void> {
    const layers = new Set(this.state.visibleLayers);
    if (visible) layers.add(name);
    else layers.delete(name);
    this.state = { ...this.state, visibleLayers: [...layers].sort() };
    const cached = this.evidenceCache.get(name);
    if (cached !== undefined) {
      this.renderer.setEvidenceVisible(name, visible);
    } else if (visible) {
      try {
        const collection = await this.api.fetchLayer(name);
        this.evidenceCache.set(name, collection);
        this.renderer.renderEvidence(name, collection, true);
      } catch (error) {
        this.keepLastGood(error);
      }
    }
    this.announce();
  }

  private keepLastGood(error: unknown): void {
    if (error instanceof DOMException && error.name === "AbortError") {
      return; // superseded by a newer request: latest wins
    }
    const message = error instanceof ApiError
      ? `API error ${error.status}: ${error.message}`
      : `request failed: ${String(error)}`;
    this.renderer.showError(message);
  }
}
