// The explorer controller: owns the view state, issues service queries, and
// exposes the current view model. Parameter changes supersede in-flight
// queries (latest wins); an unchanged parameter issues no query at all.

import { ServiceClient, ServiceError } from "./client.js";
import {
  ExplorerState,
  MAX_FACETS,
  defaultState,
  withThreshold,
} from "./state.js";
import {
  ControlsView,
  HeatmapView,
  HistogramView,
  PatchGridView,
  SummaryView,
  buildControls,
  buildHeatmap,
  buildHistogram,
  buildPatchGrid,
  buildSummaryTable,
} from "./views.js";

export type ViewModel = HistogramView | HeatmapView | PatchGridView | SummaryView;

export class Explorer {
  state: ExplorerState;
  controls: ControlsView | null = null;
  view: ViewModel | null = null;
  error: string | null = null;

  private seq = 0;

  constructor(readonly client: ServiceClient, attribute = "nsfw") {
    this.state = defaultState(attribute);
  }

  async init(): Promise<void> {
    this.controls = buildControls(await this.client.attributes());
  }

  private begin(): number {
    this.seq += 1;
    return this.seq;
  }

  private apply(token: number, view: ViewModel): boolean {
    if (token !== this.seq) return false;   // superseded by a newer change
    this.view = view;
    this.error = null;
    return true;
  }

  private fail(token: number, err: unknown): void {
    if (token !== this.seq) return;
    this.error = err instanceof ServiceError
      ? err.message : String(err);
  }

  async showHistogram(attribute: string): Promise<void> {
    this.state = { ...this.state, attribute, view: "histogram" };
    await this.refreshHistogram();
  }

  /** Re-query after a threshold slider change; a no-op when t is unchanged. */
  async setThreshold(attribute: string, t: number): Promise<void> {
    if (this.state.thresholds[attribute] === t) return;
    this.state = withThreshold(this.state, attribute, t);
    if (this.state.view === "histogram") {
      await this.refreshHistogram();
    } else if (this.state.view === "cooccurrence" || this.state.view === "npmi") {
      await this.showHeatmap(this.state.pairX ?? "", this.state.pairY ?? "",
                             this.state.view);
    }
  }

  async setFacets(facets: string[]): Promise<void> {
    if (facets.length > MAX_FACETS) {
      throw new Error(`at most ${MAX_FACETS} facets`);
    }
    this.state = { ...this.state, facets: [...facets] };
    await this.refreshHistogram();
  }

  private async refreshHistogram(): Promise<void> {
    const token = this.begin();
    try {
      const doc = await this.client.distribution({
        attribute: this.state.attribute,
        facets: this.state.facets,
        thresholds: this.state.thresholds,
        filters: this.state.filters,
      });
      this.apply(token, buildHistogram(doc));
    } catch (err) {
      this.fail(token, err);
    }
  }

  async showHeatmap(x: string, y: string,
                    mode: "cooccurrence" | "npmi"): Promise<void> {
    this.state = { ...this.state, pairX: x, pairY: y, view: mode };
    const token = this.begin();
    try {
      const co = await this.client.cooccurrence(x, y, "raw", this.state.thresholds);
      const pm = await this.client.npmi(x, y, this.state.thresholds);
      this.apply(token, buildHeatmap(co, pm, mode));
    } catch (err) {
      this.fail(token, err);
    }
  }

  async showSummary(): Promise<void> {
    const token = this.begin();
    try {
      this.apply(token, buildSummaryTable(await this.client.summary()));
    } catch (err) {
      this.fail(token, err);
    }
  }

  /** Trusted-mode only; the control is absent otherwise, so reject early. */
  async showPatches(bin: number): Promise<void> {
    if (!this.controls?.patchControlVisible) {
      throw new Error("patch view is not available on this service");
    }
    const token = this.begin();
    try {
      this.apply(token, buildPatchGrid(await this.client.patches(bin)));
    } catch (err) {
      this.fail(token, err);
    }
  }
}
