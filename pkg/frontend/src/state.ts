// Explorer view state and its URL round trip. The whole state serializes
// into a query string so any view is a shareable link.

import { FilterSpec } from "./types.js";

export const MAX_FACETS = 3;

export type ViewKind = "histogram" | "boxplot" | "cooccurrence" | "npmi";

export interface ExplorerState {
  attribute: string;
  view: ViewKind;
  thresholds: Record<string, number>;
  facets: string[];
  filters: FilterSpec[];
  pairX: string | null;
  pairY: string | null;
}

export function defaultState(attribute = "nsfw"): ExplorerState {
  return {
    attribute,
    view: "histogram",
    thresholds: {},
    facets: [],
    filters: [],
    pairX: null,
    pairY: null,
  };
}

export function canAddFacet(state: ExplorerState, attribute: string): boolean {
  return state.facets.length < MAX_FACETS && !state.facets.includes(attribute);
}

/** Add a facet; a fourth selection (or a duplicate) leaves the state unchanged. */
export function addFacet(state: ExplorerState, attribute: string): ExplorerState {
  if (!canAddFacet(state, attribute)) return state;
  return { ...state, facets: [...state.facets, attribute] };
}

export function removeFacet(state: ExplorerState, attribute: string): ExplorerState {
  return { ...state, facets: state.facets.filter((f) => f !== attribute) };
}

export function withThreshold(state: ExplorerState, attribute: string,
                              t: number): ExplorerState {
  return { ...state, thresholds: { ...state.thresholds, [attribute]: t } };
}

export function serializeState(state: ExplorerState): string {
  const params = new URLSearchParams();
  params.set("attribute", state.attribute);
  params.set("view", state.view);
  if (state.facets.length) params.set("facets", state.facets.join(","));
  if (Object.keys(state.thresholds).length) {
    params.set("thresholds", JSON.stringify(state.thresholds));
  }
  if (state.filters.length) params.set("filters", JSON.stringify(state.filters));
  if (state.pairX) params.set("x", state.pairX);
  if (state.pairY) params.set("y", state.pairY);
  return params.toString();
}

export function parseState(query: string): ExplorerState {
  const params = new URLSearchParams(query);
  const state = defaultState(params.get("attribute") ?? "nsfw");
  const view = params.get("view");
  if (view === "histogram" || view === "boxplot" || view === "cooccurrence"
      || view === "npmi") {
    state.view = view;
  }
  const facets = params.get("facets");
  if (facets) state.facets = facets.split(",").slice(0, MAX_FACETS);
  const thresholds = params.get("thresholds");
  if (thresholds) state.thresholds = JSON.parse(thresholds);
  const filters = params.get("filters");
  if (filters) state.filters = JSON.parse(filters);
  state.pairX = params.get("x");
  state.pairY = params.get("y");
  return state;
}
