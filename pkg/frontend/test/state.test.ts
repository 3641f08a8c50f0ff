import { describe, expect, it } from "vitest";

import {
  addFacet,
  canAddFacet,
  defaultState,
  parseState,
  removeFacet,
  serializeState,
  withThreshold,
} from "../src/state.js";

describe("explorer state", () => {
  it("round-trips through the URL form", () => {
    let state = defaultState("nsfw");
    state = withThreshold(state, "nsfw", 0.35);
    state = addFacet(state, "scene_class");
    state = addFacet(state, "label_csam");
    state.filters = [{ attribute: "scene_class", op: "ne", value: "beach" }];
    state.view = "cooccurrence";
    state.pairX = "scene_class";
    state.pairY = "label_csam";

    const restored = parseState(serializeState(state));
    expect(restored).toEqual(state);
  });

  it("round-trips the default state", () => {
    const state = defaultState("luminance");
    expect(parseState(serializeState(state))).toEqual(state);
  });

  it("round-trips many generated states", () => {
    const views = ["histogram", "boxplot", "cooccurrence", "npmi"] as const;
    for (let i = 0; i < 50; i++) {
      const state = defaultState(`attr${i % 7}`);
      state.view = views[i % views.length];
      for (let f = 0; f < i % 4; f++) state.facets.push(`facet${f}`);
      if (i % 2) state.thresholds = { nsfw: (i % 10) / 10 };
      if (i % 3) {
        state.filters = [{ attribute: "a", op: "ge", value: i }];
      }
      expect(parseState(serializeState(state))).toEqual(state);
    }
  });

  it("rejects a fourth facet by leaving state unchanged", () => {
    let state = defaultState();
    state = addFacet(state, "a");
    state = addFacet(state, "b");
    state = addFacet(state, "c");
    expect(canAddFacet(state, "d")).toBe(false);
    const after = addFacet(state, "d");
    expect(after).toBe(state);
    expect(after.facets).toEqual(["a", "b", "c"]);
  });

  it("ignores duplicate facet selections", () => {
    let state = defaultState();
    state = addFacet(state, "a");
    expect(addFacet(state, "a").facets).toEqual(["a"]);
  });

  it("removes facets", () => {
    let state = defaultState();
    state = addFacet(state, "a");
    state = addFacet(state, "b");
    expect(removeFacet(state, "a").facets).toEqual(["b"]);
  });

  it("caps parsed facets at three", () => {
    const state = parseState("attribute=x&facets=a,b,c,d,e");
    expect(state.facets).toEqual(["a", "b", "c"]);
  });
});
