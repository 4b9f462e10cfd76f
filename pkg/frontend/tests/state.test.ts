import { describe, expect, it } from "vitest";

import {
  beginDrag,
  commitPair,
  endDrag,
  hoverOver,
  initialState,
  openBlending,
  openReport,
  selectMaterial,
  syncMode,
} from "../src/state.js";

describe("mode mirror", () => {
  it("follows the server private to public", () => {
    let state = initialState();
    state = syncMode(state, "private");
    expect(state.mode).toBe("private");
    state = syncMode(state, "public");
    expect(state.mode).toBe("public");
  });

  it("refuses a regression to private", () => {
    const state = syncMode(initialState(), "public");
    expect(() => syncMode(state, "private")).toThrow(/regression/);
  });
});

describe("drag, hover, and the blending gate", () => {
  it("blending is unreachable without a committed pair", () => {
    const state = selectMaterial(initialState(), "m1");
    expect(() => openBlending(state)).toThrow(/committed/);
  });

  it("drag then hover then commit opens blending", () => {
    let state = selectMaterial(initialState(), "m1");
    state = beginDrag(state, "pA");
    state = hoverOver(state, "pB");
    expect(state.hoverTarget).toBe("pB");
    state = commitPair(state);
    expect(state.committedPair).toEqual({ source: "pA", target: "pB" });
    state = openBlending(state);
    expect(state.activePage).toBe("blending");
  });

  it("hovering over the drag source itself is ignored", () => {
    let state = beginDrag(selectMaterial(initialState(), "m1"), "pA");
    state = hoverOver(state, "pA");
    expect(state.hoverTarget).toBeNull();
    expect(() => commitPair(state)).toThrow();
  });

  it("ending the drag clears the transient pair", () => {
    let state = beginDrag(selectMaterial(initialState(), "m1"), "pA");
    state = hoverOver(state, "pB");
    state = endDrag(state);
    expect(state.dragSource).toBeNull();
    expect(state.hoverTarget).toBeNull();
  });

  it("other pages stay reachable", () => {
    const state = openReport(selectMaterial(initialState(), "m1"));
    expect(state.activePage).toBe("report");
  });
});
