/** Client view state. The mode mirrors the server and is monotonic
 * (private -> public only); the blending page is reachable only once a
 * drag source and hover target are committed as a pair.
 */

import type { Mode } from "./types.js";

export type Page = "reading" | "blending" | "report";

export interface ViewState {
  mode: Mode;
  materialId: string | null;
  dragSource: string | null;
  hoverTarget: string | null;
  committedPair: { source: string; target: string } | null;
  activePage: Page;
}

export function initialState(): ViewState {
  return {
    mode: "private",
    materialId: null,
    dragSource: null,
    hoverTarget: null,
    committedPair: null,
    activePage: "reading",
  };
}

export function selectMaterial(state: ViewState, materialId: string): ViewState {
  return { ...initialState(), mode: state.mode, materialId };
}

/** Mirror the server's mode; a public -> private regression on the server
 * side would be a contract violation, so the mirror refuses to go back. */
export function syncMode(state: ViewState, serverMode: Mode): ViewState {
  if (state.mode === "public" && serverMode === "private") {
    throw new Error("mode regression: server reported private after public");
  }
  return { ...state, mode: serverMode };
}

export function beginDrag(state: ViewState, postId: string): ViewState {
  return { ...state, dragSource: postId, hoverTarget: null, committedPair: null };
}

export function hoverOver(state: ViewState, postId: string): ViewState {
  if (!state.dragSource || state.dragSource === postId) {
    return { ...state, hoverTarget: null };
  }
  return { ...state, hoverTarget: postId };
}

export function endDrag(state: ViewState): ViewState {
  return { ...state, dragSource: null, hoverTarget: null };
}

/** Dropping onto a hovered post commits the pair for blending. */
export function commitPair(state: ViewState): ViewState {
  if (!state.dragSource || !state.hoverTarget) {
    throw new Error("no drag/hover pair to commit");
  }
  return {
    ...state,
    committedPair: { source: state.dragSource, target: state.hoverTarget },
    dragSource: null,
    hoverTarget: null,
  };
}

export function openBlending(state: ViewState): ViewState {
  if (!state.committedPair) {
    throw new Error("blending page requires a committed drag/hover pair");
  }
  return { ...state, activePage: "blending" };
}

export function openReading(state: ViewState): ViewState {
  return { ...state, activePage: "reading" };
}

export function openReport(state: ViewState): ViewState {
  return { ...state, activePage: "report" };
}
