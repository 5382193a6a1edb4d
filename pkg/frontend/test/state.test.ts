import { describe, expect, it } from "vitest";

import {
  canGoBack,
  canGoForward,
  goBack,
  goForward,
  historyPush,
  initialState,
  jumpTo,
  openDocument,
  selectBar,
  setClusters,
  setFilters,
  toggleSimilarity,
} from "../src/state.js";
import type { ViewState } from "../src/state.js";

const entry = (docId: string, bpId = 1) => ({ docId, bpId });

describe("historyPush", () => {
  it("drops a push equal to the newest entry", () => {
    const history = historyPush([entry("D1")], entry("D1"));
    expect(history).toEqual([entry("D1")]);
  });

  it("keeps revisits that are not adjacent", () => {
    let history = historyPush([], entry("D1"));
    history = historyPush(history, entry("D2"));
    history = historyPush(history, entry("D1"));
    expect(history.map((e) => e.docId)).toEqual(["D1", "D2", "D1"]);
  });

  it("treats the same document under another precedent as new", () => {
    const history = historyPush([entry("D1", 1)], entry("D1", 2));
    expect(history.length).toBe(2);
  });
});

function openThree(): ViewState {
  let state = initialState();
  state = openDocument(state, "D1", 1);
  state = openDocument(state, "D2", 1);
  state = openDocument(state, "D3", 2);
  return state;
}

describe("navigation", () => {
  it("back and forward restore the open document", () => {
    let state = openThree();
    expect(state.doc).toEqual(entry("D3", 2));
    state = goBack(state);
    expect(state.doc).toEqual(entry("D2", 1));
    state = goBack(state);
    expect(state.doc).toEqual(entry("D1", 1));
    expect(canGoBack(state)).toBe(false);
    state = goForward(state);
    state = goForward(state);
    expect(state.doc).toEqual(entry("D3", 2));
    expect(canGoForward(state)).toBe(false);
  });

  it("moving back never forgets newer entries", () => {
    let state = openThree();
    state = goBack(state);
    state = goBack(state);
    expect(state.history.length).toBe(3);
  });

  it("jumpTo reopens any entry regardless of the current selection", () => {
    let state = openThree();
    state = selectBar(state, 7, "2019-03");
    state = jumpTo(state, 0);
    expect(state.doc).toEqual(entry("D1", 1));
    expect(state.bp).toBe(7);
    expect(state.month).toBe("2019-03");
  });

  it("stays put at the ends and on bad indices", () => {
    const fresh = initialState();
    expect(goBack(fresh)).toEqual(fresh);
    expect(goForward(fresh)).toEqual(fresh);
    const state = openThree();
    expect(jumpTo(state, 99)).toEqual(state);
  });
});

describe("transitions", () => {
  it("never mutate the input state", () => {
    const state = openThree();
    const frozen = JSON.stringify(state);
    setFilters(state, { tc: 0.95, kinds: ["potential"] });
    selectBar(state, 2, "2010-01");
    setClusters(state, 4);
    toggleSimilarity(state);
    openDocument(state, "D9", 3);
    goBack(state);
    jumpTo(state, 0);
    expect(JSON.stringify(state)).toBe(frozen);
  });

  it("filter updates replace the filter object", () => {
    const state = setFilters(initialState(), { rapporteur: "min. alves" });
    expect(state.filters).toEqual({ rapporteur: "min. alves" });
    const cleared = setFilters(state, {});
    expect(cleared.filters).toEqual({});
  });

  it("toggleSimilarity flips the flag both ways", () => {
    const state = initialState();
    expect(toggleSimilarity(state).showSimilarity).toBe(!state.showSimilarity);
    expect(toggleSimilarity(toggleSimilarity(state)).showSimilarity).toBe(state.showSimilarity);
  });
});
