/** View state and browsing history.
 *
 * Every transition is a pure function returning a new state, so moving
 * back and forward loses nothing. The history list is recency-ordered
 * (oldest first) and never stores the same document twice in a row.
 */

import type { Filters } from "./api.js";

export interface HistoryEntry {
  docId: string;
  bpId: number;
}

export interface ViewState {
  filters: Filters;
  bp: number | null;
  month: string | null;
  doc: HistoryEntry | null;
  clusters: number;
  showSimilarity: boolean;
  history: HistoryEntry[];
  cursor: number; // position in history; -1 while nothing is open
}

export function initialState(): ViewState {
  return {
    filters: {},
    bp: null,
    month: null,
    doc: null,
    clusters: 1,
    showSimilarity: true,
    history: [],
    cursor: -1,
  };
}

function sameEntry(a: HistoryEntry, b: HistoryEntry): boolean {
  return a.docId === b.docId && a.bpId === b.bpId;
}

/** Append unless equal to the newest entry. */
export function historyPush(history: HistoryEntry[], entry: HistoryEntry): HistoryEntry[] {
  const head = history[history.length - 1];
  if (head && sameEntry(head, entry)) return history;
  return [...history, entry];
}

export function setFilters(state: ViewState, filters: Filters): ViewState {
  return { ...state, filters: { ...filters } };
}

export function selectBar(state: ViewState, bp: number, month: string): ViewState {
  return { ...state, bp, month };
}

export function setClusters(state: ViewState, clusters: number): ViewState {
  return { ...state, clusters };
}

export function toggleSimilarity(state: ViewState): ViewState {
  return { ...state, showSimilarity: !state.showSimilarity };
}

export function openDocument(state: ViewState, docId: string, bpId: number): ViewState {
  const entry = { docId, bpId };
  const history = historyPush(state.history, entry);
  return { ...state, doc: entry, history, cursor: history.length - 1 };
}

export function canGoBack(state: ViewState): boolean {
  return state.cursor > 0;
}

export function canGoForward(state: ViewState): boolean {
  return state.cursor >= 0 && state.cursor < state.history.length - 1;
}

export function goBack(state: ViewState): ViewState {
  if (!canGoBack(state)) return state;
  const cursor = state.cursor - 1;
  return { ...state, cursor, doc: state.history[cursor] ?? null };
}

export function goForward(state: ViewState): ViewState {
  if (!canGoForward(state)) return state;
  const cursor = state.cursor + 1;
  return { ...state, cursor, doc: state.history[cursor] ?? null };
}

/** Reopen any history row, whatever (bp, month) is currently selected. */
export function jumpTo(state: ViewState, index: number): ViewState {
  const entry = state.history[index];
  if (!entry) return state;
  return { ...state, cursor: index, doc: entry };
}
