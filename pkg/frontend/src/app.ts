/** Browser bootstrap: wires the three linked views to the citation service.
 *
 * All data access goes through the typed client; view modules render
 * strings and this file owns the DOM, the state transitions, and the
 * latest-selection-wins handling for in-flight requests.
 */

import { ApiError, Client } from "./api.js";
import type {
  BarPayload,
  BpRow,
  CitationKind,
  DocumentPayload,
  Filters,
  FiltersPayload,
} from "./api.js";
import {
  canGoBack,
  canGoForward,
  goBack,
  goForward,
  initialState,
  jumpTo,
  openDocument,
  selectBar,
  setClusters,
  setFilters,
  toggleSimilarity,
} from "./state.js";
import type { ViewState } from "./state.js";
import {
  fullWindow,
  panWindow,
  renderTimeline,
  timelineViewModel,
  zoomWindow,
} from "./timeline.js";
import type { MonthWindow, TimelineVM } from "./timeline.js";
import { clusterViewModel, pageClusters, renderParagraphView } from "./paragraphs.js";
import { hoverCompare, renderHoverCompare, renderReader } from "./reader.js";
import { esc } from "./svg.js";

class App {
  private state: ViewState = initialState();
  private readonly client: Client;
  private bps: BpRow[] = [];
  private vm: TimelineVM | null = null;
  private win: MonthWindow = { start: 0, count: 1 };
  private bar: BarPayload | null = null;
  private doc: DocumentPayload | null = null;
  private page = 0;
  // bumped per fetch; a response only lands if its token is still current
  private readonly seq = { timeline: 0, bar: 0, doc: 0 };

  constructor(private readonly root: Document) {
    const search = root.location ? root.location.search : "";
    const base = new URLSearchParams(search).get("api") ?? "";
    this.client = new Client(base);
  }

  async start(): Promise<void> {
    this.wire();
    try {
      const [bps, filters] = await Promise.all([this.client.bps(), this.client.filters()]);
      this.bps = bps.bps;
      this.renderFilterControls(filters);
    } catch (err) {
      this.fail("filters", err);
      return;
    }
    await this.refreshTimeline();
  }

  private panel(id: string): HTMLElement {
    const el = this.root.getElementById(id);
    if (!el) throw new Error(`missing shell element #${id}`);
    return el;
  }

  private fail(id: string, err: unknown): void {
    const message = err instanceof ApiError ? err.message : String(err);
    this.panel(id).innerHTML = `<p class="error">${esc(message)}</p>`;
  }

  private renderFilterControls(filters: FiltersPayload): void {
    const options = (values: string[]) =>
      ['<option value="">all</option>']
        .concat(values.map((v) => `<option value="${esc(v)}">${esc(v)}</option>`))
        .join("");
    this.panel("filters").innerHTML = [
      '<label><input type="checkbox" data-kind="explicit" checked> explicit</label>',
      '<label><input type="checkbox" data-kind="potential" checked> potential</label>',
      `<label>rapporteur <select id="f-rapporteur">${options(filters.rapporteurs)}</select></label>`,
      `<label>type <select id="f-doctype">${options(filters.doc_types)}</select></label>`,
      '<label>confidence floor <input id="f-tc" type="number" min="0" max="1" step="0.05"></label>',
      '<label>clusters <input id="f-clusters" type="number" min="1" step="1" value="1"></label>',
      '<label><input type="checkbox" id="f-similarity" checked> show text similarity</label>',
    ].join("\n");
  }

  private readFilters(): Filters {
    const checked: CitationKind[] = [];
    for (const kind of ["explicit", "potential"] as const) {
      const box = this.root.querySelector<HTMLInputElement>(`input[data-kind="${kind}"]`);
      if (box && box.checked) checked.push(kind);
    }
    const filters: Filters = {};
    // one box checked narrows to that kind; none checked means no preference
    if (checked.length === 1) filters.kinds = checked;
    const rapporteur = this.root.querySelector<HTMLSelectElement>("#f-rapporteur");
    if (rapporteur && rapporteur.value !== "") filters.rapporteur = rapporteur.value;
    const docType = this.root.querySelector<HTMLSelectElement>("#f-doctype");
    if (docType && docType.value !== "") filters.doc_type = docType.value;
    const tc = this.root.querySelector<HTMLInputElement>("#f-tc");
    if (tc && tc.value !== "") filters.tc = Number(tc.value);
    return filters;
  }

  private async refreshTimeline(): Promise<void> {
    const token = ++this.seq.timeline;
    try {
      const payload = await this.client.timeline(this.state.filters);
      if (token !== this.seq.timeline) return;
      this.vm = timelineViewModel(payload.bins, this.bps);
      this.win = fullWindow(this.vm);
      this.renderTimelinePanel();
    } catch (err) {
      if (token === this.seq.timeline) this.fail("timeline", err);
    }
  }

  private async refreshBar(): Promise<void> {
    if (this.state.bp === null || this.state.month === null) return;
    const token = ++this.seq.bar;
    try {
      const payload = await this.client.bar(
        this.state.bp,
        this.state.month,
        this.state.clusters,
        this.state.filters,
      );
      if (token !== this.seq.bar) return;
      this.bar = payload;
      this.page = 0;
      this.renderParagraphPanel();
    } catch (err) {
      if (token === this.seq.bar) this.fail("paragraphs", err);
    }
  }

  private async refreshDoc(): Promise<void> {
    const entry = this.state.doc;
    if (!entry) {
      this.panel("reader").innerHTML = '<p class="hint">open a document to read it</p>';
      return;
    }
    const token = ++this.seq.doc;
    try {
      const payload = await this.client.document(entry.docId, entry.bpId);
      if (token !== this.seq.doc) return;
      this.doc = payload;
      this.renderReaderPanel();
    } catch (err) {
      if (token === this.seq.doc) this.fail("reader", err);
    }
  }

  private renderTimelinePanel(): void {
    if (!this.vm) return;
    this.panel("timeline").innerHTML = [
      '<div class="toolbar">',
      '<button id="zoom-in">zoom in</button>',
      '<button id="zoom-out">zoom out</button>',
      '<button id="pan-left">&larr;</button>',
      '<button id="pan-right">&rarr;</button>',
      "</div>",
      renderTimeline(this.vm, this.win),
    ].join("");
  }

  private renderParagraphPanel(): void {
    const panel = this.panel("paragraphs");
    if (!this.bar) {
      panel.innerHTML = '<p class="hint">click a timeline bar to inspect its month</p>';
      return;
    }
    const paged = pageClusters(clusterViewModel(this.bar), this.page);
    this.page = paged.page;
    const pager =
      paged.pages > 1
        ? `<button data-page-prev ${paged.page === 0 ? "disabled" : ""}>&larr;</button>` +
          ` clusters page ${paged.page + 1}/${paged.pages} ` +
          `<button data-page-next ${paged.page === paged.pages - 1 ? "disabled" : ""}>&rarr;</button>`
        : "";
    panel.innerHTML = [
      `<div class="toolbar">BP ${this.bar.bp_id}, ${esc(this.bar.month)}: ` +
        `${this.bar.documents.length} documents ${pager}</div>`,
      renderParagraphView(this.bar, this.page),
    ].join("");
  }

  private statementFor(bpId: number): string {
    const bp = this.bps.find((b) => b.bp_id === bpId);
    return bp ? bp.statement : "";
  }

  private renderReaderPanel(): void {
    if (!this.doc || !this.state.doc) return;
    this.panel("reader").innerHTML = [
      '<div id="compare"></div>',
      renderReader(this.doc, { showCommonTerms: this.state.showSimilarity }),
    ].join("");
    this.showCompare(0);
  }

  private showCompare(paragraphIndex: number): void {
    const target = this.root.getElementById("compare");
    if (!target || !this.doc || !this.state.doc) return;
    const hc = hoverCompare(this.doc, this.statementFor(this.state.doc.bpId), paragraphIndex);
    target.innerHTML = hc ? renderHoverCompare(hc, this.state.showSimilarity) : "";
  }

  private renderHistoryPanel(): void {
    const rows = this.state.history
      .map((entry, i) => ({ entry, i }))
      .reverse()
      .map(
        ({ entry, i }) =>
          `<li data-index="${i}"${i === this.state.cursor ? ' class="current"' : ""}>` +
          `${esc(entry.docId)} vs BP ${entry.bpId}</li>`,
      )
      .join("");
    this.panel("history").innerHTML = [
      "<h3>history</h3>",
      `<button id="nav-back" ${canGoBack(this.state) ? "" : "disabled"}>back</button>`,
      `<button id="nav-forward" ${canGoForward(this.state) ? "" : "disabled"}>forward</button>`,
      `<ol class="history-list">${rows}</ol>`,
    ].join("");
  }

  private wire(): void {
    this.panel("filters").addEventListener("change", (e) => {
      const t = e.target instanceof Element ? e.target : null;
      if (!t) return;
      if (t.id === "f-clusters") {
        const clusters = Math.max(1, Math.trunc(Number((t as HTMLInputElement).value)) || 1);
        this.state = setClusters(this.state, clusters);
        void this.refreshBar();
        return;
      }
      if (t.id === "f-similarity") {
        this.state = toggleSimilarity(this.state);
        this.renderReaderPanel();
        return;
      }
      this.state = setFilters(this.state, this.readFilters());
      void this.refreshTimeline();
      void this.refreshBar();
    });

    this.panel("timeline").addEventListener("click", (e) => {
      const t = e.target instanceof Element ? e.target : null;
      if (!t) return;
      const button = t.closest("button");
      if (button && this.vm) {
        if (button.id === "zoom-in") this.win = zoomWindow(this.vm, this.win, 0.5);
        if (button.id === "zoom-out") this.win = zoomWindow(this.vm, this.win, 2);
        if (button.id === "pan-left") this.win = panWindow(this.vm, this.win, -3);
        if (button.id === "pan-right") this.win = panWindow(this.vm, this.win, 3);
        this.renderTimelinePanel();
        return;
      }
      const bar = t.closest("rect.bar");
      if (!bar) return;
      const bp = Number(bar.getAttribute("data-bp"));
      const month = bar.getAttribute("data-month");
      if (!Number.isFinite(bp) || !month) return;
      this.state = selectBar(this.state, bp, month);
      void this.refreshBar();
    });

    this.panel("paragraphs").addEventListener("click", (e) => {
      const t = e.target instanceof Element ? e.target : null;
      if (!t) return;
      if (t.closest("[data-page-prev]")) {
        this.page -= 1;
        this.renderParagraphPanel();
        return;
      }
      if (t.closest("[data-page-next]")) {
        this.page += 1;
        this.renderParagraphPanel();
        return;
      }
      const node = t.closest("[data-doc]");
      const docId = node ? node.getAttribute("data-doc") : null;
      if (!docId || this.state.bp === null) return;
      this.state = openDocument(this.state, docId, this.state.bp);
      this.renderHistoryPanel();
      void this.refreshDoc();
    });

    this.panel("reader").addEventListener("mouseover", (e) => {
      const t = e.target instanceof Element ? e.target : null;
      const para = t ? t.closest("[data-paragraph]") : null;
      if (!para) return;
      const index = Number(para.getAttribute("data-paragraph"));
      if (Number.isInteger(index)) this.showCompare(index);
    });

    this.panel("history").addEventListener("click", (e) => {
      const t = e.target instanceof Element ? e.target : null;
      if (!t) return;
      if (t.closest("#nav-back")) {
        this.state = goBack(this.state);
      } else if (t.closest("#nav-forward")) {
        this.state = goForward(this.state);
      } else {
        const item = t.closest("li[data-index]");
        if (!item) return;
        const index = Number(item.getAttribute("data-index"));
        if (!Number.isInteger(index)) return;
        this.state = jumpTo(this.state, index);
      }
      this.renderHistoryPanel();
      void this.refreshDoc();
    });
  }
}

export function boot(root: Document): void {
  void new App(root).start();
}

if (typeof document !== "undefined") boot(document);
