/** Paragraph similarities view: clustered stacks of per-paragraph bars. */

import type { BarDocument, BarPayload, TopicKeywords } from "./api.js";
import { esc, px } from "./svg.js";

export interface ClusterVM {
  topic: number;
  keywords: TopicKeywords;
  documents: BarDocument[]; // payload order, which is already ranked
  histogram: number[];
}

/** Same decade binning the service uses for its selection-wide histogram;
 * with a single cluster this reproduces payload.histogram exactly. */
export function scoreHistogram(documents: { score: number }[]): number[] {
  const bins = new Array<number>(10).fill(0);
  for (const doc of documents) {
    const decade = Math.min(Math.floor(doc.score * 10), 9);
    bins[decade] = (bins[decade] ?? 0) + 1;
  }
  return bins;
}

export function clusterViewModel(payload: BarPayload): ClusterVM[] {
  return payload.topics.map((keywords, topic) => {
    const documents = payload.documents.filter((d) => d.topic === topic);
    return { topic, keywords, documents, histogram: scoreHistogram(documents) };
  });
}

export const CLUSTERS_PER_PAGE = 3;

export interface ClusterPage<T> {
  visible: T[];
  page: number;
  pages: number;
}

/** Panels sit side by side; beyond three clusters we page instead of
 * shrinking the panels. */
export function pageClusters<T>(
  clusters: T[],
  page: number,
  perPage: number = CLUSTERS_PER_PAGE,
): ClusterPage<T> {
  const pages = Math.max(1, Math.ceil(clusters.length / perPage));
  const clamped = Math.min(Math.max(page, 0), pages - 1);
  return {
    visible: clusters.slice(clamped * perPage, (clamped + 1) * perPage),
    page: clamped,
    pages,
  };
}

export interface ParagraphBarVM {
  index: number;
  width: number; // fraction of the longest paragraph in the selection
  intensity: number; // the similarity field, used as fill opacity
  kind: BarDocument["kind"];
}

export function paragraphBars(doc: BarDocument, maxLength: number): ParagraphBarVM[] {
  return doc.paragraphs.map((p) => ({
    index: p.index,
    width: maxLength > 0 ? p.length / maxLength : 0,
    intensity: p.similarity,
    kind: doc.kind,
  }));
}

const PANEL_W = 300;
const DOC_ROW_H = 26;
const CLOUD_H = 72;
const HIST_H = 30;

function renderCloud(keywords: TopicKeywords, x: number): string {
  const top = keywords.length > 0 ? Math.max(...keywords.map(([, w]) => w)) : 0;
  const parts: string[] = [];
  keywords.forEach(([term, weight], i) => {
    const size = top > 0 ? 10 + (weight / top) * 8 : 10;
    const cx = x + 8 + (i % 2) * (PANEL_W / 2 - 10);
    const cy = 16 + Math.floor(i / 2) * 13;
    parts.push(
      `<text x="${px(cx)}" y="${px(cy)}" class="cloud-term" ` +
      `font-size="${px(size)}">${esc(term)}</text>`,
    );
  });
  return parts.join("");
}

function renderHistogram(histogram: number[], x: number, y: number): string {
  const top = Math.max(1, ...histogram);
  const w = (PANEL_W - 20) / histogram.length;
  return histogram
    .map((count, i) => {
      const h = (count / top) * (HIST_H - 6);
      return (
        `<rect class="hist" x="${px(x + 10 + i * w)}" y="${px(y + HIST_H - h)}" ` +
        `width="${px(w - 1)}" height="${px(h)}"><title>${count} documents</title></rect>`
      );
    })
    .join("");
}

export function renderParagraphView(payload: BarPayload, page: number): string {
  const { visible, page: current, pages } = pageClusters(clusterViewModel(payload), page);
  const maxLength = Math.max(
    1,
    ...payload.documents.flatMap((d) => d.paragraphs.map((p) => p.length)),
  );
  const maxRows = Math.max(1, ...visible.map((c) => c.documents.length));
  const height = CLOUD_H + HIST_H + maxRows * DOC_ROW_H + 30;
  const width = Math.max(1, visible.length) * (PANEL_W + 12);
  const parts: string[] = [];
  parts.push(
    `<svg class="paragraph-view" viewBox="0 0 ${width} ${height}" ` +
    `width="${width}" height="${height}" data-page="${current}" data-pages="${pages}">`,
  );
  visible.forEach((cluster, c) => {
    const x0 = c * (PANEL_W + 12);
    parts.push(`<g class="cluster" data-topic="${cluster.topic}">`);
    parts.push(
      `<rect class="panel" x="${px(x0)}" y="0" width="${PANEL_W}" height="${px(height - 4)}"/>`,
    );
    parts.push(renderCloud(cluster.keywords, x0));
    parts.push(renderHistogram(cluster.histogram, x0, CLOUD_H));
    cluster.documents.forEach((doc, row) => {
      const y = CLOUD_H + HIST_H + 14 + row * DOC_ROW_H;
      parts.push(
        `<text x="${px(x0 + 8)}" y="${px(y + 12)}" class="doc-label" ` +
        `data-doc="${esc(doc.doc_id)}">${esc(doc.doc_id)}` +
        `<title>${esc(doc.doc_type)} score ${doc.score} (${doc.kind})</title></text>`,
      );
      let cursor = x0 + 78;
      for (const bar of paragraphBars(doc, maxLength)) {
        const w = Math.max(2, bar.width * (PANEL_W - 90));
        parts.push(
          `<rect class="pbar ${bar.kind}" data-doc="${esc(doc.doc_id)}" ` +
          `data-paragraph="${bar.index}" x="${px(cursor)}" y="${px(y)}" ` +
          `width="${px(w)}" height="${DOC_ROW_H - 10}" fill-opacity="${px(bar.intensity)}">` +
          `<title>paragraph ${bar.index}: similarity ${bar.intensity}</title></rect>`,
        );
        cursor += w + 2;
      }
    });
    parts.push("</g>");
  });
  parts.push("</svg>");
  return parts.join("");
}
