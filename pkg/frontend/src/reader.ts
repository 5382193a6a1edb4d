/** Document reader: full text with explanation and similarity layers. */

import type { DocumentPayload } from "./api.js";
import { esc } from "./svg.js";

export type LimeTone = "support" | "against" | "neutral";

export interface SentenceHighlight {
  sentence: number;
  weight: number;
  tone: LimeTone;
  alpha: number; // |weight| / max |weight|, 0 when all weights are 0
}

/** Diverging background layer from the explanation weights. Only documents
 * flagged as potential citations carry one; everything else gets null. */
export function limeLayer(doc: DocumentPayload): SentenceHighlight[] | null {
  if (doc.citation?.kind !== "potential" || !doc.lime) return null;
  const weights = doc.lime.sentence_weights;
  const top = weights.reduce((m, w) => Math.max(m, Math.abs(w)), 0);
  return weights.map((w, i) => ({
    sentence: i,
    weight: w,
    tone: w > 0 ? "support" : w < 0 ? "against" : "neutral",
    alpha: top > 0 ? Math.abs(w) / top : 0,
  }));
}

export function commonTermSpans(
  doc: DocumentPayload,
  flagOn: boolean,
): [number, number][] {
  return flagOn ? doc.common_terms : [];
}

export interface HoverCompare {
  paragraphIndex: number;
  paragraph: string;
  terms: [number, number][]; // common-term spans relative to the paragraph
  statement: string;
  similarity: number;
}

/** Hovering a paragraph swaps what the comparison panel shows; no view
 * state changes, so it never counts as navigation. */
export function hoverCompare(
  doc: DocumentPayload,
  statement: string,
  paragraphIndex: number,
): HoverCompare | null {
  const span = doc.paragraph_spans[paragraphIndex];
  const row = doc.paragraphs[paragraphIndex];
  if (!span || !row) return null;
  const [start, end] = span;
  const terms: [number, number][] = [];
  for (const [ts, te] of doc.common_terms) {
    if (ts >= start && te <= end) terms.push([ts - start, te - start]);
  }
  return {
    paragraphIndex,
    paragraph: doc.body.slice(start, end),
    terms,
    statement,
    similarity: row.similarity,
  };
}

export interface Segment {
  start: number;
  end: number;
  sentence: number | null; // index into sentence_spans, null between sentences
  term: boolean;
}

/** Flat walk over the body, cut at every paragraph, sentence, and term
 * boundary so each piece needs exactly one kind of wrapper. */
export function segments(
  doc: DocumentPayload,
  terms: [number, number][] = doc.common_terms,
): Segment[] {
  const cuts = new Set<number>([0, doc.body.length]);
  for (const [s, e] of doc.paragraph_spans) { cuts.add(s); cuts.add(e); }
  for (const [s, e] of doc.sentence_spans) { cuts.add(s); cuts.add(e); }
  for (const [s, e] of terms) { cuts.add(s); cuts.add(e); }
  const points = [...cuts].sort((a, b) => a - b);
  const out: Segment[] = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const start = points[i]!;
    const end = points[i + 1]!;
    let sentence: number | null = null;
    for (let s = 0; s < doc.sentence_spans.length; s++) {
      const span = doc.sentence_spans[s]!;
      if (span[0] <= start && end <= span[1]) { sentence = s; break; }
    }
    const term = terms.some(([s, e]) => s <= start && end <= e);
    out.push({ start, end, sentence, term });
  }
  return out;
}

export interface ReaderOptions {
  showCommonTerms: boolean;
}

function renderRuns(
  doc: DocumentPayload,
  segs: Segment[],
  layer: SentenceHighlight[] | null,
): string {
  const parts: string[] = [];
  let open: number | null = null;
  const close = () => {
    if (open !== null) { parts.push("</span>"); open = null; }
  };
  for (const seg of segs) {
    if (seg.sentence !== open) {
      close();
      if (seg.sentence !== null) {
        const hl = layer?.[seg.sentence];
        const tone = hl ? ` tone-${hl.tone}` : "";
        const alpha = hl ? ` style="--lime-alpha:${hl.alpha.toFixed(3)}"` : "";
        parts.push(`<span class="sentence${tone}" data-sentence="${seg.sentence}"${alpha}>`);
        open = seg.sentence;
      }
    }
    const text = esc(doc.body.slice(seg.start, seg.end));
    parts.push(seg.term ? `<u class="term">${text}</u>` : text);
  }
  close();
  return parts.join("");
}

export function renderReader(doc: DocumentPayload, opts: ReaderOptions): string {
  const layer = limeLayer(doc);
  const terms = commonTermSpans(doc, opts.showCommonTerms);
  const segs = segments(doc, terms);
  const parts: string[] = [];
  parts.push(`<article class="reader" data-doc="${esc(doc.doc_id)}">`);
  parts.push(`<header><h2>${esc(doc.title)}</h2>`);
  parts.push(
    `<p class="meta">${esc(doc.doc_type)} | ${esc(doc.date ?? "no date")} | ` +
    `${esc(doc.rapporteur)}</p>`,
  );
  if (doc.citation) {
    parts.push(
      `<p class="badge ${doc.citation.kind}">${doc.citation.kind} citation, ` +
      `confidence ${doc.citation.confidence.toFixed(3)}</p>`,
    );
  }
  if (layer && doc.lime) {
    parts.push(
      `<p class="lime-note">sentence highlights from ${doc.lime.n_samples} ` +
      `perturbation samples</p>`,
    );
  }
  parts.push("</header>");
  doc.paragraph_spans.forEach(([ps, pe], i) => {
    const sim = doc.paragraphs[i]?.similarity ?? 0;
    parts.push(`<div class="para" data-paragraph="${i}">`);
    parts.push(
      `<button class="para-rail" data-paragraph="${i}" ` +
      `title="paragraph ${i}: similarity ${sim}">` +
      `<span class="para-fill" style="width:${(sim * 100).toFixed(1)}%"></span></button>`,
    );
    const inside = segs.filter((s) => s.start >= ps && s.end <= pe);
    parts.push(`<p class="para-text">${renderRuns(doc, inside, layer)}</p>`);
    parts.push("</div>");
  });
  parts.push("</article>");
  return parts.join("");
}

export function renderHoverCompare(hc: HoverCompare, flagOn: boolean): string {
  let paragraph: string;
  if (flagOn && hc.terms.length > 0) {
    const bits: string[] = [];
    let cursor = 0;
    for (const [s, e] of hc.terms) {
      bits.push(esc(hc.paragraph.slice(cursor, s)));
      bits.push(`<u class="term">${esc(hc.paragraph.slice(s, e))}</u>`);
      cursor = e;
    }
    bits.push(esc(hc.paragraph.slice(cursor)));
    paragraph = bits.join("");
  } else {
    paragraph = esc(hc.paragraph);
  }
  return (
    `<div class="compare" data-paragraph="${hc.paragraphIndex}">` +
    `<p class="compare-sim">similarity ${hc.similarity}</p>` +
    `<blockquote class="compare-para">${paragraph}</blockquote>` +
    `<blockquote class="compare-statement">${esc(hc.statement)}</blockquote>` +
    `</div>`
  );
}
