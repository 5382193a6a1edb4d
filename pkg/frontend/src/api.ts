/** Typed client for the citation service wire format ("bpcite-api/1").
 *
 * Every view renders numbers straight from these payloads; nothing in the
 * UI recomputes similarities, probabilities, or counts on its own.
 */

export const SCHEMA = "bpcite-api/1";

export type CitationKind = "explicit" | "potential";

export interface HealthPayload {
  schema: string;
  status: string;
  version: string;
}

export interface BpRow {
  bp_id: number;
  statement: string;
  published: string | null;
}

export interface BpsPayload {
  schema: string;
  bps: BpRow[];
}

export interface TimelineBin {
  bp_id: number;
  month: string;
  total: number;
  explicit: number;
  potential: number;
}

export interface TimelinePayload {
  schema: string;
  bins: TimelineBin[];
}

export interface ParagraphRow {
  index: number;
  length: number;
  similarity: number;
}

export interface BarDocument {
  doc_id: string;
  doc_type: string;
  kind: CitationKind;
  confidence: number;
  score: number;
  topic: number | null;
  paragraphs: ParagraphRow[];
}

export type TopicKeywords = [string, number][];

export interface BarPayload {
  schema: string;
  bp_id: number;
  month: string;
  documents: BarDocument[];
  topics: TopicKeywords[];
  histogram: number[];
}

export interface LimePayload {
  doc_id: string;
  bp_id: number;
  sentence_weights: number[];
  intercept: number;
  fidelity_r2: number | null;
  n_samples: number;
  seed: number;
  degenerate: boolean;
  sentence_spans?: [number, number][];
}

export interface CitationInfo {
  kind: CitationKind;
  confidence: number;
}

export interface DocumentPayload {
  schema: string;
  doc_id: string;
  title: string;
  doc_type: string;
  date: string | null;
  rapporteur: string;
  body: string;
  sentence_spans: [number, number][];
  paragraph_spans: [number, number][];
  paragraphs: ParagraphRow[];
  common_terms: [number, number][];
  citation: CitationInfo | null;
  lime: LimePayload | null;
}

export interface FiltersPayload {
  schema: string;
  rapporteurs: string[];
  doc_types: string[];
}

export interface Filters {
  kinds?: CitationKind[];
  rapporteur?: string;
  doc_type?: string;
  tc?: number;
}

export function filterParams(filters: Filters): Record<string, string> {
  const params: Record<string, string> = {};
  if (filters.kinds && filters.kinds.length > 0) {
    params.kinds = filters.kinds.join(",");
  }
  if (filters.rapporteur !== undefined) params.rapporteur = filters.rapporteur;
  if (filters.doc_type !== undefined) params.doc_type = filters.doc_type;
  if (filters.tc !== undefined) params.tc = String(filters.tc);
  return params;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`api ${status}: ${detail}`);
  }
}

export function checkSchema<T extends { schema: string }>(payload: T, from: string): T {
  if (payload.schema !== SCHEMA) {
    throw new Error(`${from}: unsupported payload schema "${payload.schema}"`);
  }
  return payload;
}

export class Client {
  constructor(private readonly base: string = "") {}

  private async get<T extends { schema: string }>(
    path: string,
    params: Record<string, string> = {},
  ): Promise<T> {
    const query = new URLSearchParams(params).toString();
    const response = await fetch(this.base + path + (query ? `?${query}` : ""));
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (body.detail !== undefined) detail = String(body.detail);
      } catch {
        // not json, keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return checkSchema((await response.json()) as T, path);
  }

  health(): Promise<HealthPayload> {
    return this.get<HealthPayload>("/api/health");
  }

  bps(): Promise<BpsPayload> {
    return this.get<BpsPayload>("/api/bps");
  }

  timeline(filters: Filters = {}): Promise<TimelinePayload> {
    return this.get<TimelinePayload>("/api/timeline", filterParams(filters));
  }

  bar(
    bp: number,
    month: string,
    clusters: number,
    filters: Filters = {},
  ): Promise<BarPayload> {
    return this.get<BarPayload>("/api/bar", {
      bp: String(bp),
      month,
      clusters: String(clusters),
      ...filterParams(filters),
    });
  }

  document(id: string, bp: number): Promise<DocumentPayload> {
    return this.get<DocumentPayload>("/api/document", { id, bp: String(bp) });
  }

  filters(): Promise<FiltersPayload> {
    return this.get<FiltersPayload>("/api/filters");
  }
}
