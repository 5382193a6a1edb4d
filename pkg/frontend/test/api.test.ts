import { describe, expect, it } from "vitest";

import { SCHEMA, checkSchema, filterParams } from "../src/api.js";
import type {
  BarPayload,
  BpsPayload,
  DocumentPayload,
  FiltersPayload,
  TimelinePayload,
} from "../src/api.js";
import { fixture } from "./helpers.js";

const RECORDED = [
  "health",
  "bps",
  "timeline",
  "timeline_potential",
  "bar",
  "bar_single",
  "document_potential",
  "document_explicit",
  "filters",
];

describe("recorded payloads", () => {
  it("all carry the supported schema tag", () => {
    for (const name of RECORDED) {
      const payload = fixture<{ schema: string }>(name);
      expect(checkSchema(payload, name).schema).toBe(SCHEMA);
    }
  });

  it("parse into the shapes the views consume", () => {
    const bps = fixture<BpsPayload>("bps");
    expect(bps.bps.length).toBeGreaterThan(0);
    for (const bp of bps.bps) {
      expect(typeof bp.bp_id).toBe("number");
      expect(typeof bp.statement).toBe("string");
    }

    const timeline = fixture<TimelinePayload>("timeline");
    for (const bin of timeline.bins) {
      expect(bin.month).toMatch(/^\d{4}-\d{2}$/);
      expect(bin.total).toBe(bin.explicit + bin.potential);
    }

    const bar = fixture<BarPayload>("bar");
    expect(bar.histogram.length).toBe(10);
    expect(bar.histogram.reduce((a, b) => a + b, 0)).toBe(bar.documents.length);
    for (const doc of bar.documents) {
      expect(["explicit", "potential"]).toContain(doc.kind);
      for (const p of doc.paragraphs) {
        expect(p.similarity).toBeGreaterThanOrEqual(0);
        expect(p.similarity).toBeLessThanOrEqual(1);
      }
    }

    const doc = fixture<DocumentPayload>("document_potential");
    expect(doc.lime).not.toBeNull();
    expect(doc.lime?.sentence_weights.length).toBe(doc.sentence_spans.length);

    const filters = fixture<FiltersPayload>("filters");
    expect(filters.doc_types.length).toBeGreaterThan(0);
    expect(filters.rapporteurs.length).toBeGreaterThan(0);
  });

  it("a kind-narrowed timeline only contains that kind", () => {
    const narrowed = fixture<TimelinePayload>("timeline_potential");
    expect(narrowed.bins.length).toBeGreaterThan(0);
    for (const bin of narrowed.bins) {
      expect(bin.explicit).toBe(0);
      expect(bin.potential).toBeGreaterThan(0);
    }
  });
});

describe("checkSchema", () => {
  it("rejects a payload with a different tag", () => {
    expect(() => checkSchema({ schema: "bpcite-api/2" }, "/api/health")).toThrow(
      /unsupported payload schema/,
    );
  });
});

describe("filterParams", () => {
  it("serializes kinds as a comma list and tc as a string", () => {
    expect(filterParams({ kinds: ["explicit", "potential"], tc: 0.95 })).toEqual({
      kinds: "explicit,potential",
      tc: "0.95",
    });
  });

  it("drops unset fields and empty kind lists", () => {
    expect(filterParams({})).toEqual({});
    expect(filterParams({ kinds: [] })).toEqual({});
  });

  it("keeps rapporteur and doc_type verbatim", () => {
    expect(filterParams({ rapporteur: "min. alves", doc_type: "HC" })).toEqual({
      rapporteur: "min. alves",
      doc_type: "HC",
    });
  });
});
