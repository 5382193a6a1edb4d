import { describe, expect, it } from "vitest";

import type { BpsPayload, TimelinePayload } from "../src/api.js";
import {
  barColor,
  fullWindow,
  panWindow,
  renderTimeline,
  timelineViewModel,
  zoomWindow,
} from "../src/timeline.js";
import { fixture } from "./helpers.js";

const timeline = fixture<TimelinePayload>("timeline");
const bps = fixture<BpsPayload>("bps").bps;

const count = (haystack: string, needle: string) => haystack.split(needle).length - 1;

describe("barColor", () => {
  it("the recorded timeline exercises all three combinations", () => {
    const seen = new Set(timeline.bins.map(barColor));
    expect(seen).toEqual(new Set(["blue", "orange", "blue-orange-border"]));
  });

  it("explicit-only is plain blue, potential-only orange, mixed bordered", () => {
    expect(barColor({ explicit: 3, potential: 0 })).toBe("blue");
    expect(barColor({ explicit: 0, potential: 2 })).toBe("orange");
    expect(barColor({ explicit: 1, potential: 4 })).toBe("blue-orange-border");
  });

  it("refuses an empty bin", () => {
    expect(() => barColor({ explicit: 0, potential: 0 })).toThrow(/at least one citation/);
  });
});

describe("timelineViewModel", () => {
  const vm = timelineViewModel(timeline.bins, bps);

  it("keeps months sorted and includes every publication month", () => {
    expect([...vm.months]).toEqual([...vm.months].sort());
    for (const bp of bps) {
      if (bp.published) expect(vm.months).toContain(bp.published.slice(0, 7));
    }
  });

  it("pins each precedent at the month of its publication date", () => {
    const pins = vm.rows.map((r) => r.pinMonth);
    expect(pins).toEqual(bps.map((bp) => bp.published?.slice(0, 7) ?? null));
  });

  it("carries every served bin into exactly one row", () => {
    const perRow = vm.rows.map((r) => r.bars.length);
    expect(perRow.reduce((a, b) => a + b, 0)).toBe(timeline.bins.length);
    for (const row of vm.rows) {
      for (const bar of row.bars) expect(bar.bp_id).toBe(row.bp);
    }
  });

  it("tracks the tallest bar for height scaling", () => {
    expect(vm.maxTotal).toBe(Math.max(...timeline.bins.map((b) => b.total)));
  });
});

describe("month window", () => {
  const vm = timelineViewModel(timeline.bins, bps);

  it("zooming in halves the span but stops at three months", () => {
    let win = fullWindow(vm);
    const half = zoomWindow(vm, win, 0.5);
    expect(half.count).toBe(Math.round(win.count * 0.5));
    for (let i = 0; i < 20; i++) win = zoomWindow(vm, win, 0.5);
    expect(win.count).toBe(3);
  });

  it("zooming out stops at the full range", () => {
    let win = { start: 10, count: 4 };
    for (let i = 0; i < 20; i++) win = zoomWindow(vm, win, 2);
    expect(win.count).toBe(vm.months.length);
    expect(win.start).toBe(0);
  });

  it("panning clamps to both ends", () => {
    const win = { start: 0, count: 5 };
    expect(panWindow(vm, win, -10).start).toBe(0);
    expect(panWindow(vm, win, 10_000).start).toBe(vm.months.length - 5);
    expect(panWindow(vm, win, 2).start).toBe(2);
  });
});

describe("renderTimeline", () => {
  const vm = timelineViewModel(timeline.bins, bps);
  const svg = renderTimeline(vm, fullWindow(vm));

  it("draws one addressable rect per served bin", () => {
    expect(count(svg, 'class="bar ')).toBe(timeline.bins.length);
    for (const bin of timeline.bins.slice(0, 5)) {
      expect(svg).toContain(`data-bp="${bin.bp_id}" data-month="${bin.month}"`);
    }
  });

  it("classes every bar by the color rule", () => {
    for (const bin of timeline.bins) {
      expect(svg).toContain(
        `class="bar ${barColor(bin)}" data-bp="${bin.bp_id}" data-month="${bin.month}"`,
      );
    }
  });

  it("tooltips carry total, explicit, and potential counts", () => {
    const mixed = timeline.bins.find((b) => b.explicit > 0 && b.potential > 0);
    expect(mixed).toBeDefined();
    expect(svg).toContain(
      `${mixed?.month}: ${mixed?.total} citations ` +
        `(${mixed?.explicit} explicit, ${mixed?.potential} potential)`,
    );
  });

  it("draws a red pin for every published precedent", () => {
    expect(count(svg, 'class="pin"')).toBe(bps.filter((bp) => bp.published).length);
    expect(svg).toContain(`published ${bps[0]?.published?.slice(0, 7)}`);
  });

  it("only renders bars inside the visible window", () => {
    const narrow = renderTimeline(vm, { start: 0, count: 3 });
    const visible = new Set(vm.months.slice(0, 3));
    const shown = timeline.bins.filter((b) => visible.has(b.month));
    expect(count(narrow, 'class="bar ')).toBe(shown.length);
  });
});
