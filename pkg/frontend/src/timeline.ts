/** Global view: one row per precedent, one bar per month with citations. */

import type { BpRow, TimelineBin } from "./api.js";
import { esc, px } from "./svg.js";

export type BarColor = "blue" | "orange" | "blue-orange-border";

/** Months where every citation is explicit are plain blue, months with
 * only inferred citations are orange, mixed months are blue with an
 * orange border. The service never emits an empty month. */
export function barColor(bin: { explicit: number; potential: number }): BarColor {
  if (bin.explicit > 0 && bin.potential === 0) return "blue";
  if (bin.explicit === 0 && bin.potential > 0) return "orange";
  if (bin.explicit > 0 && bin.potential > 0) return "blue-orange-border";
  throw new Error("served timeline bins always contain at least one citation");
}

export interface TimelineBarVM extends TimelineBin {
  color: BarColor;
}

export interface TimelineRowVM {
  bp: number;
  statement: string;
  pinMonth: string | null; // publication month, drawn as a red pin
  bars: TimelineBarVM[];
}

export interface TimelineVM {
  months: string[];
  maxTotal: number;
  rows: TimelineRowVM[];
}

export function timelineViewModel(bins: TimelineBin[], bps: BpRow[]): TimelineVM {
  const months = new Set<string>();
  for (const bin of bins) months.add(bin.month);
  const rows = bps.map((bp) => {
    const pinMonth = bp.published ? bp.published.slice(0, 7) : null;
    if (pinMonth) months.add(pinMonth);
    return {
      bp: bp.bp_id,
      statement: bp.statement,
      pinMonth,
      bars: bins
        .filter((b) => b.bp_id === bp.bp_id)
        .map((b) => ({ ...b, color: barColor(b) })),
    };
  });
  const maxTotal = bins.reduce((top, b) => Math.max(top, b.total), 0);
  return { months: [...months].sort(), maxTotal, rows };
}

/** Visible month slice; zooming narrows it, panning shifts it. */
export interface MonthWindow {
  start: number;
  count: number;
}

export function fullWindow(vm: TimelineVM): MonthWindow {
  return { start: 0, count: Math.max(1, vm.months.length) };
}

export function zoomWindow(vm: TimelineVM, win: MonthWindow, factor: number): MonthWindow {
  const count = Math.max(3, Math.min(vm.months.length, Math.round(win.count * factor)));
  const center = win.start + win.count / 2;
  const start = Math.max(0, Math.min(vm.months.length - count, Math.round(center - count / 2)));
  return { start, count };
}

export function panWindow(vm: TimelineVM, win: MonthWindow, delta: number): MonthWindow {
  const start = Math.max(0, Math.min(vm.months.length - win.count, win.start + delta));
  return { ...win, start };
}

const ROW_H = 56;
const BAR_MAX_H = 40;
const LABEL_W = 70;
const COL_W = 18;

export function renderTimeline(vm: TimelineVM, win: MonthWindow): string {
  const visible = vm.months.slice(win.start, win.start + win.count);
  const index = new Map(visible.map((m, i) => [m, i]));
  const width = LABEL_W + visible.length * COL_W + 10;
  const height = vm.rows.length * ROW_H + 24;
  const parts: string[] = [];
  parts.push(
    `<svg class="timeline" viewBox="0 0 ${width} ${height}" ` +
    `width="${width}" height="${height}" role="img">`,
  );
  vm.rows.forEach((row, r) => {
    const baseY = (r + 1) * ROW_H;
    parts.push(
      `<text x="4" y="${baseY - 16}" class="bp-label">BP ${row.bp}` +
      `<title>${esc(row.statement)}</title></text>`,
    );
    parts.push(
      `<line x1="${LABEL_W}" y1="${baseY}" x2="${width - 6}" y2="${baseY}" class="axis"/>`,
    );
    if (row.pinMonth !== null && index.has(row.pinMonth)) {
      const x = LABEL_W + (index.get(row.pinMonth) ?? 0) * COL_W + COL_W / 2;
      parts.push(
        `<path class="pin" d="M ${px(x - 4)} ${baseY + 10} L ${px(x + 4)} ${baseY + 10} ` +
        `L ${px(x)} ${baseY + 2} Z"><title>published ${row.pinMonth}</title></path>`,
      );
    }
    for (const bar of row.bars) {
      const col = index.get(bar.month);
      if (col === undefined) continue;
      const h = vm.maxTotal > 0 ? (bar.total / vm.maxTotal) * BAR_MAX_H : 0;
      const x = LABEL_W + col * COL_W + 2;
      parts.push(
        `<rect class="bar ${bar.color}" data-bp="${bar.bp_id}" data-month="${bar.month}" ` +
        `x="${px(x)}" y="${px(baseY - h)}" width="${COL_W - 4}" height="${px(h)}">` +
        `<title>${bar.month}: ${bar.total} citations ` +
        `(${bar.explicit} explicit, ${bar.potential} potential)</title></rect>`,
      );
    }
  });
  visible.forEach((month, i) => {
    if (i % Math.max(1, Math.floor(visible.length / 12)) !== 0) return;
    const x = LABEL_W + i * COL_W + 2;
    parts.push(`<text x="${px(x)}" y="${height - 8}" class="month-label">${month}</text>`);
  });
  parts.push("</svg>");
  return parts.join("");
}
