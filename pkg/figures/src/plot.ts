/**
 * Hand-rolled SVG line plots.
 *
 * Rendering is a pure function of the input data and spec: axis limits are
 * data-driven with fixed 10% margins (taken in log space on log axes), tick
 * positions come from deterministic rules, and series colors follow a fixed
 * palette, so re-rendering the same inputs reproduces the same bytes.
 */

import { DataError } from "./csv.js";

export interface Series {
  label: string;
  points: Array<[number, number]>;
  dashed?: boolean;
}

export interface PanelOptions {
  title: string;
  xlabel: string;
  ylabel: string;
  xlog: boolean;
  ylog: boolean;
  /** draw a reference line of log-log slope -1 (error plots) or +1 */
  guideSlope?: number;
  /** fixed x-window (zoom); data outside is clipped out of the panel */
  xwindow?: [number, number];
  note?: string;
}

export const PALETTE = [
  "#1f6feb",
  "#d1242f",
  "#2da44e",
  "#bf5af2",
  "#bc4c00",
  "#0d7c8c",
  "#6e4c13",
  "#57606a",
];

const W = 640;
const H = 480;
const MARGIN = { left: 70, right: 24, top: 40, bottom: 52 };

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return String(Number(v.toPrecision(6)));
  }
  return v.toExponential(2).replace(/e([+-])0?(\d+)/, "e$1$2");
}

class Scale {
  constructor(
    readonly log: boolean,
    readonly lo: number,
    readonly hi: number,
    readonly pixLo: number,
    readonly pixHi: number
  ) {}

  map(v: number): number {
    const t = this.log
      ? (Math.log10(v) - Math.log10(this.lo)) / (Math.log10(this.hi) - Math.log10(this.lo))
      : (v - this.lo) / (this.hi - this.lo);
    return this.pixLo + t * (this.pixHi - this.pixLo);
  }

  ticks(): number[] {
    if (this.log) {
      const lo = Math.ceil(Math.log10(this.lo) - 1e-9);
      const hi = Math.floor(Math.log10(this.hi) + 1e-9);
      const out: number[] = [];
      for (let k = lo; k <= hi; k++) out.push(10 ** k);
      if (out.length >= 2) return out;
      // less than a decade: fall back to three linear ticks
      return [this.lo, Math.sqrt(this.lo * this.hi), this.hi];
    }
    const span = this.hi - this.lo;
    const step = 10 ** Math.floor(Math.log10(span / 4));
    const mult = span / 4 / step >= 5 ? 5 : span / 4 / step >= 2 ? 2 : 1;
    const s = step * mult;
    const first = Math.ceil(this.lo / s) * s;
    const out: number[] = [];
    for (let v = first; v <= this.hi + 1e-12 * span; v += s) out.push(v);
    return out;
  }
}

function extent(values: number[], log: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (log && !(v > 0)) {
      throw new DataError("log axis received a non-positive value");
    }
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo <= hi)) throw new DataError("no data points in range");
  if (log) {
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    const pad = Math.max((lhi - llo) * 0.1, 0.05);
    return [10 ** (llo - pad), 10 ** (lhi + pad)];
  }
  const pad = Math.max((hi - lo) * 0.1, Math.abs(hi) * 1e-3 + 1e-12);
  return [lo - pad, hi + pad];
}

/** Render one panel; `offsetX` shifts the whole panel (multi-panel layouts). */
export function renderPanel(series: Series[], opt: PanelOptions, offsetX = 0): string {
  let pts = series.map((s) => ({
    ...s,
    points: opt.xwindow
      ? s.points.filter(([x]) => x >= opt.xwindow![0] && x <= opt.xwindow![1])
      : s.points,
  }));
  pts = pts.filter((s) => s.points.length > 0);
  if (pts.length === 0) throw new DataError("empty selection after filtering");
  const xs = pts.flatMap((s) => s.points.map((p) => p[0]));
  const ys = pts.flatMap((s) => s.points.map((p) => p[1]));
  const [xlo, xhi] = opt.xwindow && !opt.xlog ? opt.xwindow : extent(xs, opt.xlog);
  const [ylo, yhi] = extent(ys, opt.ylog);
  const sx = new Scale(opt.xlog, xlo, xhi, offsetX + MARGIN.left, offsetX + W - MARGIN.right);
  const sy = new Scale(opt.ylog, ylo, yhi, H - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<rect x="${offsetX + MARGIN.left}" y="${MARGIN.top}" width="${
      W - MARGIN.left - MARGIN.right
    }" height="${H - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#444"/>`
  );
  for (const t of sx.ticks()) {
    const px = sx.map(t);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${H - MARGIN.bottom}" x2="${px.toFixed(2)}" y2="${
      H - MARGIN.bottom + 5
    }" stroke="#444"/>`);
    parts.push(
      `<text x="${px.toFixed(2)}" y="${H - MARGIN.bottom + 18}" font-size="11" text-anchor="middle">${fmt(
        t
      )}</text>`
    );
  }
  for (const t of sy.ticks()) {
    const py = sy.map(t);
    parts.push(`<line x1="${offsetX + MARGIN.left - 5}" y1="${py.toFixed(2)}" x2="${
      offsetX + MARGIN.left
    }" y2="${py.toFixed(2)}" stroke="#444"/>`);
    parts.push(
      `<text x="${offsetX + MARGIN.left - 8}" y="${(py + 4).toFixed(2)}" font-size="11" text-anchor="end">${fmt(
        t
      )}</text>`
    );
  }
  parts.push(
    `<text x="${offsetX + W / 2}" y="${H - 12}" font-size="13" text-anchor="middle">${escapeXml(
      opt.xlabel
    )}</text>`
  );
  parts.push(
    `<text x="${offsetX + 16}" y="${H / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 ${
      offsetX + 16
    } ${H / 2})">${escapeXml(opt.ylabel)}</text>`
  );
  parts.push(
    `<text x="${offsetX + W / 2}" y="22" font-size="14" text-anchor="middle" font-weight="bold">${escapeXml(
      opt.title
    )}</text>`
  );

  if (opt.guideSlope !== undefined && opt.xlog && opt.ylog) {
    // anchor the guide through the first series' first point, spanning x
    const [x0, y0] = pts[0].points[0];
    const guide: Array<[number, number]> = [xlo, xhi].map((x) => [
      x,
      y0 * (x / x0) ** opt.guideSlope!,
    ]);
    const d = guide
      .map(([x, y]) => `${sx.map(x).toFixed(2)},${sy.map(clampTo(y, ylo, yhi)).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline points="${d}" fill="none" stroke="#888" stroke-width="1" stroke-dasharray="6 4"/>`
    );
    parts.push(
      `<text x="${offsetX + W - MARGIN.right - 6}" y="${MARGIN.top + 14}" font-size="11" text-anchor="end" fill="#666">slope ${opt.guideSlope}</text>`
    );
  }

  pts.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const d = s.points
      .map(([x, y]) => `${sx.map(x).toFixed(2)},${sy.map(y).toFixed(2)}`)
      .join(" ");
    const dash = s.dashed ? ' stroke-dasharray="4 3"' : "";
    parts.push(`<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`);
    for (const [x, y] of s.points) {
      parts.push(
        `<circle cx="${sx.map(x).toFixed(2)}" cy="${sy.map(y).toFixed(2)}" r="2.4" fill="${color}"/>`
      );
    }
    const ly = MARGIN.top + 16 + 15 * i;
    parts.push(
      `<line x1="${offsetX + MARGIN.left + 8}" y1="${ly - 4}" x2="${
        offsetX + MARGIN.left + 30
      }" y2="${ly - 4}" stroke="${color}" stroke-width="2"${dash}/>`
    );
    parts.push(
      `<text x="${offsetX + MARGIN.left + 36}" y="${ly}" font-size="11">${escapeXml(s.label)}</text>`
    );
  });

  if (opt.note) {
    parts.push(
      `<text x="${offsetX + W / 2}" y="${MARGIN.top + 30}" font-size="12" fill="#b35900" text-anchor="middle">${escapeXml(
        opt.note
      )}</text>`
    );
  }
  return parts.join("\n");
}

function clampTo(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(v, lo), hi);
}

export function svgDocument(panels: string[], width: number): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${H}" ` +
    `viewBox="0 0 ${width} ${H}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${H}" fill="white"/>\n` +
    panels.join("\n") +
    "\n</svg>\n"
  );
}

export function panelWidth(): number {
  return W;
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
