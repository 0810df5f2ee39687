/** Scene assembly: fixed-size deterministic plot with axes, ticks, series
 * polylines, and a legend. */

import { FigureModel, Series } from "./figures.js";
import { Color, GLYPH_H, GLYPH_W, Raster } from "./raster.js";

export const WIDTH = 720;
export const HEIGHT = 480;

const MARGIN = { left: 70, right: 20, top: 30, bottom: 48 };
const AXIS: Color = [40, 40, 40];
const GRID: Color = [225, 225, 225];
const TEXT: Color = [30, 30, 30];

interface Scale {
  toPx(v: number): number;
  ticks: number[];
}

function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
    lo -= 1;
  }
  const span = hi - lo;
  const step = niceStep(span);
  const t0 = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = t0; t <= hi + 1e-12 * span; t += step) ticks.push(t);
  return {
    toPx: (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo),
    ticks,
  };
}

function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi === lo ? lo * 10 : hi);
  const ticks: number[] = [];
  for (let d = Math.ceil(llo - 1e-9); d <= Math.floor(lhi + 1e-9); d++) ticks.push(10 ** d);
  if (ticks.length < 2) {
    // fewer than two decades visible: fall back to linear tick positions
    ticks.length = 0;
    const lin = linearScale(lo, hi, 0, 1);
    ticks.push(...lin.ticks);
  }
  return {
    toPx: (v) => pxLo + ((Math.log10(v) - llo) / (lhi - llo)) * (pxHi - pxLo),
    ticks,
  };
}

function niceStep(span: number): number {
  const raw = span / 6;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  const nice = norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10;
  return nice * mag;
}

function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 10000 || a < 0.001) return v.toExponential(0).replace("e+", "e");
  const s = Number(v.toPrecision(4));
  return String(s);
}

function dataRange(series: Series[], pick: (s: Series) => number[], log: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of pick(s)) {
      if (!Number.isFinite(v)) continue;
      if (log && v <= 0) continue;
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) throw new Error("no finite data to plot");
  if (!log) {
    const pad = 0.05 * (hi - lo || Math.abs(hi) || 1);
    return [lo === 0 || lo > 0 && lo - pad > 0 || lo < 0 ? lo - pad : lo, hi + pad];
  }
  return [lo / 1.3, hi * 1.3];
}

export function renderFigure(model: FigureModel): Raster {
  const r = new Raster(WIDTH, HEIGHT);
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;

  const [xlo, xhi] = dataRange(model.series, (s) => s.x, model.logX);
  const [ylo, yhi] = dataRange(model.series, (s) => s.y, model.logY);
  const sx = model.logX ? logScale(xlo, xhi, x0, x1) : linearScale(xlo, xhi, x0, x1);
  const sy = model.logY ? logScale(ylo, yhi, y0, y1) : linearScale(ylo, yhi, y0, y1);

  for (const t of sx.ticks) {
    const px = sx.toPx(t);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    r.line(px, y0, px, y1, GRID);
    const label = formatTick(t);
    r.text(px - r.textWidth(label) / 2, y0 + 8, label, TEXT);
    r.line(px, y0, px, y0 + 4, AXIS);
  }
  for (const t of sy.ticks) {
    const py = sy.toPx(t);
    if (py > y0 + 0.5 || py < y1 - 0.5) continue;
    r.line(x0, py, x1, py, GRID);
    const label = formatTick(t);
    r.text(x0 - 8 - r.textWidth(label), py - GLYPH_H / 2, label, TEXT);
    r.line(x0 - 4, py, x0, py, AXIS);
  }
  r.line(x0, y0, x1, y0, AXIS, 1);
  r.line(x0, y0, x0, y1, AXIS, 1);

  for (const s of model.series) {
    const pts = s.x
      .map((xv, i) => [xv, s.y[i]] as [number, number])
      .filter(([xv, yv]) => Number.isFinite(xv) && Number.isFinite(yv)
        && (!model.logX || xv > 0) && (!model.logY || yv > 0));
    for (let i = 1; i < pts.length; i++) {
      r.line(sx.toPx(pts[i - 1][0]), sy.toPx(pts[i - 1][1]),
             sx.toPx(pts[i][0]), sy.toPx(pts[i][1]),
             s.color, 2, s.dashed ? [6, 4] : undefined);
    }
    if (s.markers) {
      for (const [xv, yv] of pts) r.dot(sx.toPx(xv), sy.toPx(yv), s.color, 5);
    }
  }

  r.text(MARGIN.left, 10, model.title, TEXT);
  const xl = model.xLabel + (model.logX ? " (log)" : "");
  r.text((x0 + x1) / 2 - r.textWidth(xl) / 2, HEIGHT - GLYPH_H - 6, xl, TEXT);
  r.text(6, y1 - 14, model.yLabel + (model.logY ? " (log)" : ""), TEXT);

  let ly = y1 + 6;
  for (const s of model.series) {
    const lx = x1 - 150;
    r.line(lx, ly + 3, lx + 22, ly + 3, s.color, 2, s.dashed ? [6, 4] : undefined);
    r.text(lx + 28, ly - 2, s.label, TEXT);
    ly += GLYPH_H + 5;
  }
  return r;
}
