import { CHART_WINDOW_S, type SeriesBuffer } from "./state.js";

export interface ChartSeries {
  label: string;
  color: string;
  buf: SeriesBuffer;
}

/** Pad a data range so flat lines stay visible and off the frame edges. */
export function padRange(lo: number, hi: number): [number, number] {
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) return [-1, 1];
  const span = hi - lo;
  if (span < 1e-9) {
    const pad = Math.max(1.0, Math.abs(hi) * 0.1);
    return [lo - pad, hi + pad];
  }
  return [lo - 0.08 * span, hi + 0.08 * span];
}

/**
 * Scrolling strip chart over the trailing window of a few SeriesBuffers.
 * Samples are joined by straight segments exactly as received; there is no
 * resampling or smoothing on the client.
 */
export class StripChart {
  private ctx: CanvasRenderingContext2D;

  constructor(
    canvas: HTMLCanvasElement,
    private title: string,
    private unit: string,
    private series: ChartSeries[],
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  draw(): void {
    const ctx = this.ctx;
    const w = ctx.canvas.width;
    const h = ctx.canvas.height;
    ctx.fillStyle = "#11151a";
    ctx.fillRect(0, 0, w, h);
    ctx.strokeStyle = "#2a3340";
    ctx.strokeRect(0.5, 0.5, w - 1, h - 1);

    let tMax = -Infinity;
    let lo = Infinity;
    let hi = -Infinity;
    for (const s of this.series) {
      const last = s.buf.last();
      if (last && last.t > tMax) tMax = last.t;
      for (const smp of s.buf.samples()) {
        if (smp.v < lo) lo = smp.v;
        if (smp.v > hi) hi = smp.v;
      }
    }

    ctx.fillStyle = "#8fa3b8";
    ctx.font = "11px sans-serif";
    ctx.fillText(this.title, 6, 13);

    if (!Number.isFinite(tMax)) return; // nothing received yet
    const [yLo, yHi] = padRange(lo, hi);
    const t0 = tMax - CHART_WINDOW_S;
    const toX = (t: number) => ((t - t0) / CHART_WINDOW_S) * (w - 2) + 1;
    const toY = (v: number) => h - 1 - ((v - yLo) / (yHi - yLo)) * (h - 2);

    // zero line
    if (yLo < 0 && yHi > 0) {
      ctx.strokeStyle = "#2a3340";
      ctx.beginPath();
      ctx.moveTo(1, toY(0));
      ctx.lineTo(w - 1, toY(0));
      ctx.stroke();
    }

    for (const s of this.series) {
      const pts = s.buf.samples();
      if (pts.length === 0) continue;
      ctx.strokeStyle = s.color;
      ctx.lineWidth = 1;
      ctx.beginPath();
      ctx.moveTo(toX(pts[0].t), toY(pts[0].v));
      for (let i = 1; i < pts.length; i++) {
        ctx.lineTo(toX(pts[i].t), toY(pts[i].v));
      }
      ctx.stroke();
    }

    // legend with the latest value of each series
    let x = 6;
    for (const s of this.series) {
      const last = s.buf.last();
      const text = `${s.label} ${last ? last.v.toFixed(2) : "-"}${this.unit}`;
      ctx.fillStyle = s.color;
      ctx.fillText(text, x, h - 6);
      x += ctx.measureText(text).width + 12;
    }
  }
}
