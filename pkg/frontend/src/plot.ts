// Canvas renderer: trajectory, guide curves, squared overlay, blow-up
// markers. Pure projection of already-fetched data; nothing here integrates.

import type { RegionCurve, Sample } from './api.js';
import type { Viewport } from './state.js';

const COLORS = {
  axes: '#3a3f4a',
  tickText: '#8a92a3',
  zeroLine: '#555c69',
  trajectory: '#5ab0f2',
  squared: '#f2a65a',
  guideInner: '#6fbf6f',
  guideOuter: '#bf6fbf',
  guideAxis: '#707784',
  blowup: '#e2574c',
};

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= raw) return mag * m;
  }
  return mag * 10;
}

export interface PlotOptions {
  onViewportChange: (vp: Viewport) => void;
}

export class TrajectoryPlot {
  private ctx: CanvasRenderingContext2D;
  private vp: Viewport = { tMin: -20, tMax: 1.5, yMin: -4.5, yMax: 4.5 };
  private dragging: { x: number; y: number; vp: Viewport } | null = null;

  constructor(
    private canvas: HTMLCanvasElement,
    private options: PlotOptions,
  ) {
    const ctx = canvas.getContext('2d');
    if (!ctx) throw new Error('canvas 2d context unavailable');
    this.ctx = ctx;
    this.bindNavigation();
  }

  setViewport(vp: Viewport): void {
    this.vp = vp;
  }

  resize(): void {
    const dpr = window.devicePixelRatio || 1;
    const rect = this.canvas.getBoundingClientRect();
    this.canvas.width = Math.round(rect.width * dpr);
    this.canvas.height = Math.round(rect.height * dpr);
    this.ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  }

  private get width(): number {
    return this.canvas.width / (window.devicePixelRatio || 1);
  }

  private get height(): number {
    return this.canvas.height / (window.devicePixelRatio || 1);
  }

  private sx(t: number): number {
    return ((t - this.vp.tMin) / (this.vp.tMax - this.vp.tMin)) * this.width;
  }

  private sy(y: number): number {
    return this.height - ((y - this.vp.yMin) / (this.vp.yMax - this.vp.yMin)) * this.height;
  }

  clear(): void {
    this.ctx.clearRect(0, 0, this.width, this.height);
    this.drawAxes();
  }

  private drawAxes(): void {
    const ctx = this.ctx;
    const { tMin, tMax, yMin, yMax } = this.vp;
    ctx.save();
    ctx.strokeStyle = COLORS.axes;
    ctx.fillStyle = COLORS.tickText;
    ctx.lineWidth = 1;
    ctx.font = '11px system-ui, sans-serif';

    const tStep = niceStep(tMax - tMin, 10);
    for (let t = Math.ceil(tMin / tStep) * tStep; t <= tMax; t += tStep) {
      const x = this.sx(t);
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, this.height);
      ctx.stroke();
      ctx.fillText(formatTick(t, tStep), x + 3, this.height - 5);
    }
    const yStep = niceStep(yMax - yMin, 8);
    for (let y = Math.ceil(yMin / yStep) * yStep; y <= yMax; y += yStep) {
      const py = this.sy(y);
      ctx.beginPath();
      ctx.moveTo(0, py);
      ctx.lineTo(this.width, py);
      ctx.stroke();
      ctx.fillText(formatTick(y, yStep), 4, py - 3);
    }
    // emphasize y=0
    if (yMin < 0 && yMax > 0) {
      ctx.strokeStyle = COLORS.zeroLine;
      ctx.beginPath();
      ctx.moveTo(0, this.sy(0));
      ctx.lineTo(this.width, this.sy(0));
      ctx.stroke();
    }
    ctx.restore();
  }

  /** Polyline through (t, f(sample)); breaks at null/non-finite values. */
  private tracePolyline(samples: Sample[], value: (s: Sample) => number | null): void {
    const ctx = this.ctx;
    ctx.beginPath();
    let pen = false;
    for (const s of samples) {
      const y = value(s);
      if (y === null || !Number.isFinite(y)) {
        pen = false;
        continue;
      }
      const px = this.sx(s.t);
      const py = this.sy(y);
      if (pen) ctx.lineTo(px, py);
      else ctx.moveTo(px, py);
      pen = true;
    }
    ctx.stroke();
  }

  drawTrajectory(samples: Sample[], squared: boolean): void {
    const ctx = this.ctx;
    ctx.save();
    ctx.lineWidth = 1.8;
    ctx.strokeStyle = COLORS.trajectory;
    this.tracePolyline(samples, (s) => s.y);
    if (squared) {
      ctx.strokeStyle = COLORS.squared;
      ctx.lineWidth = 1.4;
      this.tracePolyline(samples, (s) => (s.y === null ? null : s.y * s.y));
    }
    ctx.restore();
  }

  drawGuides(curves: RegionCurve[]): void {
    const ctx = this.ctx;
    ctx.save();
    ctx.lineWidth = 1.2;
    ctx.setLineDash([5, 4]);
    for (const curve of curves) {
      ctx.strokeStyle = curve.name.startsWith('inner')
        ? COLORS.guideInner
        : curve.name.startsWith('outer')
          ? COLORS.guideOuter
          : COLORS.guideAxis;
      ctx.beginPath();
      let pen = false;
      for (let i = 0; i < curve.t.length; i++) {
        const sigma = curve.sigma[i];
        if (sigma === null || sigma === undefined) {
          pen = false;
          continue;
        }
        const px = this.sx(curve.t[i]!);
        const py = this.sy(sigma);
        if (pen) ctx.lineTo(px, py);
        else ctx.moveTo(px, py);
        pen = true;
      }
      ctx.stroke();
    }
    ctx.restore();
  }

  /** Truncation marker: dashed vertical at the estimated blow-up time. */
  drawBlowupMarker(tEst: number): void {
    if (tEst < this.vp.tMin || tEst > this.vp.tMax) return;
    const ctx = this.ctx;
    const x = this.sx(tEst);
    ctx.save();
    ctx.strokeStyle = COLORS.blowup;
    ctx.fillStyle = COLORS.blowup;
    ctx.setLineDash([2, 3]);
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, this.height);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.font = '11px system-ui, sans-serif';
    ctx.fillText(`t∗≈${tEst.toFixed(3)}`, x + 4, 14);
    ctx.restore();
  }

  // wheel zoom about the cursor, drag to pan; every change goes through the
  // controller, which decides whether a refetch is needed
  private bindNavigation(): void {
    this.canvas.addEventListener('wheel', (ev) => {
      ev.preventDefault();
      const rect = this.canvas.getBoundingClientRect();
      const fx = (ev.clientX - rect.left) / rect.width;
      const fy = (ev.clientY - rect.top) / rect.height;
      const factor = ev.deltaY > 0 ? 1.2 : 1 / 1.2;
      const { tMin, tMax, yMin, yMax } = this.vp;
      const tAt = tMin + fx * (tMax - tMin);
      const yAt = yMax - fy * (yMax - yMin);
      this.options.onViewportChange({
        tMin: tAt - (tAt - tMin) * factor,
        tMax: tAt + (tMax - tAt) * factor,
        yMin: yAt - (yAt - yMin) * factor,
        yMax: yAt + (yMax - yAt) * factor,
      });
    });
    this.canvas.addEventListener('pointerdown', (ev) => {
      this.canvas.setPointerCapture(ev.pointerId);
      this.dragging = { x: ev.clientX, y: ev.clientY, vp: { ...this.vp } };
    });
    this.canvas.addEventListener('pointermove', (ev) => {
      if (!this.dragging) return;
      const rect = this.canvas.getBoundingClientRect();
      const { vp } = this.dragging;
      const dt = ((ev.clientX - this.dragging.x) / rect.width) * (vp.tMax - vp.tMin);
      const dy = ((ev.clientY - this.dragging.y) / rect.height) * (vp.yMax - vp.yMin);
      this.options.onViewportChange({
        tMin: vp.tMin - dt,
        tMax: vp.tMax - dt,
        yMin: vp.yMin + dy,
        yMax: vp.yMax + dy,
      });
    });
    const stop = (ev: PointerEvent) => {
      this.dragging = null;
      if (this.canvas.hasPointerCapture(ev.pointerId)) {
        this.canvas.releasePointerCapture(ev.pointerId);
      }
    };
    this.canvas.addEventListener('pointerup', stop);
    this.canvas.addEventListener('pointercancel', stop);
  }
}

function formatTick(v: number, step: number): string {
  const decimals = Math.max(0, -Math.floor(Math.log10(step)));
  const s = v.toFixed(decimals);
  return s === '-0' ? '0' : s;
}
