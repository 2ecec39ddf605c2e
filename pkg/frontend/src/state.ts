import type { EquationTag } from './api.js';

export interface SliderSpec {
  min: number;
  max: number;
  step: number;
}

export interface InitialData {
  t0: number;
  y0: number;
  v0: number;
}

export type IcField = keyof InitialData;

export interface Viewport {
  tMin: number;
  tMax: number;
  yMin: number;
  yMax: number;
}

export interface Overlays {
  guides: boolean;
  squared: boolean;
}

export interface ExplorerState {
  equation: EquationTag;
  ic: InitialData;
  sliders: Record<IcField, SliderSpec>;
  /** When on, nudges move by fineStep instead of the slider's step. */
  fineMode: boolean;
  fineStep: number;
  viewport: Viewport;
  overlays: Overlays;
}

export function defaultState(): ExplorerState {
  return {
    equation: 'phalf',
    ic: { t0: 0, y0: 0, v0: 0.65 },
    sliders: {
      t0: { min: -10, max: 2, step: 0.1 },
      y0: { min: -3, max: 3, step: 0.01 },
      v0: { min: -3, max: 3, step: 0.01 },
    },
    fineMode: false,
    fineStep: 1e-9,
    viewport: { tMin: -20, tMax: 1.5, yMin: -4.5, yMax: 4.5 },
    overlays: { guides: true, squared: false },
  };
}

export const FINE_STEPS = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9];

/** Decimal places needed to represent multiples of `step` exactly enough to
 * round-trip through display. One guard digit past the step's own scale. */
function stepDecimals(step: number): number {
  return Math.max(0, Math.min(12, 1 - Math.floor(Math.log10(step))));
}

/** Move `value` by one step in direction `dir`, snapped to the step's decimal
 * grid so that e.g. 1.169868591 + 1e-9 lands on exactly 1.169868592 instead
 * of accumulating binary residue. */
export function nudgeValue(value: number, dir: 1 | -1, step: number): number {
  if (!(step > 0)) throw new RangeError(`step must be > 0, got ${step}`);
  return Number((value + dir * step).toFixed(stepDecimals(step)));
}

export function clampToSlider(value: number, spec: SliderSpec): number {
  return Math.min(spec.max, Math.max(spec.min, value));
}

export function validViewport(vp: Viewport): boolean {
  return (
    Number.isFinite(vp.tMin) &&
    Number.isFinite(vp.tMax) &&
    Number.isFinite(vp.yMin) &&
    Number.isFinite(vp.yMax) &&
    vp.tMin < vp.tMax &&
    vp.yMin < vp.yMax
  );
}

/** Contiguous t-range the current trajectory (or guide-curve set) was
 * requested over. Null means nothing fetched yet. */
export interface Coverage {
  lo: number;
  hi: number;
}

const COVER_EPS = 1e-12;

export function coveredBy(vp: Viewport, cov: Coverage | null): boolean {
  if (cov === null) return false;
  return vp.tMin >= cov.lo - COVER_EPS && vp.tMax <= cov.hi + COVER_EPS;
}

/** Integration legs for the current state: one backward and/or one forward
 * run from t0, each clipped to the viewport's t-range. Starting at the
 * initial point keeps both legs on the same solution. */
export function integrationLegs(ic: InitialData, vp: Viewport): { t0: number; t1: number }[] {
  const legs: { t0: number; t1: number }[] = [];
  if (vp.tMin < ic.t0) legs.push({ t0: ic.t0, t1: vp.tMin });
  if (vp.tMax > ic.t0) legs.push({ t0: ic.t0, t1: vp.tMax });
  return legs; // a valid viewport (tMin < tMax) always yields at least one leg
}
