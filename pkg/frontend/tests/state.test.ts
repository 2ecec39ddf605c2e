import { describe, expect, it } from 'vitest';

import {
  clampToSlider,
  coveredBy,
  integrationLegs,
  nudgeValue,
  validViewport,
  type Viewport,
} from '../src/state.js';

describe('nudgeValue', () => {
  it('moves the ninth decimal exactly, with no binary residue', () => {
    expect(String(nudgeValue(1.169868591, 1, 1e-9))).toBe('1.169868592');
    expect(String(nudgeValue(1.169868592, -1, 1e-9))).toBe('1.169868591');
  });

  it('does not drift over repeated fine nudges', () => {
    let v = 1.169868591;
    for (let i = 0; i < 10; i++) v = nudgeValue(v, 1, 1e-9);
    expect(String(v)).toBe('1.169868601');
    for (let i = 0; i < 10; i++) v = nudgeValue(v, -1, 1e-9);
    expect(String(v)).toBe('1.169868591');
  });

  it('snaps coarse steps the same way', () => {
    expect(nudgeValue(0.65, 1, 0.01)).toBe(0.66);
    expect(nudgeValue(0.1, 1, 0.1)).toBe(0.2);
    expect(nudgeValue(3, 1, 1)).toBe(4);
  });

  it('rejects a nonpositive step', () => {
    expect(() => nudgeValue(1, 1, 0)).toThrow(RangeError);
    expect(() => nudgeValue(1, 1, -0.1)).toThrow(RangeError);
  });
});

describe('clampToSlider', () => {
  it('clamps into [min, max]', () => {
    const spec = { min: -3, max: 3, step: 0.01 };
    expect(clampToSlider(5, spec)).toBe(3);
    expect(clampToSlider(-5, spec)).toBe(-3);
    expect(clampToSlider(1.25, spec)).toBe(1.25);
  });
});

describe('validViewport', () => {
  it('requires nonempty finite ranges', () => {
    expect(validViewport({ tMin: -20, tMax: 1, yMin: -4, yMax: 4 })).toBe(true);
    expect(validViewport({ tMin: 1, tMax: 1, yMin: -4, yMax: 4 })).toBe(false);
    expect(validViewport({ tMin: 2, tMax: 1, yMin: -4, yMax: 4 })).toBe(false);
    expect(validViewport({ tMin: -20, tMax: 1, yMin: 4, yMax: -4 })).toBe(false);
    expect(validViewport({ tMin: NaN, tMax: 1, yMin: -4, yMax: 4 })).toBe(false);
    expect(validViewport({ tMin: -Infinity, tMax: 1, yMin: -4, yMax: 4 })).toBe(false);
  });
});

describe('coveredBy', () => {
  const vp = (tMin: number, tMax: number): Viewport => ({ tMin, tMax, yMin: -1, yMax: 1 });

  it('is false with no coverage yet', () => {
    expect(coveredBy(vp(-10, 0), null)).toBe(false);
  });

  it('is true strictly inside and exactly on the boundary', () => {
    const cov = { lo: -20, hi: 1.5 };
    expect(coveredBy(vp(-10, 0), cov)).toBe(true);
    expect(coveredBy(vp(-20, 1.5), cov)).toBe(true);
  });

  it('is false as soon as either side grows past the coverage', () => {
    const cov = { lo: -20, hi: 1.5 };
    expect(coveredBy(vp(-20.001, 0), cov)).toBe(false);
    expect(coveredBy(vp(-10, 1.6), cov)).toBe(false);
  });

  it('ignores pure y zooming by construction (t-range only)', () => {
    const cov = { lo: -20, hi: 1.5 };
    expect(coveredBy({ tMin: -10, tMax: 0, yMin: -100, yMax: 100 }, cov)).toBe(true);
  });
});

describe('integrationLegs', () => {
  const ic = (t0: number) => ({ t0, y0: 0, v0: 0.5 });

  it('splits into backward and forward legs when t0 is inside the viewport', () => {
    const legs = integrationLegs(ic(0), { tMin: -20, tMax: 1.5, yMin: -4, yMax: 4 });
    expect(legs).toEqual([
      { t0: 0, t1: -20 },
      { t0: 0, t1: 1.5 },
    ]);
  });

  it('uses a single backward leg when t0 sits at the right edge', () => {
    const legs = integrationLegs(ic(1.5), { tMin: -20, tMax: 1.5, yMin: -4, yMax: 4 });
    expect(legs).toEqual([{ t0: 1.5, t1: -20 }]);
  });

  it('reaches across to the viewport when t0 lies outside it', () => {
    const legs = integrationLegs(ic(-30), { tMin: -20, tMax: 1.5, yMin: -4, yMax: 4 });
    expect(legs).toEqual([{ t0: -30, t1: 1.5 }]);
  });
});
