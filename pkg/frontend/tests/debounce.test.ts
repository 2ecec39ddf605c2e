import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { debounce } from '../src/debounce.js';

describe('debounce', () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it('collapses a burst into one trailing call with the last arguments', () => {
    const calls: number[] = [];
    const d = debounce((v: number) => calls.push(v), 100);
    d(1);
    vi.advanceTimersByTime(30);
    d(2);
    vi.advanceTimersByTime(30);
    d(3);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(99);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(1);
    expect(calls).toEqual([3]);
  });

  it('resets the timer on every call', () => {
    const fn = vi.fn();
    const d = debounce(fn, 100);
    d();
    vi.advanceTimersByTime(99);
    d();
    vi.advanceTimersByTime(99);
    expect(fn).not.toHaveBeenCalled();
    vi.advanceTimersByTime(1);
    expect(fn).toHaveBeenCalledTimes(1);
  });

  it('cancel drops the pending call', () => {
    const fn = vi.fn();
    const d = debounce(fn, 100);
    d();
    d.cancel();
    vi.advanceTimersByTime(500);
    expect(fn).not.toHaveBeenCalled();
  });

  it('flush fires the pending call immediately, once', () => {
    const calls: number[] = [];
    const d = debounce((v: number) => calls.push(v), 100);
    d(7);
    d.flush();
    expect(calls).toEqual([7]);
    vi.advanceTimersByTime(500);
    expect(calls).toEqual([7]);
  });

  it('flush with nothing pending is a no-op', () => {
    const fn = vi.fn();
    const d = debounce(fn, 100);
    d.flush();
    expect(fn).not.toHaveBeenCalled();
  });
});
