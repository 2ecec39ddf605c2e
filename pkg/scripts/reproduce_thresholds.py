#!/usr/bin/env python3
"""Reproduce the three critical-slope hunts and the horizon-stability check.

Usage:
    python scripts/reproduce_thresholds.py [--tol 1e-9] [--depth -40]

Each family is a one-parameter sheaf of initial slopes through a fixed
(t0, sigma0); bisection pins the slope where the qualitative class flips.
"""

import argparse
import time

from p4lab import EquationId, Family, Span, StepControl, bisect_threshold, warm_up


def hunt(name, family, lo, hi, tol):
    t0 = time.perf_counter()
    th = bisect_threshold(family, lo, hi, tol=tol)
    dt = time.perf_counter() - t0
    blo, bhi = th.bracket
    print(f"{name:24s} [{blo:.12f}, {bhi:.12f}]  width {th.width:.1e}  "
          f"{th.class_lo.tag.name} -> {th.class_hi.tag.name}  "
          f"({th.iterations} iters, {dt:.2f}s)")
    return th


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--depth", type=float, default=-40.0,
                    help="backward horizon for the oscillation families")
    ap.add_argument("--rtol", type=float, default=1e-10)
    args = ap.parse_args()

    warm_up()
    ctrl = StepControl(rtol=args.rtol, atol=args.rtol * 1e-2)
    eq = EquationId.PHALF

    fam1 = Family(eq, 0.0, 0.0, Span(0.0, args.depth), control=ctrl)
    th1 = hunt("sigma(0)=0 backward", fam1, 1.0, 1.3, args.tol)

    # this family's split happens forward, past the fold of the guide curves
    fam2 = Family(eq, -6.0, 2.0, Span(-6.0, 8.0), control=ctrl)
    hunt("sigma(-6)=2 forward", fam2, -0.2, -0.1, args.tol)

    fam3b = Family(eq, 0.0, 1.0, Span(0.0, args.depth), control=ctrl)
    hunt("sigma(0)=1 upper edge", fam3b, 1.578, 1.580, args.tol)
    fam3f = Family(eq, 0.0, 1.0, Span(0.0, 8.0), control=ctrl)
    hunt("sigma(0)=1 lower edge", fam3f, -0.94, -0.93, args.tol)

    deep = Family(eq, 0.0, 0.0, Span(0.0, args.depth * 1.5),
                  control=StepControl(rtol=args.rtol * 0.1, atol=args.rtol * 1e-3))
    th_deep = hunt("sigma(0)=0 deep check", deep, 1.0, 1.3, args.tol)
    shift = abs(0.5 * sum(th_deep.bracket) - 0.5 * sum(th1.bracket))
    print(f"\nhorizon x1.5 + rtol /10 moves the first threshold by {shift:.2e}")


if __name__ == "__main__":
    main()
