#!/usr/bin/env python3
"""Portrait of one decaying oscillation and its squared companion.

Usage:
    python scripts/oscillation_portrait.py [--v0 0.65] [--depth -40] [--out DIR]

Prints envelope decay statistics for the run and the arch asymmetry of its
square; --out dumps both trajectories as JSON documents for plotting.
"""

import argparse
import json
import pathlib

import numpy as np

from p4lab import (EquationId, Span, State, StepControl, extrema_envelope,
                   integrate_equation, square_trajectory, trajectory_to_json,
                   warm_up)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--v0", type=float, default=0.65)
    ap.add_argument("--depth", type=float, default=-40.0)
    ap.add_argument("--out", type=pathlib.Path, default=None)
    args = ap.parse_args()

    warm_up()
    ctrl = StepControl(rtol=1e-10, atol=1e-12)
    traj = integrate_equation(EquationId.PHALF, State(0.0, 0.0, args.v0),
                              Span(0.0, args.depth), ctrl)
    print(f"run: sigma(0)=0, slope {args.v0}, to t={args.depth} "
          f"({traj.n} nodes, {traj.termination.kind})")

    env = extrema_envelope(traj, branch="lower",
                           window=Span(args.depth, min(-5.0, args.depth / 8)))
    amp = env.amplitude
    ratios = amp[:-2] / amp[2:]  # same-phase, toward decreasing t
    print(f"envelope: {len(amp)} extrema, amplitude {amp[-1]:.4f} (near end) "
          f"down to {amp[0]:.4f} (deep), per-cycle decay "
          f"{np.median(ratios):.5f} median / {ratios.max():.5f} max")

    sq = square_trajectory(traj)
    m = (sq.t >= args.depth) & (sq.t <= -5.0)
    t_s, y_s, v_s = sq.t[m], sq.y[m], sq.v[m]
    flip = np.nonzero(np.sign(v_s[:-1]) * np.sign(v_s[1:]) < 0)[0]
    devs = np.array([float(y_s[i + 1]) + 2.0 * float(t_s[i]) / 3.0 for i in flip])
    ups, dns = devs[devs > 0], -devs[devs < 0]
    k = min(len(ups), len(dns))
    print(f"squared: {k} arch pairs, mean upper/lower deviation ratio "
          f"{np.mean(ups[:k] / dns[:k]):.4f} (>1 means the arch away from "
          f"s=0 is the larger one)")

    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        for label, tr in (("run", traj), ("squared", sq)):
            path = args.out / f"portrait_{label}.json"
            path.write_text(json.dumps(trajectory_to_json(tr)))
            print(f"wrote {path}")


if __name__ == "__main__":
    main()
