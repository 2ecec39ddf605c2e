"""Command-line front door: integrate, classify, bisect, sweep, regions, serve.

Configuration merges three layers, later wins: built-in defaults, a JSON
config file (--config PATH, or the P4LAB_CONFIG environment variable), then
explicit flags. Reports are deterministic: the same inputs produce byte
identical output files.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .analysis import GUIDES, ClassifierParams
from .equations import EquationId
from .exceptions import NearZeroDenominator, P4LabError
from .fastpath import integrate_equation
from .ode import Span, State, StepControl
from .search import Family, bisect_threshold, sweep
from .serialize import (SCHEMA, behavior_to_dict, regions_to_dict,
                        sweep_to_dict, threshold_to_dict, trajectory_to_csv,
                        trajectory_to_json)

_EQ_CHOICES = [e.value for e in EquationId]

# every config-file key, with type and built-in default; flags override file
_CONFIG_KEYS = {
    "eq": (str, "phalf"),
    "t0": (float, 0.0),
    "y0": (float, 0.0),
    "v0": (float, 0.0),
    "to": (float, None),
    "rtol": (float, None),
    "atol": (float, None),
    "format": (str, "json"),
    "out": (str, None),
    "min_crossings": (int, 3),
    "linger_dist": (float, 0.05),
    "linger_span": (float, 1.0),
    "n_samples": (int, 4000),
    "lo": (float, None),
    "hi": (float, None),
    "tol": (float, 1e-10),
    "values": (list, None),
    "tmin": (float, -10.0),
    "tmax": (float, 1.0),
    "n": (int, 500),
    "listen": (str, "127.0.0.1:8472"),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Merged settings a command runs with."""

    eq: str
    t0: float
    y0: float
    v0: float
    to: Optional[float]
    rtol: Optional[float]
    atol: Optional[float]
    format: str
    out: Optional[str]
    min_crossings: int
    linger_dist: float
    linger_span: float
    n_samples: int

    @property
    def equation(self) -> EquationId:
        return EquationId(self.eq)

    @property
    def span_end(self) -> float:
        # judged windows default to deep backward integration
        return self.to if self.to is not None else self.t0 - 40.0

    def control(self) -> StepControl:
        kw = {}
        if self.rtol is not None:
            kw["rtol"] = self.rtol
        if self.atol is not None:
            kw["atol"] = self.atol
        return StepControl(**kw)

    def classifier_params(self) -> ClassifierParams:
        return ClassifierParams(min_crossings=self.min_crossings,
                                linger_dist=self.linger_dist,
                                linger_span=self.linger_span,
                                n_samples=self.n_samples)


def _load_config_file(path: Optional[str]) -> dict:
    path = path or os.environ.get("P4LAB_CONFIG")
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path!r} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise UsageError(f"config file {path!r} must hold a JSON object")
    unknown = sorted(set(data) - set(_CONFIG_KEYS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _merge(args: argparse.Namespace) -> dict:
    file_cfg = _load_config_file(getattr(args, "config", None))
    merged = {}
    for key, (typ, default) in _CONFIG_KEYS.items():
        value = default
        if key in file_cfg and file_cfg[key] is not None:
            value = file_cfg[key]
        flag = getattr(args, key, None)
        if flag is not None:
            value = flag
        if value is not None and typ in (int, float, str) and not isinstance(value, typ):
            try:
                value = typ(value)
            except (TypeError, ValueError):
                raise UsageError(f"config key {key!r} expects {typ.__name__}, got {value!r}")
        merged[key] = value
    if merged["eq"] not in _EQ_CHOICES:
        raise UsageError(f"eq must be one of {', '.join(_EQ_CHOICES)}, got {merged['eq']!r}")
    if merged["format"] not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {merged['format']!r}")
    return merged


def _run_config(merged: dict) -> RunConfig:
    return RunConfig(eq=merged["eq"], t0=merged["t0"], y0=merged["y0"],
                     v0=merged["v0"], to=merged["to"], rtol=merged["rtol"],
                     atol=merged["atol"], format=merged["format"],
                     out=merged["out"], min_crossings=merged["min_crossings"],
                     linger_dist=merged["linger_dist"],
                     linger_span=merged["linger_span"],
                     n_samples=merged["n_samples"])


def _emit(document: str, out: Optional[str], summary: str) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(document)
        print(summary)
    else:
        sys.stdout.write(document)
        if not document.endswith("\n"):
            sys.stdout.write("\n")
        print(summary, file=sys.stderr)


def _termination_summary(traj) -> str:
    term = traj.termination
    extra = ""
    if term.kind == "BlowUp":
        extra = f" t_est={term.t_est!r}"
    elif term.kind == "StepUnderflow":
        extra = f" t={term.t!r}"
    return (f"termination: {term.kind}{extra} nodes={traj.n} "
            f"covered=[{traj.t_min!r}, {traj.t_max!r}]")


def cmd_integrate(merged: dict) -> int:
    cfg = _run_config(merged)
    traj = integrate_equation(cfg.equation, State(cfg.t0, cfg.y0, cfg.v0),
                              Span(cfg.t0, cfg.span_end), cfg.control())
    if cfg.format == "csv":
        doc = trajectory_to_csv(traj)
    else:
        doc = trajectory_to_json(traj, indent=2) + "\n"
    _emit(doc, cfg.out, _termination_summary(traj))
    return 0


def cmd_classify(merged: dict) -> int:
    cfg = _run_config(merged)
    family = Family(cfg.equation, cfg.t0, cfg.y0,
                    Span(cfg.t0, cfg.span_end), cfg.control())
    behavior = family.classify_at(cfg.v0, cfg.classifier_params())
    report = {"schema": SCHEMA, "kind": "classification",
              "family": {"eq": cfg.eq, "t0": cfg.t0, "y0": cfg.y0,
                         "v0": cfg.v0, "window": [cfg.t0, cfg.span_end]},
              "behavior": behavior_to_dict(behavior)}
    _emit(json.dumps(report, indent=2) + "\n", cfg.out,
          f"class: {behavior.tag.value}")
    return 0


def cmd_bisect(merged: dict) -> int:
    cfg = _run_config(merged)
    if merged["lo"] is None or merged["hi"] is None:
        raise UsageError("bisect needs --lo and --hi")
    family = Family(cfg.equation, cfg.t0, cfg.y0,
                    Span(cfg.t0, cfg.span_end), cfg.control())
    th = bisect_threshold(family, merged["lo"], merged["hi"],
                          tol=merged["tol"], params=cfg.classifier_params())
    report = threshold_to_dict(th)
    report["family"] = {"eq": cfg.eq, "t0": cfg.t0, "y0": cfg.y0,
                        "window": [cfg.t0, cfg.span_end]}
    _emit(json.dumps(report, indent=2) + "\n", cfg.out,
          f"bracket: [{th.bracket[0]!r}, {th.bracket[1]!r}] width={th.width!r} "
          f"{th.class_lo.tag.value} -> {th.class_hi.tag.value}")
    return 0


def cmd_sweep(merged: dict) -> int:
    cfg = _run_config(merged)
    values = merged["values"]
    if not values:
        raise UsageError("sweep needs --values (comma-separated slopes)")
    family = Family(cfg.equation, cfg.t0, cfg.y0,
                    Span(cfg.t0, cfg.span_end), cfg.control())
    rows = sweep(family, [float(v) for v in values],
                 params=cfg.classifier_params())
    _emit(json.dumps(sweep_to_dict(rows), indent=2) + "\n", cfg.out,
          "; ".join(f"v0={r.v0!r}: {r.behavior.tag.value}" for r in rows))
    return 0


def cmd_regions(merged: dict) -> int:
    curves = GUIDES.polylines(merged["tmin"], merged["tmax"], merged["n"])
    doc = json.dumps(regions_to_dict(curves), indent=2) + "\n"
    _emit(doc, merged["out"], f"{len(curves)} curves over "
          f"[{merged['tmin']!r}, {merged['tmax']!r}] with {merged['n']} points each")
    return 0


def cmd_serve(merged: dict) -> int:
    import uvicorn

    from .server import create_app

    listen = merged["listen"]
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise UsageError(f"--listen expects HOST:PORT, got {listen!r}")
    uvicorn.run(create_app(), host=host, port=int(port))
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; P4LAB_CONFIG is the fallback")
    p.add_argument("--eq", choices=_EQ_CHOICES, help="equation tag")
    p.add_argument("--t0", type=float, help="initial t")
    p.add_argument("--y0", type=float, help="initial value")
    p.add_argument("--v0", type=float, help="initial slope")
    p.add_argument("--to", type=float, help="far end of the span/window (default t0 - 40)")
    p.add_argument("--rtol", type=float, help="relative tolerance")
    p.add_argument("--atol", type=float, help="absolute tolerance")
    p.add_argument("--format", choices=["json", "csv"], help="output format")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--min-crossings", dest="min_crossings", type=int,
                   help="guide crossings needed to call a run oscillatory")
    p.add_argument("--linger-dist", dest="linger_dist", type=float,
                   help="distance defining lingering along a curve")
    p.add_argument("--linger-span", dest="linger_span", type=float,
                   help="contiguous span defining lingering")
    p.add_argument("--n-samples", dest="n_samples", type=int,
                   help="classification grid size")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p4lab",
        description="Numerical laboratory for a Painleve transcendent and its square-root form.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_int = sub.add_parser("integrate", help="integrate one initial value problem")
    _add_common(p_int)
    p_int.set_defaults(func=cmd_integrate)

    p_cls = sub.add_parser("classify", help="integrate and label the behavior")
    _add_common(p_cls)
    p_cls.set_defaults(func=cmd_classify)

    p_bis = sub.add_parser("bisect", help="bracket a critical initial slope")
    _add_common(p_bis)
    p_bis.add_argument("--lo", type=float, help="lower slope endpoint")
    p_bis.add_argument("--hi", type=float, help="upper slope endpoint")
    p_bis.add_argument("--tol", type=float, help="bracket width target (default 1e-10)")
    p_bis.set_defaults(func=cmd_bisect)

    p_swp = sub.add_parser("sweep", help="classify a list of slopes")
    _add_common(p_swp)
    p_swp.add_argument("--values", type=lambda s: [float(x) for x in s.split(",")],
                       help="comma-separated slopes")
    p_swp.set_defaults(func=cmd_sweep)

    p_reg = sub.add_parser("regions", help="emit the guide curves as polylines")
    p_reg.add_argument("--config", help="JSON config file")
    p_reg.add_argument("--tmin", type=float, help="left end (default -10)")
    p_reg.add_argument("--tmax", type=float, help="right end (default 1)")
    p_reg.add_argument("--n", type=int, help="points per curve (default 500)")
    p_reg.add_argument("--out", help="output path (default: stdout)")
    p_reg.set_defaults(func=cmd_regions)

    p_srv = sub.add_parser("serve", help="run the HTTP API")
    p_srv.add_argument("--config", help="JSON config file")
    p_srv.add_argument("--listen", help="HOST:PORT (default 127.0.0.1:8472)")
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        merged = _merge(args)
        return args.func(merged)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except NearZeroDenominator as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: the square-root form (--eq phalf or --eq pbarhalf) is "
              "well posed through zeros", file=sys.stderr)
        return 1
    except P4LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
