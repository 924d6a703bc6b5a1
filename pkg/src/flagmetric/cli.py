"""Command-line front end.

One subcommand per family of checks: `dual`, `metric`, `certify`,
`invariance`, `complete`, `fiber-escape`, `ball-plot`.  All commands read a
JSON domain spec (--input), emit CSV on stdout or to --out, and are
deterministic for a fixed seed: identical invocations give byte-identical
output.  When --out is set, commands with a natural picture (`ball-plot`,
`complete`, `fiber-escape`) also render a PNG next to the CSV.

Exit codes: 0 success, 1 invalid input, 2 computational failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import domains, metrics, report, rigidity
from .errors import (
    DegeneratePairing,
    DimensionMismatch,
    FiberExitsImmediately,
    FlagMetricError,
    InvalidDimension,
    NotAnAutomorphism,
    NotDualConvexAt,
    NotInDomain,
    NotPD,
    NotProper,
    NoWitness,
    OutsideDomain,
    ParseError,
    RankDeficient,
    SpanningFailure,
    ValidationError,
)
from .optimize import OptimizerConfig

_VALIDATION_ERRORS = (ParseError, ValidationError, OutsideDomain, NotInDomain,
                      InvalidDimension, DimensionMismatch, NotPD)
_COMPUTE_ERRORS = (NotDualConvexAt, NotProper, NotAnAutomorphism,
                   DegeneratePairing, RankDeficient, SpanningFailure,
                   NoWitness, FiberExitsImmediately)


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Optional[str]
    seed: int
    starts: Optional[int]
    convention: str
    out: Optional[str]
    fmt: str

    def optimizer(self) -> OptimizerConfig:
        kwargs = {"seed": self.seed}
        if self.starts is not None:
            kwargs["starts"] = self.starts
        return OptimizerConfig(**kwargs)


def _need(raw: dict, field: str):
    if field not in raw:
        raise ParseError(f"missing field '{field}' in domain spec")
    return raw[field]


def domain_from_dict(raw) -> domains.Domain:
    if not isinstance(raw, dict):
        raise ParseError("domain spec must be a JSON object")
    variant = _need(raw, "variant")
    if variant == "polytope":
        return domains.PolytopeDomain(np.asarray(_need(raw, "vertices"), dtype=float))
    if variant == "ball":
        shape = raw.get("shape")
        return domains.BallDomain(
            np.asarray(_need(raw, "center"), dtype=float),
            float(_need(raw, "radius")),
            shape=None if shape is None else np.asarray(shape, dtype=float))
    if variant == "matrix_ball":
        return domains.MatrixBallDomain(int(_need(raw, "p")), int(_need(raw, "q")))
    if variant == "pd_cone":
        return domains.PDConeDomain(int(_need(raw, "d")))
    if variant == "oracle_lshape":
        return domains.lshape_domain()
    raise ParseError(f"unknown variant '{variant}'")


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"no such input file: {path}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")


def parse_domain_spec(path: str) -> domains.Domain:
    return domain_from_dict(_load_json(path))


def _domain(cfg: RunConfig, raw=None) -> domains.Domain:
    if raw is not None:
        return domain_from_dict(raw)
    if cfg.input is None:
        raise ParseError("this command needs --input with a domain spec")
    return parse_domain_spec(cfg.input)


def _emit(cfg: RunConfig, text: str, figure=None) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        if figure is not None:
            figure(os.path.splitext(cfg.out)[0] + ".png")
    else:
        sys.stdout.write(text)


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _flatten(x) -> np.ndarray:
    return np.asarray(x, dtype=float).ravel()


# ---------------------------------------------------------------------------
# subcommands

def cmd_dual(cfg: RunConfig, args) -> int:
    dom = _domain(cfg)
    rep = domains.dual_of(dom, seed=cfg.seed)
    if isinstance(rep, domains.SampleCloud):
        kind = "cloud"
        covs = rep.covectors
    elif isinstance(rep, domains.ExplicitVertices):
        kind = "facet"
        covs = rep.covectors
    else:
        rng = np.random.default_rng(cfg.seed)
        params = rep.sample_params(rng, args.count)
        if isinstance(rep, domains.ParametricPolarBall):
            kind = "support"
            covs = np.array([rep.covector(u) for u in params])
        elif isinstance(rep, domains.ParametricMatrixBall):
            kind = "contact"
            covs = params.reshape(len(params), -1)
        else:
            kind = "rank_one"
            covs = np.asarray(params)
    header = ["index", "kind"] + [f"c{j}" for j in range(covs.shape[1])]
    rows = [[i, kind] + list(c) for i, c in enumerate(covs)]
    _info(f"dual representation: {type(rep).__name__}, {len(rows)} rows")
    _emit(cfg, report.render_csv(header, rows))
    return 0


def cmd_metric(cfg: RunConfig, args) -> int:
    dom = _domain(cfg)
    x = json.loads(args.x)
    y = json.loads(args.y)
    config = cfg.optimizer()
    rows = []
    cv = metrics.caratheodory_metric(dom, x, y, cfg.convention, config)
    rows.append(["caratheodory", cv.value, cv.convention, cv.error_bound, cv.route])
    try:
        hv = metrics.hilbert_metric_line(dom, x, y)
        rows.append(["hilbert_chord", hv, "full", 0.0, "chord"])
    except ValidationError:
        rows.append(["hilbert_chord", float("nan"), "full", float("nan"),
                     "chord_broken"])
    ckv = metrics.kobayashi_c(dom, x, y, config)
    rows.append(["kobayashi_c", ckv.value, ckv.convention, ckv.error_bound,
                 ckv.route])
    try:
        kv = metrics.kobayashi_k(dom, x, y, chain_depth=args.chain_depth,
                                 seed=cfg.seed)
        rows.append(["kobayashi_k", kv.value, kv.convention, kv.error_bound,
                     kv.route])
    except ValidationError:
        rows.append(["kobayashi_k", float("nan"), "full", float("nan"),
                     "chain_broken"])
    header = ["quantity", "value", "convention", "error_bound", "route"]
    _emit(cfg, report.render_csv(header, rows))
    return 0


def cmd_certify(cfg: RunConfig, args) -> int:
    dom = _domain(cfg)
    pts = domains.boundary_sample(dom, args.samples, seed=cfg.seed)
    rows = []
    failures = 0
    for i, x in enumerate(pts):
        flat = _flatten(x)
        try:
            cert = domains.dual_convexity_certificate(dom, x, seed=cfg.seed)
            pairing = cert.witness.get("pairing_at_point", float("nan"))
            rows.append([i, True, pairing] + list(flat))
        except NotDualConvexAt:
            failures += 1
            rows.append([i, False, float("nan")] + list(flat))
    header = ["index", "supported", "pairing"] + \
        [f"x{j}" for j in range(len(_flatten(pts[0])))]
    _info(f"certified {len(rows) - failures}/{len(rows)} boundary samples")
    _emit(cfg, report.render_csv(header, rows))
    return 2 if failures else 0


def cmd_invariance(cfg: RunConfig, args) -> int:
    if cfg.input is None:
        raise ParseError("invariance needs --input with domain/transform JSON")
    raw = _load_json(cfg.input)
    dom = _domain(cfg, _need(raw, "domain"))
    matrix = np.asarray(_need(raw, "transform"), dtype=float)
    if "pairs" in raw:
        pairs = [(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
                 for a, b in raw["pairs"]]
    else:
        rng = np.random.default_rng(cfg.seed)
        n = int(raw.get("npairs", 8))
        samples = dom.sample_interior(rng, 2 * n)
        pairs = [(samples[2 * i], samples[2 * i + 1]) for i in range(n)]
    rep = metrics.invariance_check(dom, matrix, pairs, cfg.convention,
                                   cfg.optimizer())
    rows = [[i, d] for i, d in enumerate(rep.deviations)]
    _info(f"max deviation: {rep.max_deviation:.3e} over {len(pairs)} pairs")
    _emit(cfg, report.render_csv(["pair", "deviation"], rows))
    return 0


def cmd_complete(cfg: RunConfig, args) -> int:
    dom = _domain(cfg)
    verdict = metrics.completeness_probe(
        dom, probes=args.probes, steps=args.steps, threshold=args.threshold,
        seed=cfg.seed, convention=cfg.convention, config=cfg.optimizer())
    rows = []
    for i in range(verdict.profiles.shape[0]):
        for k in range(verdict.profiles.shape[1]):
            rows.append([i, k, verdict.ray_parameters[k],
                         verdict.profiles[i, k]])
    header = ["probe", "step", "t", "value"]
    if verdict.witness_index is None:
        _info(f"verdict: {verdict.kind} "
              f"(min sup {verdict.sup_profile.min():.3f})")
    else:
        _info(f"verdict: {verdict.kind} at probe {verdict.witness_index} "
              f"(sup {verdict.sup_profile[verdict.witness_index]:.3f})")
    _emit(cfg, report.render_csv(header, rows),
          figure=lambda path: report.save_profile_figure(verdict, path))
    return 0


def cmd_fiber_escape(cfg: RunConfig, args) -> int:
    if cfg.input is None:
        raise ParseError("fiber-escape needs --input with flag config JSON")
    raw = _load_json(cfg.input)
    n = int(_need(raw, "n"))
    dims = tuple(int(d) for d in _need(raw, "dims"))
    level = int(raw.get("level", 0))
    spec = rigidity.standard_flag_domain(n, dims, seed=cfg.seed)
    rng = np.random.default_rng(int(raw.get("flag_seed", cfg.seed + 1)))
    flag = None
    for _ in range(64):
        cand = rigidity.random_flag(rng, n, dims)
        if spec.margins(cand).min() > 1e-2:
            flag = cand
            break
    if flag is None:
        raise NoWitness("could not sample an interior flag")
    wit = rigidity.fiber_escape_witness(spec, flag, level)
    demo = rigidity.fiber_boundary_demo(spec, flag, level)
    rows = [[k, demo.parameters[k], demo.margins[k]]
            for k in range(len(demo.margins))]
    _info(f"witness pairing {wit.violated_pairing:.3e} at level index "
          f"{wit.level_prime_index}; demo exit t = {demo.t_exit:.6f}, "
          f"final margin {demo.final_margin:.3e}")
    _emit(cfg, report.render_csv(["step", "t", "margin"], rows),
          figure=lambda path: report.save_margin_figure(demo, path))
    return 0


def cmd_ball_plot(cfg: RunConfig, args) -> int:
    dom = _domain(cfg)
    center = dom.basepoint if args.center is None else json.loads(args.center)
    pts = report.render_metric_ball(dom, center, args.radius,
                                    resolution=args.resolution,
                                    convention=cfg.convention,
                                    config=cfg.optimizer())
    if cfg.fmt == "svg":
        text = report.polyline_svg(pts, dom.bbox)
    else:
        rows = [[i, p[0], p[1]] for i, p in enumerate(pts)]
        text = report.render_csv(["index", "x0", "x1"], rows)
    _emit(cfg, text,
          figure=lambda path: report.save_ball_figure(pts, dom.bbox, path))
    return 0


# ---------------------------------------------------------------------------
# wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagmetric",
        description="Invariant metrics and certificates on projective domains")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--input", help="path to a JSON spec")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--starts", type=int, default=None,
                        help="optimizer restarts (default: library default)")
        sp.add_argument("--convention", choices=("half", "full"),
                        default="half")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--format", dest="fmt", choices=("csv", "svg"),
                        default="csv")

    sp = sub.add_parser("dual", help="emit the dual representation")
    common(sp)
    sp.add_argument("--count", type=int, default=64,
                    help="sampled covectors for parametric duals")
    sp.set_defaults(func=cmd_dual)

    sp = sub.add_parser("metric", help="two-point metric values")
    common(sp)
    sp.add_argument("x", help="JSON coordinates of the first point")
    sp.add_argument("y", help="JSON coordinates of the second point")
    sp.add_argument("--chain-depth", type=int, default=1)
    sp.set_defaults(func=cmd_metric)

    sp = sub.add_parser("certify", help="dual support sweep over the boundary")
    common(sp)
    sp.add_argument("--samples", type=int, default=64)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("invariance", help="metric deviation under a transform")
    common(sp)
    sp.set_defaults(func=cmd_invariance)

    sp = sub.add_parser("complete", help="boundary divergence profiles")
    common(sp)
    sp.add_argument("--probes", type=int, default=8)
    sp.add_argument("--steps", type=int, default=40)
    sp.add_argument("--threshold", type=float, default=5.0)
    sp.set_defaults(func=cmd_complete)

    sp = sub.add_parser("fiber-escape", help="fiber witness and escape demo")
    common(sp)
    sp.set_defaults(func=cmd_fiber_escape)

    sp = sub.add_parser("ball-plot", help="trace a metric sphere polyline")
    common(sp)
    sp.add_argument("--center", help="JSON chart coordinates (default: basepoint)")
    sp.add_argument("--radius", type=float, required=True)
    sp.add_argument("--resolution", type=int, default=32)
    sp.set_defaults(func=cmd_ball_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(command=args.command, input=args.input, seed=args.seed,
                    starts=args.starts, convention=args.convention,
                    out=args.out, fmt=args.fmt)
    if cfg.fmt == "svg" and cfg.command != "ball-plot":
        print("error: --format svg is only available for ball-plot",
              file=sys.stderr)
        return 1
    try:
        return args.func(cfg, args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _COMPUTE_ERRORS as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 2
    except FlagMetricError as exc:  # any remaining library error
        print(f"failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
