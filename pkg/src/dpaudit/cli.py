"""Command-line front end.

Subcommands: simulate, audit, tradeoff, compose, fit-gdp, canary. Every
command is deterministic given its full flag set including --seed.

Exit codes: 0 success, 2 usage/config errors, 3 input-data errors,
4 numeric-grid overflow, 5 fit failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import pld
from .canary import OneShotConfig, WhiteBoxConfig, one_shot_audit, whitebox_stream
from .errors import FitError, GridOverflowError, ScoreFileError
from .estimators import AuditConfig, fit_mu_gdp, histogram_audit, spec_from_config
from .histogram import build_histograms
from .mechanisms import (GaussianMechanism, LaplaceMechanism,
                         SubsampledGaussianMechanism, gaussian_delta)
from .profiles import PrivacyProfile
from .scores import read_scores, write_scores
from .tradeoff import profile_to_tradeoff

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_GRID = 4
EXIT_FIT = 5


class UsageError(Exception):
    pass


def _parse_eps_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, m = text.split(":")
        return (float(lo), float(hi), int(m))
    except ValueError:
        raise UsageError(f"--eps-grid expects lo:hi:m, got {text!r}") from None


def _parse_pld_grid(text: str) -> tuple[float, int]:
    try:
        half, m = text.split(":")
        return (float(half), int(m))
    except ValueError:
        raise UsageError(f"--grid expects L:m, got {text!r}") from None


def _mechanism_from_args(args) -> object:
    name = args.mechanism
    if name == "gaussian":
        return GaussianMechanism(args.sigma, args.sensitivity)
    if name == "subsampled-gaussian":
        if args.q is None:
            raise UsageError("subsampled-gaussian requires --q")
        return SubsampledGaussianMechanism(args.q, args.sigma)
    if name == "laplace":
        return LaplaceMechanism(args.scale, args.sensitivity)
    raise UsageError(f"unknown mechanism {name!r}")


def _sigma_forward_map(spec_text: str):
    """Parse --fit-sigma (gaussian | mixture:q=<val>) into a sigma -> TV map."""
    if spec_text == "gaussian":
        return lambda s: gaussian_delta(0.0, s, 1.0)
    if spec_text.startswith("mixture:q="):
        try:
            q = float(spec_text.split("=", 1)[1])
        except ValueError:
            raise UsageError(f"bad --fit-sigma value {spec_text!r}") from None
        return lambda s: SubsampledGaussianMechanism(q, s).tv()
    raise UsageError(f"--fit-sigma expects 'gaussian' or 'mixture:q=<val>', got {spec_text!r}")


def _audit_config(args) -> AuditConfig:
    if args.bins is not None:
        mode, bins = "fixed-k", args.bins
    elif args.bin_width is not None:
        mode, bins = "fixed-width", None
    else:
        mode, bins = "scott-gaussian", None
    return AuditConfig(binning_mode=mode, bins=bins, bin_width=args.bin_width,
                       delta_targets=tuple(args.delta),
                       confidence=args.confidence,
                       eps_grid=_parse_eps_grid(args.eps_grid))


def _load_equal_pair(path_p, path_q):
    scores_p = read_scores(path_p)
    scores_q = read_scores(path_q)
    if scores_p.size != scores_q.size:
        raise ScoreFileError(
            f"unequal sample counts: {path_p} has {scores_p.size}, "
            f"{path_q} has {scores_q.size}", None)
    return scores_p, scores_q


def _print_report_lines(report) -> None:
    for est in report.epsilons:
        point = "nan" if est.point is None else f"{est.point:.6g}"
        lower = "nan" if est.lower is None else f"{est.lower:.6g}"
        print(f"delta={est.delta:.6g} eps={point} eps_lower={lower}")


def _write_report(report, args) -> None:
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    if getattr(args, "curve", None) and report.tradeoff_estimate is not None:
        report.tradeoff_estimate.to_csv(args.curve)
    if getattr(args, "curve_bound", None) and report.tradeoff_bound is not None:
        report.tradeoff_bound.to_csv(args.curve_bound)


def cmd_simulate(args) -> int:
    if args.n < 1:
        raise UsageError("n must be >= 1")
    mech = _mechanism_from_args(args)
    scores_p, scores_q = mech.sample_pair(args.n, args.seed)
    write_scores(args.out_p, scores_p)
    write_scores(args.out_q, scores_q)
    return EXIT_OK


def cmd_audit(args) -> int:
    scores_p, scores_q = _load_equal_pair(args.in_p, args.in_q)
    config = _audit_config(args)
    forward = _sigma_forward_map(args.fit_sigma) if args.fit_sigma else None
    report = histogram_audit(scores_p, scores_q, config, sigma_forward_map=forward)
    for est in report.epsilons:
        if est.point is None:
            print(f"warning: delta target {est.delta:.6g} unreachable on the "
                  "configured eps grid", file=sys.stderr)
    _print_report_lines(report)
    _write_report(report, args)
    return EXIT_OK


def cmd_tradeoff(args) -> int:
    profile = PrivacyProfile.from_csv(args.profile)
    curve = profile_to_tradeoff(profile, args.delta_target, args.points, strict=False)
    curve.to_csv(args.out)
    return EXIT_OK


def cmd_compose(args) -> int:
    if args.compositions < 1:
        raise UsageError("--compositions must be >= 1")
    scores_p, scores_q = _load_equal_pair(args.in_p, args.in_q)
    config = _audit_config(args)
    spec = spec_from_config(scores_p, scores_q, config)
    hist = build_histograms(scores_p, scores_q, spec)
    lo, hi, m = config.eps_grid
    eps_grid = np.linspace(lo, hi, int(m))
    profile = pld.compose_profile(hist.p_hat, hist.q_hat, args.compositions,
                                  eps_grid, grid=_parse_pld_grid(args.grid),
                                  label=f"composed-c{args.compositions}")
    if args.csv:
        profile.to_csv(args.csv)
    if args.json:
        doc = {
            "method": "composed-heuristic",
            "compositions": args.compositions,
            "n": int(scores_p.size),
            "heuristic": True,
            "binning": {"a": spec.a, "b": spec.b, "k": spec.k, "h": spec.h},
            "profile": [{"epsilon": float(e), "delta": float(d)}
                        for e, d in zip(profile.epsilons, profile.deltas)],
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    for e, d in zip(profile.epsilons[:: max(1, (len(profile.epsilons) - 1) // 8)],
                    profile.deltas[:: max(1, (len(profile.epsilons) - 1) // 8)]):
        print(f"epsilon={e:.6g} delta={d:.6g}")
    return EXIT_OK


def cmd_fit_gdp(args) -> int:
    if args.profile:
        try:
            profile = PrivacyProfile.from_csv(args.profile)
        except ValueError as exc:
            raise FitError(f"cannot fit this profile: {exc}") from exc
    else:
        if not (args.in_p and args.in_q):
            raise UsageError("fit-gdp needs --profile or both score files")
        scores_p, scores_q = _load_equal_pair(args.in_p, args.in_q)
        config = _audit_config(args)
        report = histogram_audit(scores_p, scores_q, config)
        profile = report.profile
    lo, hi = args.eps_range.split(":")
    mu = fit_mu_gdp(profile, (float(lo), float(hi)))
    print(f"mu={mu:.6g}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"mu": mu, "eps_range": [float(lo), float(hi)]}, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def cmd_canary(args) -> int:
    if args.mode == "one-shot":
        cfg = OneShotConfig(d=args.d, n=args.n, sigma=args.sigma,
                            x_norm=args.x_norm, seed=args.seed)
        if args.audit:
            report = one_shot_audit(cfg, _audit_config(args))
            _print_report_lines(report)
            _write_report(report, args)
        if args.out_p or args.out_q:
            from .canary import _one_shot_scores_streamed
            scores_p, scores_q = _one_shot_scores_streamed(cfg)
            if args.out_p:
                write_scores(args.out_p, scores_p)
            if args.out_q:
                write_scores(args.out_q, scores_q)
        return EXIT_OK
    cfg = WhiteBoxConfig(iterations=args.iterations, canary_prob=args.canary_prob,
                         data_prob=args.data_prob, sigma=args.sigma,
                         clip=args.clip, d=args.d, seed=args.seed,
                         nuisance_norm=args.nuisance_norm)
    out, out_primed = whitebox_stream(cfg)
    if args.out_p:
        write_scores(args.out_p, out_primed)
    if args.out_q:
        write_scores(args.out_q, out)
    if args.audit:
        report = histogram_audit(out_primed, out, _audit_config(args))
        _print_report_lines(report)
        _write_report(report, args)
    return EXIT_OK


def _add_audit_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bins", type=int, default=None,
                        help="fixed bin count (default: Scott auto-binning)")
    parser.add_argument("--auto-bins", action="store_true",
                        help="explicit request for Scott auto-binning (the default)")
    parser.add_argument("--bin-width", type=float, default=None,
                        help="fixed bin width")
    parser.add_argument("--delta", type=float, nargs="+", default=[0.01, 0.05, 0.1],
                        help="delta targets for the epsilon estimates")
    parser.add_argument("--confidence", type=float, default=0.99)
    parser.add_argument("--eps-grid", default="-10:10:2001",
                        help="profile tabulation grid lo:hi:m")
    parser.add_argument("--json", default=None, help="write the report as JSON")
    parser.add_argument("--curve", default=None, help="write the trade-off curve CSV")
    parser.add_argument("--curve-bound", default=None,
                        help="write the confidence-bound trade-off curve CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpaudit",
        description="Empirical differential-privacy auditing from score samples")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw scores from an analytic mechanism pair")
    p.add_argument("--mechanism", required=True,
                   choices=["gaussian", "subsampled-gaussian", "laplace"])
    p.add_argument("--sigma", type=float, default=1.0, help="noise scale (gaussian family)")
    p.add_argument("--q", type=float, default=None, help="subsampling ratio")
    p.add_argument("--scale", type=float, default=1.0, help="laplace noise scale")
    p.add_argument("--sensitivity", type=float, default=1.0)
    p.add_argument("-n", type=int, required=True, help="samples per side")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("out_p")
    p.add_argument("out_q")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit", help="histogram audit of two score files")
    p.add_argument("in_p")
    p.add_argument("in_q")
    _add_audit_flags(p)
    p.add_argument("--fit-sigma", default=None,
                   help="attach a sigma estimate: 'gaussian' or 'mixture:q=<val>'")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("tradeoff", help="convert a profile CSV to a trade-off curve CSV")
    p.add_argument("profile")
    p.add_argument("--delta-target", type=float, default=1e-3)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("compose", help="heuristic composed profile from score files")
    p.add_argument("in_p")
    p.add_argument("in_q")
    p.add_argument("--compositions", type=int, required=True)
    p.add_argument("--grid", default="40:1048576", help="PLD grid L:m")
    _add_audit_flags(p)
    p.add_argument("--csv", default=None, help="write the composed profile CSV")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("fit-gdp", help="fit the GDP parameter of a profile")
    p.add_argument("--profile", default=None, help="profile CSV (epsilon,delta)")
    p.add_argument("--in-p", dest="in_p", default=None)
    p.add_argument("--in-q", dest="in_q", default=None)
    p.add_argument("--eps-range", default="0:6.5")
    _add_audit_flags(p)
    p.set_defaults(func=cmd_fit_gdp)

    p = sub.add_parser("canary", help="synthetic canary simulators")
    p.add_argument("--mode", required=True, choices=["one-shot", "white-box"])
    p.add_argument("-d", type=int, required=True, help="dimension")
    p.add_argument("-n", type=int, default=1, help="canaries per side (one-shot)")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--x-norm", type=float, default=0.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--canary-prob", type=float, default=1.0)
    p.add_argument("--data-prob", type=float, default=1.0)
    p.add_argument("--clip", type=float, default=1.0)
    p.add_argument("--nuisance-norm", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-p", default=None, help="score file for the held-in side")
    p.add_argument("--out-q", default=None, help="score file for the held-out side")
    p.add_argument("--audit", action="store_true", help="chain the histogram audit")
    _add_audit_flags(p)
    p.set_defaults(func=cmd_canary)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScoreFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GridOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRID
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
