"""Batch command-line front end.

Subcommands: run (scenario integration with CSV/JSON/SVG output), distance
(curve-to-curve metrics), align (alignment map as JSON), check (randomized
verification suite), refine-epsilon (mollification-refinement comparison).
"""

import argparse
import json
import os
import sys

import numpy as np

EXIT_OK = 0
EXIT_TOPOLOGY = 2
EXIT_CEILING = 3
EXIT_USAGE = 64


def _load_curve(path):
    from .curves import curve_from_json, resample_constant_speed

    with open(path) as f:
        cur = curve_from_json(f.read())
    if cur.param_kind != "constant_speed":
        cur = resample_constant_speed(cur, cur.n)
    return cur


def _cmd_run(args):
    from .dynamics import run
    from .scenarios import load_config

    cfg = load_config(args.config)
    out_dir = args.out or os.path.splitext(os.path.basename(args.config))[0] + "_out"
    res = run(cfg, out_dir=out_dir)
    print(f"status: {res.status}  t={res.final.t:.6g}  records={len(res.records)}  out={out_dir}")
    if res.perturbed_initially:
        print("note: touching uncontrollable pair detected; initial data was shrunk inward")
    if res.message:
        print(res.message)
    if res.status == "topology_breach":
        return EXIT_TOPOLOGY
    if res.status == "ceiling":
        return EXIT_CEILING
    return EXIT_OK


def _cmd_distance(args):
    from . import metrics

    a = _load_curve(args.curve_a)
    b = _load_curve(args.curve_b)
    fn = {
        "frechet": metrics.frechet_distance,
        "hausdorff": metrics.hausdorff_distance,
        "delta": metrics.pair_distance,
        "D": metrics.l2_deviation,
    }[args.metric]
    print(repr(fn(a, b)))
    return EXIT_OK


def _cmd_align(args):
    from .alignment import align

    a = _load_curve(args.curve_a)
    b = _load_curve(args.curve_b)
    res = align(a, b)
    print(
        json.dumps(
            {
                "phi": [float(v) for v in res.phi],
                "residual": res.residual,
                "phi_prime_range": list(res.phi_prime_range),
                "r": res.r,
                "flow_steps": res.flow_steps,
                "regime": res.regime,
                "frechet": res.frechet,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return EXIT_OK


def _cmd_check(args):
    from .lemma_lab import check_suite

    rep = check_suite(seed=args.seed, trials=args.trials, threads=args.threads)
    print(rep.table())
    if args.json:
        with open(args.json, "w") as f:
            f.write(rep.to_json() + "\n")
    return EXIT_OK if rep.all_passed() else 1


def _cmd_refine_epsilon(args):
    from .dynamics import run
    from .metrics import frechet_distance
    from .scenarios import build_family, load_config

    cfg = load_config(args.config)
    if cfg.epsilon is None:
        fam = build_family(cfg)
        diam = min(float(np.ptp(c.nodes, axis=0).max()) for c in fam.curves)
        cfg.epsilon = 0.1 * diam
    finals = []
    epses = [cfg.epsilon, cfg.epsilon / 2.0, cfg.epsilon / 4.0]
    for eps in epses:
        import copy

        c = copy.deepcopy(cfg)
        c.epsilon = eps
        res = run(c)
        if res.status != "ok":
            print(f"eps={eps:.6g}: run stopped early ({res.status})", file=sys.stderr)
            return 1
        finals.append(res.final.family)
    print("eps_pair,frechet_gap")
    gaps = []
    for k in range(2):
        gap = max(
            frechet_distance(a, b) for a, b in zip(finals[k].curves, finals[k + 1].curves)
        )
        gaps.append(gap)
        print(f"({epses[k]:.6g} vs {epses[k + 1]:.6g}),{gap!r}")
    print(f"monotone_decreasing: {gaps[1] <= gaps[0]}")
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(prog="gsqglab", description=__doc__)
    parser.add_argument("--threads", type=int, default=1, help="worker threads for parallel trials")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a scenario and write diagnostics")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory")

    p = sub.add_parser("distance", help="distance between two curve files")
    p.add_argument("curve_a")
    p.add_argument("curve_b")
    p.add_argument("--metric", default="frechet", choices=["frechet", "hausdorff", "delta", "D"])

    p = sub.add_parser("align", help="alignment map between two curve files")
    p.add_argument("curve_a")
    p.add_argument("curve_b")

    p = sub.add_parser("check", help="run the randomized verification suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--json", default=None, help="also write a JSON report here")

    p = sub.add_parser("refine-epsilon", help="rerun a scenario at eps, eps/2, eps/4")
    p.add_argument("config")

    args = parser.parse_args(argv)
    from .errors import ConfigError

    try:
        handler = {
            "run": _cmd_run,
            "distance": _cmd_distance,
            "align": _cmd_align,
            "check": _cmd_check,
            "refine-epsilon": _cmd_refine_epsilon,
        }[args.command]
        return handler(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
