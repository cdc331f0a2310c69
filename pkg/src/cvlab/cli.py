"""Command-line entry point: ``cvlab verify``, ``cvlab experiment comparison``, ``cvlab scan indices``.

Exit codes: 0 every check passed, 1 a check failed (or a suite aborted),
2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .config import FORMATS, Config, load_config, parse_config_text
from .errors import ConfigError, CvlabError
from .report import Report, write_report
from .suites import SUITES, SuiteAbort, environment, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def _grid(text: str):
    try:
        vals = tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("grid needs at least one count")
    return vals[0] if len(vals) == 1 else vals


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--format", choices=FORMATS, help="report format (default json)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--grid", type=_grid, help="nodes per axis, one value or one per axis")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a check battery")
    v.add_argument("suite", choices=SUITES)
    _add_common(v)
    v.add_argument("--t-step", type=float)
    v.add_argument("--amplitude-cap", type=float)
    v.add_argument("--random-directions", type=int)
    v.add_argument("--random-functions", type=int)
    v.add_argument("--tt", action="store_const", const=True, dest="tt_directions",
                   help="also run the TT-projected direction (diagnostic, slow)")

    e = sub.add_parser("experiment", help="run a single experiment")
    esub = e.add_subparsers(dest="experiment", required=True)
    c = esub.add_parser("comparison", help="comparison experiment at g = bg + t h")
    _add_common(c)
    for name in ("k", "l", "p", "q"):
        c.add_argument(f"--{name}", type=int, required=True)
    c.add_argument("--t", type=float, required=True)
    c.add_argument("--direction", default="scaling",
                   help="perturbation name; random_trace and random_sym take --seed")

    s = sub.add_parser("scan", help="exhaustive scans")
    ssub = s.add_subparsers(dest="scan", required=True)
    i = ssub.add_parser("indices", help="index inequality over all admissible tuples")
    i.add_argument("--nmax", type=int, required=True)
    i.add_argument("--format", choices=FORMATS)
    i.add_argument("--out")
    return parser


def _config(args) -> Config:
    overrides = {key: getattr(args, key, None)
                 for key in ("seed", "n", "lam", "format", "out", "t_step", "amplitude_cap",
                             "random_directions", "random_functions", "tt_directions")}
    overrides["resolution"] = getattr(args, "grid", None)
    if args.command == "experiment":
        # the experiment's own tuple defines the functional
        n = args.n
        if n is None and args.config is not None:
            with open(args.config, encoding="utf-8") as fh:
                n = parse_config_text(fh.read()).get("n")
        n = 3 if n is None else n
        overrides["specs"] = ((n, args.k, args.l, args.p, args.q),)
    return load_config(getattr(args, "config", None), **overrides)


def _experiment(args, cfg: Config) -> Report:
    from .funlab import FunctionalSpec, comparison_experiment
    from .geom import build_round_sphere, curvature_pack
    from .symcomb import IndexTuple
    from .vary import perturbation

    try:
        spec = FunctionalSpec(IndexTuple(cfg.n, args.k, args.l, args.p, args.q), cfg.lam)
    except CvlabError as exc:
        raise ConfigError(str(exc)) from None
    _, bg = build_round_sphere(cfg.n, cfg.lam, cfg.resolution, cfg.order)
    pack = curvature_pack(bg, keep_riemann=False)
    name = args.direction
    if name in ("random_trace", "random_sym"):
        name = f"{name}:{cfg.seed}"
    try:
        h = perturbation(name, bg, pack)
    except CvlabError as exc:
        raise ConfigError(str(exc)) from None
    rep = comparison_experiment(spec, bg, h, args.t, pack, label=name)
    rep.environment = {**environment(cfg), "experiment": {"direction": name, "t": args.t, **spec.as_dict()}}
    return rep


def _emit(rep: Report, fmt: str, out) -> None:
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            write_report(rep, fmt, fh)
        for line in rep.summary_lines():
            print(line)
        print(f"{'PASS' if rep.passed else 'FAIL'}: {len(rep.checks)} checks, "
              f"{len(rep.failures())} failed -> {out}")
    else:
        write_report(rep, fmt, sys.stdout)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "scan":
            from .symcomb import index_inequality_scan
            if args.nmax < 3:
                raise ConfigError("--nmax must be >= 3")
            rep = index_inequality_scan(args.nmax)
            fmt, out = args.format or "json", args.out
        else:
            cfg = _config(args)
            if args.command == "verify":
                rep = run_suite(args.suite, cfg)
            else:
                rep = _experiment(args, cfg)
            fmt, out = cfg.format, cfg.out
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SuiteAbort as exc:
        print(f"suite aborted at {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CvlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        _emit(rep, fmt, out)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
