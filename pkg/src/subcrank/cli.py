"""Command line interface: ``subcrank weights | run | study``.

Every flag may also come from a ``key = value`` config file given with
``--config``; flags on the command line win. Exit status is 0 on success,
2 for parameter errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import harness, kernels
from .errors import DataError, NotSPDError, ParameterError, SingularityError
from .sources import SPATIAL_KEYS, TIME_KINDS
from .stepping import SchemeConfig, run

log = logging.getLogger("subcrank")

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC = 0, 2, 3


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ParameterError(f"{path}:{lineno}: expected key = value")
        out[key.strip().lstrip("-").replace("-", "_")] = val.strip()
    return out


def _int_list(text: str) -> list:
    try:
        return [int(tok) for tok in str(text).replace(" ", "").split(",") if tok]
    except ValueError:
        raise ParameterError(f"bad integer list {text!r}") from None


def _add_problem_args(p: argparse.ArgumentParser):
    p.add_argument("--example", choices=sorted(harness.EXAMPLES))
    p.add_argument("--scheme", choices=["cn1", "cn2"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--mesh", type=int, help="subdivisions per axis")
    p.add_argument("--time", choices=TIME_KINDS, help="override the example's time profile")
    p.add_argument("--cut", type=float, help="cutoff time for cut_power")
    p.add_argument("--spatial", choices=SPATIAL_KEYS, help="override the example's source profile")
    p.add_argument("--initial", choices=SPATIAL_KEYS, help="override the example's initial datum")
    p.add_argument("--final-time", type=float, dest="final_time")
    p.add_argument("--solver", choices=["cholesky", "cg"], default="cholesky")


def build_parser() -> argparse.ArgumentParser:
    return _build()[0]


def _build():
    parser = argparse.ArgumentParser(prog="subcrank", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value file supplying defaults for any flag")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    subs = {}
    subs["weights"] = p = sub.add_parser("weights", help="print Grunwald-Letnikov weights sigma_0..sigma_n")
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", type=int)

    subs["run"] = p = sub.add_parser("run", help="solve one problem and write the final-time solution")
    _add_problem_args(p)
    p.add_argument("--nsteps", type=int)
    p.add_argument("--out")

    subs["study"] = p = sub.add_parser("study", help="self-convergence study over a doubling N list")
    _add_problem_args(p)
    p.add_argument("--nsteps-list", dest="nsteps_list", default="80,160,320,640")
    p.add_argument("--format", choices=["csv", "md"], default="csv")
    p.add_argument("--summary", choices=["lsq", "last"], default="lsq")
    p.add_argument("--out")
    return parser, subs


def _parse(argv):
    parser, subs = _build()
    args = parser.parse_args(argv)
    if args.config:
        conf = read_config(args.config)
        sub = subs[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, val in conf.items():
            if key not in known:
                raise ParameterError(f"unknown config key {key!r} for '{args.command}'")
            action = known[key]
            if action.choices is not None and val not in action.choices:
                raise ParameterError(f"config value {val!r} for {key} not in {list(action.choices)}")
            try:
                defaults[key] = action.type(val) if action.type else val
            except ValueError:
                raise ParameterError(f"bad config value {val!r} for {key}") from None
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + m.replace("_", "-") for m in missing)
        raise ParameterError(f"missing required option(s): {flags}")


def _example_from_args(args) -> harness.ExampleSpec:
    ex = harness.EXAMPLES[args.example]
    changes = {}
    if args.time is not None:
        changes["time_kind"] = args.time
    if args.cut is not None:
        changes["cut"] = args.cut
    if args.spatial is not None:
        changes["spatial"] = args.spatial
    if args.initial is not None:
        changes["initial"] = args.initial
    if args.final_time is not None:
        changes["T"] = args.final_time
    if changes:
        ex = replace(ex, id=ex.id + "*", **changes)
    return ex


def cmd_weights(args) -> int:
    _require(args, "alpha", "n")
    w = kernels.gl_weights(args.alpha, args.n)
    sys.stdout.write("".join(f"{s:.17g}\n" for s in w.sigma))
    return EXIT_OK


def cmd_run(args) -> int:
    _require(args, "example", "scheme", "alpha", "nsteps")
    ex = _example_from_args(args)
    system, sources, initial = harness.build_problem(ex, args.mu, args.mesh)
    cfg = SchemeConfig(args.scheme, args.alpha, args.nsteps, system, sources, initial, T=ex.T, solver=args.solver)
    result = run(cfg, keep_history=False)
    coords = system.mesh.interior_coords()
    names = ["x", "y"][: coords.shape[1]]
    lines = [",".join(names + ["u"])]
    lines += [",".join(f"{c:.17g}" for c in row) for row in np.column_stack([coords, result.u_final])]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_study(args) -> int:
    _require(args, "example", "scheme", "alpha")
    ex = _example_from_args(args)
    report = harness.run_study(
        ex, args.scheme, args.alpha, args.mu, _int_list(args.nsteps_list),
        M=args.mesh, summary=args.summary, solver=args.solver,
    )
    text = harness.emit(report, args.format, args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parse(argv)
    except (ParameterError, OSError) as exc:
        print(f"subcrank: error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except SystemExit as exc:
        # argparse reports usage errors with status 2
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"weights": cmd_weights, "run": cmd_run, "study": cmd_study}[args.command]
    try:
        return handler(args)
    except (ParameterError, DataError, SingularityError) as exc:
        print(f"subcrank: error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (NotSPDError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"subcrank: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"subcrank: I/O error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
