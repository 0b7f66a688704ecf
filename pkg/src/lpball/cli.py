"""Command-line entry point.

Exit codes: 0 success, 1 configuration or domain error, 2 numerical
failure, 3 a ``verify`` run with a non-passing verdict. Errors go to stderr
as one line ``lpball-error tag=<tag>: <message>``.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .distributions import Dirac0, Exponential, Gamma, MixingLaw, sample_ball
from .errors import ConfigError, LpBallError, NumericalError
from .harness import load_config, mixing_rate_for_law, run_experiment
from .ratefun import (
    ldp_rate_p_eq_q,
    ldp_rate_projection,
    ldp_rate_qgtp,
    ldp_rate_qltp,
    ldp_rate_width,
    legendre_fenchel,
    mdp_rate,
)
from .specfun import BallParams, clt_variance, covariance_matrix, m_p, proj_variance_det, proj_variance_random

__all__ = ["main", "build_parser", "parse_grid", "parse_law"]

OUTPUT_ENV = "LPBALL_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERDICT = 0, 1, 2, 3

RATE_KINDS = {
    "mdp": "b_n^2",
    "ldp_qgtp": "n^(p/q)",
    "ldp_qltp": "n",
    "ldp_peq": "n",
    "ldp_width": "n^(p/q)",
    "ldp_projection": "n^(p/q)",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are configuration errors, exit 1
        raise ConfigError(message)


def _fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` with both endpoints included, or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1 or (count == 1 and start != stop):
                raise ConfigError(f"grid {text!r}: count must be >= 1 (== 1 only when start == stop)")
            return np.linspace(start, stop, count)
    except ValueError:
        pass
    raise ConfigError(f"grid must be 'start:stop:count' or a number, got {text!r}")


def parse_law(text: str) -> MixingLaw:
    """``Dirac0``, ``Exponential:<rate>`` or ``Gamma:<shape>:<rate>``."""
    name, *args = text.split(":")
    try:
        if name == "Dirac0" and not args:
            return Dirac0()
        if name == "Exponential" and len(args) == 1:
            return Exponential(float(args[0]))
        if name == "Gamma" and len(args) == 2:
            return Gamma(float(args[0]), float(args[1]))
    except ValueError as exc:
        raise ConfigError(f"bad mixing law {text!r}: {exc}") from exc
    raise ConfigError(f"mixing law must be Dirac0, Exponential:<rate> or Gamma:<shape>:<rate>, got {text!r}")


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _output_dir(args) -> Optional[Path]:
    d = args.output_dir or os.environ.get(OUTPUT_ENV)
    return Path(d) if d else None


def _emit(args, filename: str, text: str) -> None:
    """Write to ``<output dir>/<filename>`` when an output directory is set, else to stdout."""
    out = _output_dir(args)
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out / filename, text)


# ---------------------------------------------------------------- subcommands


def cmd_constants(args) -> int:
    p, q = args.p, args.q
    cov = covariance_matrix(p, q)
    sigma2 = clt_variance(p, q)
    header = ["p", "q", "m_p", "clt_variance", "cov_qq", "cov_qp", "cov_pp", "proj_variance_random",
              "proj_variance_det"]
    row = [p, q, m_p(p, q), sigma2, cov.c11, cov.c12, cov.c22, proj_variance_random(p, args.lam),
           proj_variance_det(p, args.lam)]
    _emit(args, "constants.csv", _csv(header, [[_fmt(float(v)) for v in row]]))
    return EXIT_OK


def cmd_sample(args) -> int:
    law = parse_law(args.law)
    params = BallParams(args.p, args.p if args.q is None else args.q, args.n)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    point = sample_ball(params, law, rng, size=args.count)
    if args.coords:
        header = ["draw_index"] + [f"x{i + 1}" for i in range(args.n)]
        rows = ([i] + [_fmt(v) for v in z] for i, z in enumerate(point.coords))
    else:
        header = ["draw_index", "value"]
        rows = ([i, _fmt(v)] for i, v in enumerate(point.norm(params.q)))
    _emit(args, "sample.csv", _csv(header, rows))
    return EXIT_OK


def _rate_function(args):
    p, q, kind = args.p, args.q, args.kind
    if kind == "mdp":
        return lambda x: mdp_rate(x, p, q)
    if kind == "ldp_qgtp":
        return lambda x: ldp_rate_qgtp(x, p, q)
    if kind == "ldp_width":
        return lambda x: ldp_rate_width(x, q)
    if kind == "ldp_projection":
        return lambda x: ldp_rate_projection(x, p, args.lam)
    iw = mixing_rate_for_law(parse_law(args.law))
    if kind == "ldp_qltp":
        return lambda x: ldp_rate_qltp(x, p, q, iw)
    return lambda x: ldp_rate_p_eq_q(x, p, iw)


def cmd_rate(args) -> int:
    grid = parse_grid(args.grid)
    f = _rate_function(args)
    speed = RATE_KINDS[args.kind]
    rows = [[_fmt(float(x)), _fmt(float(f(float(x)))), speed] for x in grid]
    _emit(args, f"rate_{args.kind}.csv", _csv(["x", "rate", "speed_kind"], rows))
    return EXIT_OK


def cmd_conjugate(args) -> int:
    rows, failed = [], False
    for s1 in parse_grid(args.s1):
        for s2 in parse_grid(args.s2):
            cp = legendre_fenchel(float(s1), float(s2), args.p, args.q)
            failed |= not (cp.converged or cp.status == "unbounded")
            rows.append([_fmt(float(s1)), _fmt(float(s2)), _fmt(float(cp.value)), _fmt(cp.argmax[0]),
                         _fmt(cp.argmax[1]), "true" if cp.converged else "false"])
    if failed:
        raise NumericalError("the transform did not converge at some grid point")
    _emit(args, "conjugate.csv", _csv(["s1", "s2", "value", "t1", "t2", "converged"], rows))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    report = run_experiment(cfg, threads=args.threads)
    out = _output_dir(args) or Path(".")
    # render both documents before touching the file system
    csv_text, json_text = report.to_csv(), report.to_json()
    _atomic_write(out / f"{cfg.name}.csv", csv_text)
    _atomic_write(out / f"{cfg.name}.json", json_text)
    for v in report.verdicts:
        print(v.line())
    return EXIT_OK if report.passed else EXIT_VERDICT


# ---------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text!r}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output-dir", help=f"write files here (default: ${OUTPUT_ENV}, else stdout)")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--seed", type=_seed, default=None)

    parser = _Parser(prog="lpball", description="Random vectors in l_p^n balls: constants, rates, experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("constants", parents=[common], help="moments, CLT variance and projection variances")
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--q", type=float, required=True)
    c.add_argument("--lam", type=float, default=1.0, help="projection ratio lambda in (0, 1]")
    c.set_defaults(func=cmd_constants)

    s = sub.add_parser("sample", parents=[common], help="draw points of the ball and emit norms or coordinates")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--q", type=float, default=None, help="norm to report (default: p)")
    s.add_argument("--law", default="Dirac0")
    s.add_argument("--count", type=_positive_int, default=1000)
    s.add_argument("--coords", action="store_true", help="emit coordinates instead of norms")
    s.set_defaults(func=cmd_sample)

    r = sub.add_parser("rate", parents=[common], help="tabulate a rate function on a grid")
    r.add_argument("--kind", choices=sorted(RATE_KINDS), required=True)
    r.add_argument("--p", type=float, default=2.0)
    r.add_argument("--q", type=float, default=1.0)
    r.add_argument("--lam", type=float, default=1.0)
    r.add_argument("--law", default="Dirac0", help="mixing law for ldp_qltp and ldp_peq")
    r.add_argument("--grid", required=True, help="start:stop:count, endpoints included")
    r.set_defaults(func=cmd_rate)

    j = sub.add_parser("conjugate", parents=[common], help="Legendre-Fenchel transform of the joint log-MGF")
    j.add_argument("--p", type=float, required=True)
    j.add_argument("--q", type=float, required=True)
    j.add_argument("--s1", required=True, help="number or start:stop:count")
    j.add_argument("--s2", required=True, help="number or start:stop:count")
    j.set_defaults(func=cmd_conjugate)

    v = sub.add_parser("verify", parents=[common], help="run a Monte Carlo experiment from a JSON config")
    v.add_argument("--config", required=True)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "sample" and args.seed is None:
            args.seed = 0
        return args.func(args)
    except NumericalError as exc:
        err, code = exc, EXIT_NUMERIC
    except (LpBallError, ValueError, OSError) as exc:
        err, code = exc, EXIT_CONFIG
    tag = getattr(err, "tag", "config")
    msg = " ".join(str(err).split())
    print(f"lpball-error tag={tag}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
