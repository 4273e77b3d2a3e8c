"""``hwbound`` command line: kappa | figure | bound | verify.

Exit codes: 0 success or consistent, 1 bound violated by simulation,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass
from typing import Sequence, TextIO

from .bounds import BoundReport, Side, TailQuery, assemble_report
from .constants import figure_grid, solve_kappa
from .montecarlo import (
    DEFAULT_CONFIDENCE,
    MASK64,
    TailEstimate,
    Verdict,
    estimate_tail,
    verify_bound,
)
from .spectral import AsymmetricMatrixError, MatrixError, Spectrum, decompose, read_matrix

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
SEED_ENV = "HWBOUND_SEED"
DEFAULT_SEED = 42
PAPER_R, PAPER_KAPPA = 0.583, 0.1457

SYMMETRIZE_HINT = (
    "hint: --symmetrize replaces A by (A + A^T)/2, which gives the same "
    "quadratic form x^T A x for every x"
)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    matrix_path: str | None = None
    a: float | None = None
    r: float | None = None
    samples: int = 1_000_000
    seed: int = DEFAULT_SEED
    confidence: float = DEFAULT_CONFIDENCE
    steps: int = 999
    side: Side = Side.TWO_SIDED
    symmetrize: bool = False
    output_format: str = "text"
    chunks: int = 1


def g10(x: float) -> str:
    return format(x, "#.10g")


def _uint64(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an unsigned 64-bit integer: {text!r}") from None
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError(f"seed out of unsigned 64-bit range: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--matrix", dest="matrix_path", metavar="PATH", help="matrix text file")
    common.add_argument("--a", type=float, help="deviation threshold a > 0")
    common.add_argument("--r", type=float, help="radius in (0,1); default is the optimal r*")
    common.add_argument("--samples", type=int, default=1_000_000)
    common.add_argument("--seed", type=_uint64, default=None, help=f"default ${SEED_ENV} or {DEFAULT_SEED}")
    common.add_argument("--confidence", type=float, default=DEFAULT_CONFIDENCE)
    common.add_argument("--steps", type=int, default=999)
    common.add_argument("--side", choices=[s.value for s in Side], default=Side.TWO_SIDED.value)
    common.add_argument("--symmetrize", action="store_true", help="use (A + A^T)/2")
    common.add_argument("--output-format", choices=["text", "csv"], default="text")
    common.add_argument("--chunks", type=int, default=None, help="Monte Carlo chunks (default: CPU count)")

    parser = argparse.ArgumentParser(
        prog="hwbound",
        description="Explicit constant and tail bounds for Gaussian quadratic forms of symmetric matrices.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="{kappa,figure,bound,verify}")
    sub.add_parser("kappa", parents=[common], help="optimal radius r* and the constant kappa")
    sub.add_parser("figure", parents=[common], help="CSV of r/4 and 1/(8 xi_r) on a grid")
    sub.add_parser("bound", parents=[common], help="three tail bounds for a matrix and threshold")
    sub.add_parser("verify", parents=[common], help="bounds versus a seeded Monte Carlo estimate")
    return parser


def config_from_args(ns: argparse.Namespace, environ=os.environ) -> RunConfig:
    seed = ns.seed
    if seed is None:
        env = environ.get(SEED_ENV)
        if env:
            try:
                seed = _uint64(env.strip())
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"{SEED_ENV}: {exc}") from None
        else:
            seed = DEFAULT_SEED
    chunks = ns.chunks if ns.chunks is not None else (os.cpu_count() or 1)
    cfg = RunConfig(
        subcommand=ns.subcommand,
        matrix_path=ns.matrix_path,
        a=ns.a,
        r=ns.r,
        samples=ns.samples,
        seed=seed,
        confidence=ns.confidence,
        steps=ns.steps,
        side=Side(ns.side),
        symmetrize=ns.symmetrize,
        output_format=ns.output_format,
        chunks=chunks,
    )
    if cfg.subcommand in ("bound", "verify"):
        if cfg.matrix_path is None:
            raise UsageError(f"{cfg.subcommand} requires --matrix")
        if cfg.a is None:
            raise UsageError(f"{cfg.subcommand} requires --a")
    if cfg.a is not None and not cfg.a > 0:
        raise UsageError(f"--a must be positive, got {cfg.a}")
    if cfg.r is not None and not 0.0 < cfg.r < 1.0:
        raise UsageError(f"--r must lie in (0, 1), got {cfg.r}")
    if cfg.chunks < 1:
        raise UsageError("--chunks must be at least 1")
    return cfg


def run_kappa(cfg: RunConfig, out: TextIO) -> int:
    res = solve_kappa(1e-12)
    if cfg.output_format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["r_star", "kappa", "residual"])
        w.writerow([repr(res.r_star), repr(res.kappa), repr(res.residual)])
        return EXIT_OK
    print(f"r_star    {g10(res.r_star)}", file=out)
    print(f"kappa     {g10(res.kappa)}", file=out)
    print(f"residual  {res.residual:.3e}   (2 r xi_r - 1 at r_star)", file=out)
    print(
        f"figure    min{{r, 1/(2 xi_r)}} peaks at {g10(res.crossing_value)} (reported ~{PAPER_R}); "
        f"a quarter of it is kappa = {g10(res.kappa)} (reported ~{PAPER_KAPPA})",
        file=out,
    )
    return EXIT_OK


def run_figure(cfg: RunConfig, out: TextIO) -> int:
    if cfg.steps < 2:
        raise UsageError(f"--steps must be at least 2, got {cfg.steps}")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["r", "quarter_r", "inv_8xi", "min_term"])
    for row in figure_grid(cfg.steps):
        w.writerow([repr(v) for v in row])
    return EXIT_OK


def _load_spectrum(cfg: RunConfig) -> Spectrum:
    matrix = read_matrix(cfg.matrix_path, "symmetrize" if cfg.symmetrize else "strict")
    return decompose(matrix)


def _report(cfg: RunConfig, spec: Spectrum) -> BoundReport:
    res = solve_kappa(1e-12)
    r = cfg.r if cfg.r is not None else res.r_star
    return assemble_report(spec, TailQuery(cfg.a, cfg.side), r=r, kappa=res.kappa)


def _print_report(spec: Spectrum, rep: BoundReport, out: TextIO) -> None:
    print(f"n                      {spec.n}", file=out)
    print(f"hs_norm_sq             {g10(spec.hs_norm_sq)}", file=out)
    print(f"op_norm                {g10(spec.op_norm)}", file=out)
    print(f"trace                  {g10(spec.trace)}", file=out)
    print(f"lambda_max             {g10(spec.lambda_max)}", file=out)
    print(f"lambda_min             {g10(spec.lambda_min)}", file=out)
    print(f"a                      {g10(rep.a)}", file=out)
    print(f"side                   {rep.side.value}", file=out)
    print(f"kappa                  {g10(rep.kappa)}", file=out)
    print(f"r                      {g10(rep.r_used)}", file=out)
    print(f"universal_exponent     {g10(rep.universal_exponent)}", file=out)
    print(f"parametrized_exponent  {g10(rep.parametrized_exponent)}", file=out)
    print(f"intermediate_exponent  {g10(rep.intermediate_exponent)}", file=out)
    print(f"chernoff_exponent      {g10(rep.chernoff_exponent)}", file=out)
    print(f"t_star                 {g10(rep.t_star)}", file=out)
    print(f"prob_universal         {g10(rep.prob_universal)}", file=out)
    print(f"prob_parametrized      {g10(rep.prob_parametrized)}", file=out)
    print(f"prob_chernoff          {g10(rep.prob_chernoff)}", file=out)


BOUND_CSV = [
    "a", "side", "r", "kappa", "hs_norm_sq", "op_norm",
    "universal_exponent", "parametrized_exponent", "chernoff_exponent", "t_star",
    "prob_universal", "prob_parametrized", "prob_chernoff",
]


def run_bound(cfg: RunConfig, out: TextIO) -> int:
    spec = _load_spectrum(cfg)
    rep = _report(cfg, spec)
    if cfg.output_format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(BOUND_CSV)
        w.writerow([
            g10(rep.a), rep.side.value, g10(rep.r_used), g10(rep.kappa),
            g10(spec.hs_norm_sq), g10(spec.op_norm),
            g10(rep.universal_exponent), g10(rep.parametrized_exponent),
            g10(rep.chernoff_exponent), g10(rep.t_star),
            g10(rep.prob_universal), g10(rep.prob_parametrized), g10(rep.prob_chernoff),
        ])
    else:
        _print_report(spec, rep, out)
    return EXIT_OK


def emit_verify(rep: BoundReport, est: TailEstimate, verdict: Verdict, fmt: str, out: TextIO,
                spec: Spectrum | None = None) -> int:
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["prob_universal", "prob_parametrized", "prob_chernoff", "estimate", "ci_low", "ci_high", "verdict"])
        w.writerow([
            g10(rep.prob_universal), g10(rep.prob_parametrized), g10(rep.prob_chernoff),
            g10(est.point_estimate), g10(est.ci_low), g10(est.ci_high), verdict.value,
        ])
    else:
        if spec is not None:
            _print_report(spec, rep, out)
        print(f"samples                {est.samples}", file=out)
        print(f"seed                   {est.seed}", file=out)
        print(f"chunks                 {est.chunks}", file=out)
        print(f"hits                   {est.hits}", file=out)
        print(f"estimate               {g10(est.point_estimate)}", file=out)
        print(f"ci_{est.confidence:g}".ljust(23) + f"[{g10(est.ci_low)}, {g10(est.ci_high)}]", file=out)
        print(f"verdict                {verdict.value}", file=out)
    return EXIT_VIOLATION if verdict is Verdict.VIOLATION else EXIT_OK


def run_verify(cfg: RunConfig, out: TextIO) -> int:
    spec = _load_spectrum(cfg)
    rep = _report(cfg, spec)
    try:
        est = estimate_tail(
            spec, TailQuery(cfg.a, cfg.side), samples=cfg.samples, seed=cfg.seed,
            confidence=cfg.confidence, chunks=cfg.chunks,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return emit_verify(rep, est, verify_bound(est, rep), cfg.output_format, out, spec)


COMMANDS = {"kappa": run_kappa, "figure": run_figure, "bound": run_bound, "verify": run_verify}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg, out)
    except MatrixError as exc:
        print(f"hwbound: error: {exc}", file=err)
        if isinstance(exc, AsymmetricMatrixError):
            print(SYMMETRIZE_HINT, file=err)
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"hwbound: error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
