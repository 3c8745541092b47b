"""Command-line front door: run experiments, emit CSV/JSON reports.

Determinism contract: for a fixed command line (and seed where applicable)
the report bytes are identical run to run and across thread counts.  All
reductions are exactly rounded, per-trial seeds are derived from the root
seed, and wall-clock timings are suppressed from reports unless --timings is
given (they always go to the stderr audit line, which also records the
library version and the full effective configuration).

Exit codes: 0 ok, 1 invalid configuration, 2 scale-guard violation,
3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from . import __version__
from .arith import sieve_spf
from .congruence import (
    A_d,
    A_d_main,
    B_d,
    B_d_main,
    ModelWeights,
    appendix_Ad,
    crop_congruence_terms,
)
from .constants import H_constant, c_constant, kappa
from .errors import GuardError, InternalCheckError
from .gaussint import GaussInt, solve_omega
from .large_sieve import ls_campaign
from .prime_sums import W_and_I, sum_APT, sum_G, sum_H, sum_S
from .weights import GammaWeights, LambdaWeights, crop_build, crop_w_build

__all__ = ["RunConfig", "run", "emit_csv", "emit_json", "main"]

_THREAD_ENV = "GAUSSLAB_THREADS"
_COMMANDS = (
    "constants",
    "gsum",
    "hsum",
    "apt",
    "ssum",
    "congruence",
    "model",
    "appendix",
    "largesieve",
    "omega",
)


@dataclass
class RunConfig:
    """Fully resolved invocation; everything the run depends on."""

    command: str
    x_list: list[int] = field(default_factory=list)
    r: int = 1
    pmax: int = 10**6
    d_max: int = 25
    d_list: list[int] = field(default_factory=list)
    trials: int = 100
    h_max: int = 10
    ls_x_max: int = 1000
    ls_n_max: int = 1000
    threads: int = 1
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    timings: bool = False
    ramp_delta: float | None = None
    m1: str = "1+2i"
    m2: str = "3+2i"
    h: int = 1

    def validate(self) -> None:
        if self.command not in _COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        for x in self.x_list:
            if x < 1:
                raise ValueError("scales must be positive")


def parse_scale(text: str) -> int:
    """Exact integer from decimal or scientific notation; overflow rejected."""
    try:
        d = Decimal(text)
    except InvalidOperation as e:
        raise ValueError(f"not a number: {text!r}") from e
    if d != d.to_integral_value():
        raise ValueError(f"scale {text!r} is not an integer")
    n = int(d)
    if abs(n) > 10**18:
        raise ValueError(f"scale {text!r} overflows the supported range")
    return n


def parse_scale_list(text: str) -> list[int]:
    return [parse_scale(part) for part in text.split(",") if part]


def parse_gauss(text: str) -> GaussInt:
    m = re.fullmatch(r"\s*(-?\d+)\s*([+-])\s*(\d+)i\s*", text)
    if not m:
        raise ValueError(f"cannot parse Gaussian integer {text!r} (want e.g. 1+2i)")
    re_part = int(m.group(1))
    im_part = int(m.group(3))
    if m.group(2) == "-":
        im_part = -im_part
    return GaussInt(re_part, im_part)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def emit_csv(header: list[str], rows: list[list]) -> bytes:
    """RFC-4180-style CSV: comma separator, LF endings, header row, floats at
    12 significant digits, no locale formatting."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue().encode("ascii")


def emit_json(header: list[str], rows: list[list]) -> bytes:
    """Flat JSON mirror of the CSV: a list of one object per row."""
    out = [
        {k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in zip(header, row)}
        for row in rows
    ]
    return (json.dumps(out, indent=1) + "\n").encode("ascii")


def _seconds(cfg: RunConfig, measured: float) -> float:
    return measured if cfg.timings else 0.0


def _report_rows(cfg: RunConfig) -> tuple[list[str], list[list], list[str]]:
    """Execute the command; returns (header, rows, audit notes)."""
    notes: list[str] = []
    if cfg.command == "constants":
        header = ["constant", "pmax", "value", "tail_bound"]
        rows = []
        for name, res in (
            ("c", c_constant(cfg.pmax)),
            ("kappa", kappa(cfg.pmax)),
            ("H_via_kappa", H_constant(cfg.pmax, "via_kappa")),
            ("H_raw", H_constant(cfg.pmax, "raw")),
        ):
            rows.append([name, res.pmax, res.value, res.tail_bound])
        return header, rows, notes

    if cfg.command in ("gsum", "hsum", "apt"):
        xs = cfg.x_list or [10**6]
        limit = max(10**4, max(math.isqrt(x) for x in xs) + 1)
        table = sieve_spf(limit)
        rows = []
        if cfg.command == "apt":
            header = ["x", "sum", "reference", "ratio", "pairs", "seconds"]
            for x in xs:
                rep = sum_APT(x, table, threads=cfg.threads)
                rows.append([x, rep.sum_value, rep.reference, rep.ratio,
                             rep.pair_count, _seconds(cfg, rep.elapsed)])
                notes.append(f"apt x={x} elapsed={rep.elapsed:.3f}s")
        else:
            header = ["x", "r", "sum", "reference", "ratio", "pairs", "seconds"]
            fn = sum_G if cfg.command == "gsum" else sum_H
            for x in xs:
                rep = fn(x, cfg.r, table, threads=cfg.threads)
                rows.append([x, rep.r, rep.sum_value, rep.reference, rep.ratio,
                             rep.pair_count, _seconds(cfg, rep.elapsed)])
                extra = (
                    f" reference_without_r_factor={rep.reference_alt:.12g}"
                    if rep.reference_alt is not None
                    else ""
                )
                notes.append(f"{cfg.command} x={x} elapsed={rep.elapsed:.3f}s{extra}")
        return header, rows, notes

    if cfg.command == "ssum":
        xs = cfg.x_list or [10**6]
        limit = max(10**4, max(math.isqrt(x) for x in xs) + 1)
        table = sieve_spf(limit)
        lam = LambdaWeights.delta_one()
        gamma = GammaWeights.log_on_odd_primes()
        header = ["x", "sum", "reference", "ratio", "pairs", "seconds"]
        rows = []
        for x in xs:
            f = crop_build(x, cfg.ramp_delta)
            rep = sum_S(x, f, lam, gamma, table, threads=cfg.threads)
            rows.append([x, rep.sum_value, rep.reference, rep.ratio,
                         rep.pair_count, _seconds(cfg, rep.elapsed)])
            notes.append(f"ssum x={x} elapsed={rep.elapsed:.3f}s")
        return header, rows, notes

    if cfg.command == "congruence":
        x = (cfg.x_list or [10**6])[0]
        table = sieve_spf(max(10**4, math.isqrt(x) + 1))
        lam = LambdaWeights.delta_one()
        gamma = GammaWeights.log_on_odd_primes()
        f = crop_build(x, cfg.ramp_delta)
        terms = crop_congruence_terms(x, lam, gamma, f, table)
        w_of_x = W_and_I(x, f, gamma, table)[0]
        header = ["x", "d", "a_d", "main", "r_d"]
        rows = []
        resid = []
        for d in range(1, cfg.d_max + 1, 2):
            ad = A_d(x, d, lam, gamma, f, table, terms=terms)
            main = A_d_main(x, d, lam, gamma, f, table, w_of_x=w_of_x)
            rows.append([x, d, ad, main, ad - main])
            resid.append(abs(ad - main))
        big_r = math.fsum(resid)
        bound = lam.y * math.sqrt(cfg.d_max * x) * math.log(x)
        notes.append(f"congruence R(x,D)={big_r:.12g} comparator={bound:.12g}")
        return header, rows, notes

    if cfg.command == "model":
        x = (cfg.x_list or [10**6])[0]
        table = sieve_spf(max(10**4, x))
        lam = LambdaWeights.delta_one()
        w = crop_w_build()
        psi = ModelWeights.psi_array(x, table)
        ds = cfg.d_list or [5, 13, 25]
        header = ["x", "d", "b_d", "main", "ratio"]
        rows = []
        for d in ds:
            bd = B_d(x, d, lam, w, table, psi=psi)
            main = B_d_main(x, d, lam, table)
            rows.append([x, d, bd, main, bd / main if main else math.nan])
        return header, rows, notes

    if cfg.command == "appendix":
        x = (cfg.x_list or [10**5])[0]
        table = sieve_spf(max(10**4, x))
        header = ["x", "d", "a_d", "main", "r_d"]
        rows = []
        for d in range(1, cfg.d_max + 1, 2):
            ad, main, rd = appendix_Ad(x, d, table)
            rows.append([x, d, ad, main, rd])
        return header, rows, notes

    if cfg.command == "largesieve":
        table = sieve_spf(max(10**4, 2 * cfg.ls_x_max))
        trials, max_ratio = ls_campaign(
            cfg.trials, cfg.h_max, cfg.ls_x_max, cfg.ls_n_max, cfg.seed, table
        )
        header = ["trial", "kind", "h", "X", "N", "lhs", "rhs", "ratio"]
        rows = [
            [i, t.kind, t.h, t.X, t.N, t.lhs, t.rhs, t.ratio]
            for i, t in enumerate(trials)
        ]
        notes.append(f"largesieve max_ratio={max_ratio:.12g}")
        return header, rows, notes

    if cfg.command == "omega":
        m1 = parse_gauss(cfg.m1)
        m2 = parse_gauss(cfg.m2)
        cls = solve_omega(m1, m2, cfg.h)
        header = ["m1", "m2", "h", "delta", "modulus", "omega"]
        rows = [[str(m1), str(m2), cfg.h, cls.delta, cls.modulus, cls.omega]]
        return header, rows, notes

    raise ValueError(f"unknown command {cfg.command!r}")


def run(cfg: RunConfig) -> int:
    """Execute a validated config; writes the report and returns the exit code."""
    cfg.validate()
    t0 = time.perf_counter()
    header, rows, notes = _report_rows(cfg)
    payload = emit_csv(header, rows) if cfg.format == "csv" else emit_json(header, rows)
    if cfg.out:
        with open(cfg.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    elapsed = time.perf_counter() - t0
    audit = {k: v for k, v in vars(cfg).items()}
    print(
        f"gausslab {__version__} elapsed={elapsed:.3f}s config={audit}",
        file=sys.stderr,
    )
    for note in notes:
        print(f"gausslab: {note}", file=sys.stderr)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gausslab", exit_on_error=False)
    p.add_argument("command", choices=_COMMANDS)
    p.add_argument("--x", type=parse_scale_list, default=None,
                   help="comma-separated scales, scientific notation ok")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--pmax", type=parse_scale, default=10**6)
    p.add_argument("--dmax", type=int, default=25)
    p.add_argument("--d", type=parse_scale_list, default=None,
                   help="explicit modulus list (model command)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--hmax", type=int, default=10)
    p.add_argument("--ls-xmax", type=int, default=1000)
    p.add_argument("--ls-nmax", type=int, default=1000)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock seconds in the report "
                        "(off by default to keep reports byte-reproducible)")
    p.add_argument("--ramp-delta", type=float, default=None)
    p.add_argument("--m1", type=str, default="1+2i")
    p.add_argument("--m2", type=str, default="3+2i")
    p.add_argument("--h", type=int, default=1)
    return p


def config_from_argv(argv: list[str]) -> RunConfig:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except (argparse.ArgumentError, SystemExit) as e:
        raise ValueError(f"invalid arguments: {e}") from e
    threads = ns.threads
    if threads is None:
        env = os.environ.get(_THREAD_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    return RunConfig(
        command=ns.command,
        x_list=ns.x or [],
        r=ns.r,
        pmax=ns.pmax,
        d_max=ns.dmax,
        d_list=ns.d or [],
        trials=ns.trials,
        h_max=ns.hmax,
        ls_x_max=ns.ls_xmax,
        ls_n_max=ns.ls_nmax,
        threads=threads,
        seed=ns.seed,
        out=ns.out,
        format=ns.format,
        timings=ns.timings,
        ramp_delta=ns.ramp_delta,
        m1=ns.m1,
        m2=ns.m2,
        h=ns.h,
    )


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_argv(argv)
        return run(cfg)
    except InternalCheckError as e:
        print(f"gausslab: internal check failed: {e}", file=sys.stderr)
        return 3
    except GuardError as e:
        print(f"gausslab: guard violation: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"gausslab: invalid configuration: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
