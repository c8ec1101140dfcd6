"""Command-line front end.

    perturbed-airy table  --lambda 0.5 --t 1 --nmax 20 --digits 60 --out run/
    perturbed-airy verify --lambda 0.5 --t 1 --nmax 14 --digits 60 --out run/
    perturbed-airy evolve --n 3 --t 1 --digits 40 --out run/
    perturbed-airy asympt --nmax 200 --lambda 0.5 --t 1 --out run/

Exit codes: 0 success, 1 invalid input found after parsing, 2 moment
certification failed (also argparse usage errors), 3 precision exhausted,
4 a verified identity exceeded its bound.
Every number written is a decimal string; nothing depends on the clock, so
equal configurations give byte-identical files.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from .asymptotics import asymptotic_ratios
from .errors import CertificationFailure, DomainError, PrecisionExhausted
from .evolution import EvolutionProbe, evolution_residuals, hankel_H
from .ladder import INTEGRAL, build_aux, identity_residuals, ladder_residuals
from .numeric import PrecisionSpec
from .recurrence import RecurrenceTable, build_recurrence, recurrence_guard
from .report import Residual, ResidualReport
from .systems import difference_system_residuals, ode_residual
from .weight import MomentTable, WeightParams, format_fraction, moment_table

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CERTIFICATION = 2
EXIT_PRECISION = 3
EXIT_VERIFY = 4


@dataclasses.dataclass(frozen=True)
class RunConfig:
    command: str
    lam: Fraction
    t: Fraction
    nmax: int
    jmax: int
    digits: int
    n_range: tuple | None = None
    out: Path = Path(".")
    format: str = "json"
    fuzz: Fraction | None = None
    n: int | None = None

    @property
    def params(self) -> WeightParams:
        return WeightParams(self.lam, self.t)

    def to_dict(self) -> dict:
        d = {
            "command": self.command,
            "lambda": format_fraction(self.lam),
            "t": format_fraction(self.t),
            "nmax": self.nmax,
            "jmax": self.jmax,
            "digits": self.digits,
            "format": self.format,
        }
        if self.n_range is not None:
            d["n_range"] = f"{self.n_range[0]}:{self.n_range[1]}"
        if self.fuzz is not None:
            d["fuzz"] = format_fraction(self.fuzz)
        if self.n is not None:
            d["n"] = self.n
        return d


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _n_range(text: str) -> tuple:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO:HI, e.g. 2:12") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("empty n-range")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perturbed-airy",
        description="Orthogonal polynomials for x^lambda exp(-x^3 - t/x): tables and identity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, nmax, digits):
        p.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1, 2))
        p.add_argument("--t", type=_fraction, default=Fraction(1))
        p.add_argument("--nmax", type=int, default=nmax)
        p.add_argument("--jmax", type=int, default=None, help="default 2*nmax+1")
        p.add_argument("--digits", type=int, default=digits)
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--n-range", type=_n_range, default=None, metavar="LO:HI")
        return p

    common(sub.add_parser("table", help="moment and recurrence tables"), 20, 60)
    verify = common(sub.add_parser("verify", help="ladder, identity, difference and ODE checks"), 14, 60)
    verify.add_argument("--fuzz", type=_fraction, default=None, help="scale every alpha_n by 1+FUZZ (test hook)")
    evolve = common(sub.add_parser("evolve", help="t-derivative relations and H_n"), None, 40)
    evolve.add_argument("--n", type=int, default=None)
    common(sub.add_parser("asympt", help="large-n ratio series"), 200, 50)
    return parser


def parse_config(argv=None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if not ns.lam > -1:
        parser.error("--lambda must exceed -1")
    if ns.t < 0 or (ns.command == "evolve" and ns.t == 0):
        parser.error("--t must be positive for evolve and non-negative otherwise")
    if ns.digits < 30:
        parser.error("--digits must be at least 30")

    n = getattr(ns, "n", None)
    if ns.command == "evolve":
        if n is None and ns.n_range is None:
            parser.error("evolve needs --n or --n-range")
        top = n if n is not None else ns.n_range[1]
        if ns.nmax is None:
            ns.nmax = max(12, top + 2)
        lo = n if n is not None else ns.n_range[0]
        if lo < 2 or top > ns.nmax - 2:
            parser.error(f"evolve needs 2 <= n <= nmax-2 = {ns.nmax - 2}")
    if ns.nmax < 1:
        parser.error("--nmax must be positive")
    jmax = ns.jmax if ns.jmax is not None else 2 * ns.nmax + 1
    if jmax < 2 * ns.nmax + 1:
        parser.error(f"--jmax {jmax} < 2*nmax+1 = {2 * ns.nmax + 1}")
    return RunConfig(
        command=ns.command,
        lam=ns.lam,
        t=ns.t,
        nmax=ns.nmax,
        jmax=jmax,
        digits=ns.digits,
        n_range=ns.n_range,
        out=ns.out,
        format=ns.format,
        fuzz=getattr(ns, "fuzz", None),
        n=n,
    )


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def build_tables(config: RunConfig) -> tuple[MomentTable, RecurrenceTable]:
    prec = PrecisionSpec(config.digits, recurrence_guard(config.nmax))
    moments = moment_table(config.params, config.jmax, prec)
    return moments, build_recurrence(moments, config.nmax)


def cmd_table(config: RunConfig) -> int:
    moments, table = build_tables(config)
    write_atomic(config.out / "moments.json", _dump(moments.to_json()))
    if config.format == "csv":
        write_atomic(config.out / "recurrence.csv", table.to_csv())
    else:
        body = table.to_json()
        body["config"] = config.to_dict()
        write_atomic(config.out / "recurrence.json", _dump(body))
    return EXIT_OK


def _ns(config, lo, hi):
    if config.n_range is not None:
        lo, hi = max(lo, config.n_range[0]), min(hi, config.n_range[1])
    return range(lo, hi + 1)


def _log_spaced(ctx, a, b, count):
    a, b = ctx.mpf(a), ctx.mpf(b)
    return [a * (b / a) ** (ctx.mpf(k) / (count - 1)) for k in range(count)]


def verify_report(config: RunConfig, table: RecurrenceTable) -> ResidualReport:
    """Run every algebraic check over the configured n-range."""
    ctx = table.ctx
    aux = build_aux(table, INTEGRAL)
    top = table.nmax - 2
    xs = _log_spaced(ctx, "0.05", 5, 10)
    report = ResidualReport()
    for n in _ns(config, 1, top):
        report.extend(ladder_residuals(table.params, table, aux, n, xs))
        report.extend(identity_residuals(table, aux, n))
        report.extend(ode_residual(table, aux, n, xs))
    for n in _ns(config, 2, top):
        report.extend(difference_system_residuals(table, aux, n))
    return report


def _fuzzed(table: RecurrenceTable, fuzz) -> RecurrenceTable:
    ctx = table.ctx
    scale = 1 + ctx.mpf(fuzz.numerator) / fuzz.denominator
    return dataclasses.replace(table, alpha=tuple(a * scale for a in table.alpha))


def _write_report(config: RunConfig, stem: str, report: ResidualReport, meta: dict) -> None:
    if config.format == "csv":
        write_atomic(config.out / f"{stem}.csv", report.to_csv())
        write_atomic(config.out / f"{stem}.meta.json", _dump(meta))
    else:
        body = report.to_json()
        body["meta"] = {**_stringify(body["meta"]), **meta}
        write_atomic(config.out / f"{stem}.json", _dump(body))


def _stringify(obj, digits=6):
    if isinstance(obj, dict):
        return {str(k): _stringify(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v, digits) for v in obj]
    if hasattr(obj, "context"):
        return obj.context.nstr(obj, digits)
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    return obj


def cmd_verify(config: RunConfig) -> int:
    moments, table = build_tables(config)
    if config.fuzz is not None:
        table = _fuzzed(table, config.fuzz)
    report = verify_report(config, table)
    ctx = table.ctx
    bound = ctx.mpf(10) ** (-(config.digits - 20))
    worst = report.worst()
    ok = worst is None or worst[3] < bound
    meta = {
        "config": config.to_dict(),
        "moments_sha256": moments.content_hash(),
        "bound": ctx.nstr(bound, 3),
        "passed": ok,
    }
    if worst is not None:
        meta["worst"] = {"identity": worst[0], "n": worst[1], "rel": ctx.nstr(worst[3], 6)}
    _write_report(config, "verify", report, meta)
    if not ok:
        print(f"verify failed: {worst[0]} at n={worst[1]} has relative residual {ctx.nstr(worst[3], 6)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_evolve(config: RunConfig) -> int:
    ns = [config.n] if config.n is not None else list(_ns(config, 2, config.nmax - 2))
    prec = PrecisionSpec(config.digits)
    bound = prec.ctx.mpf(10) ** (-(config.digits - 22))
    report = ResidualReport()
    hankel = {}
    budgets = {}
    for n in ns:
        probe = EvolutionProbe(config.params, n, prec, config.nmax)
        sub = evolution_residuals(probe)
        budgets[n] = _stringify(sub.meta)
        report.extend(sub)
        H = hankel_H(probe)
        hankel[n] = _stringify(H._asdict(), 30)
        report.add(n, None, "hankel_H", residual=_residual_of(H))
    worst = report.worst()
    ok = worst[3] < bound
    meta = {
        "config": config.to_dict(),
        "moments_sha256": probe.table().moments_hash,
        "bound": prec.ctx.nstr(bound, 3),
        "differentiation": budgets,
        "hankel_H": hankel,
        "passed": ok,
        "worst": {"identity": worst[0], "n": worst[1], "rel": prec.ctx.nstr(worst[3], 6)},
    }
    _write_report(config, "evolve", report, meta)
    if not ok:
        print(f"evolve failed: {worst[0]} at n={worst[1]}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _residual_of(H):
    scale = max(1, abs(H.formula))
    return Residual(H.residual * scale, H.residual, scale)


def cmd_asympt(config: RunConfig) -> int:
    moments, table = build_tables(config)
    ns = list(_ns(config, 1, config.nmax))
    fit = [n for n in (config.nmax // 8, config.nmax // 4, config.nmax // 2, config.nmax) if n >= 1]
    series = asymptotic_ratios(table, ns, fit)
    body = series.to_json()
    body["fit_n"] = fit
    body["config"] = config.to_dict()
    body["moments_sha256"] = moments.content_hash()
    write_atomic(config.out / "asympt.csv", series.to_csv())
    write_atomic(config.out / "asympt.json", _dump(body))
    return EXIT_OK


COMMANDS = {"table": cmd_table, "verify": cmd_verify, "evolve": cmd_evolve, "asympt": cmd_asympt}


def main(argv=None) -> int:
    config = parse_config(argv)
    try:
        return COMMANDS[config.command](config)
    except CertificationFailure as exc:
        print(f"moment certification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
