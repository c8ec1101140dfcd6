"""Ratio of computed recurrence coefficients to their leading large-n
behaviour, written as CSV and JSON next to a log-log fit of |ratio - 1|.

    python3 scripts/asymptotic_trend.py --nmax 200 --lambda 0.5 --t 1 --out runs/trend
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from perturbed_airy import WeightParams, asymptotic_ratios, build_system
from perturbed_airy.recurrence import precision_report


@dataclass
class TrendConfig:
    lam: str = "0.5"
    t: str = "1"
    nmax: int = 200
    digits: int = 50
    out: str = "runs/trend"


def run(cfg: TrendConfig) -> dict:
    start = time.perf_counter()
    table = build_system(WeightParams(cfg.lam, cfg.t), cfg.nmax, cfg.digits)
    built = time.perf_counter() - start
    fit = [n for n in (cfg.nmax // 8, cfg.nmax // 4, cfg.nmax // 2, cfg.nmax) if n >= 1]
    series = asymptotic_ratios(table, range(1, cfg.nmax + 1), fit)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "ratios.csv").write_text(series.to_csv())
    summary = {
        "config": asdict(cfg),
        "fit_n": fit,
        "build_seconds": round(built, 1),
        "precision": {k: (round(v, 3) if isinstance(v, float) else v) for k, v in precision_report(table).items()},
        **series.to_json(),
    }
    (out / "ratios.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lambda", dest="lam", default=TrendConfig.lam)
    parser.add_argument("--t", default=TrendConfig.t)
    parser.add_argument("--nmax", type=int, default=TrendConfig.nmax)
    parser.add_argument("--digits", type=int, default=TrendConfig.digits)
    parser.add_argument("--out", default=TrendConfig.out)
    summary = run(TrendConfig(**vars(parser.parse_args(argv))))
    for n in summary["fit_n"]:
        print(f"n={n:4d}  alpha ratio {summary['alpha_ratio'][n - 1][:12]}  beta ratio {summary['beta_ratio'][n - 1][:12]}")
    print(f"fitted exponents: alpha {summary['alpha_correction_exponent']:.3f}, beta {summary['beta_correction_exponent']:.3f}")
    print(f"build {summary['build_seconds']} s, {summary['precision']['lost_digits']} digits lost")
    return 0


if __name__ == "__main__":
    sys.exit(main())
