"""Survey of 2 r_n - lambda, the denominator of the closed form for r*_n.

Nothing guarantees it stays away from zero, so this scans a parameter box
and prints the smallest value seen for each (lambda, t).

    python3 scripts/denominator_survey.py --nmax 30
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from perturbed_airy import WeightParams, build_system
from perturbed_airy.ladder import aux_Rr


@dataclass
class SurveyConfig:
    lams: list = field(default_factory=lambda: ["-0.9", "-0.5", "0", "0.5", "1", "2", "5"])
    ts: list = field(default_factory=lambda: ["0", "0.01", "0.1", "1", "5", "20"])
    nmax: int = 30
    digits: int = 30


def survey(cfg: SurveyConfig):
    for lam in cfg.lams:
        for t in cfg.ts:
            table = build_system(WeightParams(lam, t), cfg.nmax, cfg.digits)
            lam_c = table.ctx.mpf(table.params.lam.numerator) / table.params.lam.denominator
            values = [(abs(2 * aux_Rr(table, n)[1] - lam_c), n) for n in range(1, cfg.nmax - 1)]
            low, at = min(values)
            yield lam, t, at, low


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nmax", type=int, default=30)
    parser.add_argument("--digits", type=int, default=30)
    args = parser.parse_args(argv)
    cfg = SurveyConfig(nmax=args.nmax, digits=args.digits)
    print(f"{'lambda':>7} {'t':>6} {'n':>3}  min |2 r_n - lambda|")
    for lam, t, n, low in survey(cfg):
        print(f"{lam:>7} {t:>6} {n:>3}  {float(low):.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
