"""Measure how many digits the moment-to-recurrence map destroys.

For each (lambda, t) and table size the shadow-run loss is printed next to
the guard the library allocates, together with the loss per degree.  This
is the experiment behind ``recurrence_guard``.

    python3 scripts/precision_loss.py --nmax 10 20 30 40 --digits 40
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

from perturbed_airy import PrecisionExhausted, WeightParams, build_system
from perturbed_airy.recurrence import recurrence_guard


@dataclass
class LossConfig:
    lams: list = field(default_factory=lambda: ["0", "0.5", "2"])
    ts: list = field(default_factory=lambda: ["0", "0.1", "1", "5"])
    nmaxes: list = field(default_factory=lambda: [10, 20, 30])
    digits: int = 40


def measure(cfg: LossConfig):
    for lam in cfg.lams:
        for t in cfg.ts:
            params = WeightParams(lam, t)
            for nmax in cfg.nmaxes:
                guard = recurrence_guard(nmax)
                try:
                    table = build_system(params, nmax, cfg.digits)
                    lost = table.lost_digits
                except PrecisionExhausted as exc:
                    lost = exc.lost_digits
                yield {
                    "lambda": lam,
                    "t": t,
                    "nmax": nmax,
                    "guard": guard,
                    "lost": f"{lost:.2f}",
                    "per_degree": f"{lost / nmax:.3f}",
                    "margin": f"{guard - lost:.2f}",
                }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lambda", dest="lams", nargs="+", default=LossConfig().lams)
    parser.add_argument("--t", dest="ts", nargs="+", default=LossConfig().ts)
    parser.add_argument("--nmax", dest="nmaxes", nargs="+", type=int, default=LossConfig().nmaxes)
    parser.add_argument("--digits", type=int, default=40)
    cfg = LossConfig(**vars(parser.parse_args(argv)))
    writer = csv.DictWriter(sys.stdout, ["lambda", "t", "nmax", "guard", "lost", "per_degree", "margin"], lineterminator="\n")
    writer.writeheader()
    for row in measure(cfg):
        writer.writerow(row)
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
