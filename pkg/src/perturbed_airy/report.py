"""Named residuals of verified identities and their serialisation."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field


@dataclass
class Residual:
    abs: object
    rel: object
    scale: object


def residual_from_terms(terms, scale=None) -> Residual:
    """Residual of an identity written as additive terms that sum to zero.

    ``rel`` divides by the largest term magnitude (or by ``scale`` when the
    caller knows a better one), so identities mixing small and large pieces
    are judged against their own scale.
    """
    terms = list(terms)
    ctx = terms[0].context if hasattr(terms[0], "context") else None
    total = ctx.fsum(terms) if ctx is not None else sum(terms)
    if scale is None:
        scale = max(abs(v) for v in terms)
    a = abs(total)
    return Residual(a, a / scale if scale != 0 else a, scale)


@dataclass
class ResidualRecord:
    n: int
    x: object = None
    residuals: dict = field(default_factory=dict)


@dataclass
class ResidualReport:
    records: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, n, x, name, terms=None, residual=None, scale=None):
        rec = self._record(n, x)
        if residual is None:
            residual = residual_from_terms(terms, scale)
        rec.residuals[name] = residual
        return rec.residuals[name]

    def _record(self, n, x):
        for rec in self.records:
            if rec.n == n and rec.x is x:
                return rec
        rec = ResidualRecord(n, x)
        self.records.append(rec)
        return rec

    def extend(self, other: "ResidualReport"):
        self.records.extend(other.records)
        return self

    def items(self, names=None):
        for rec in self.records:
            for name, res in rec.residuals.items():
                if names is None or name in names:
                    yield rec, name, res

    def max_rel(self, names=None):
        return max((res.rel for _, _, res in self.items(names)), default=0)

    def worst(self, names=None):
        """(identity name, n, x, relative residual) of the largest residual."""
        best = None
        for rec, name, res in self.items(names):
            if best is None or res.rel > best[3]:
                best = (name, rec.n, rec.x, res.rel)
        return best

    def names(self):
        seen = []
        for _, name, _ in self.items():
            if name not in seen:
                seen.append(name)
        return seen

    def to_json(self, digits: int = 6) -> dict:
        def s(v):
            return _nstr(v, digits)

        return {
            "meta": self.meta,
            "records": [
                {
                    "n": rec.n,
                    "x": None if rec.x is None else _nstr(rec.x, 20),
                    "residuals": {
                        name: {"abs": s(r.abs), "rel": s(r.rel), "scale": s(r.scale)}
                        for name, r in rec.residuals.items()
                    },
                }
                for rec in self.records
            ],
        }

    def to_csv(self, digits: int = 6) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "x", "identity", "abs", "rel", "scale"])
        for rec, name, r in self.items():
            writer.writerow(
                [
                    rec.n,
                    "" if rec.x is None else _nstr(rec.x, 20),
                    name,
                    _nstr(r.abs, digits),
                    _nstr(r.rel, digits),
                    _nstr(r.scale, digits),
                ]
            )
        return buf.getvalue()


def _nstr(v, digits):
    ctx = getattr(v, "context", None)
    if ctx is None:
        return str(v)
    return ctx.nstr(v, digits)
