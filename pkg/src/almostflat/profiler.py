"""Family sweeps, exponent fits and violation search."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .constructions import FamilySpec
from .diameter import DEFAULT_BFS_CAP, BfsCapExceeded, bfs_profile

CSV_COLUMNS = ("kind", "param", "variant", "index", "diameter", "normal", "runtime_ms")

# acceptance bands for the fitted slopes; brackets around 1/3 and 1/4
QUOTIENT_SLOPE_BAND = (0.30, 0.36)
COSET_SLOPE_BAND = (0.22, 0.27)


@dataclass(frozen=True)
class FlatnessRecord:
    kind: str
    param: int
    variant: str
    index: int
    diameter: int | None  # None when BFS refused the member
    normal: bool
    runtime_ms: int | None = None

    @property
    def refused(self) -> bool:
        return self.diameter is None

    def ratio(self, alpha: float) -> float:
        return self.diameter / self.index ** alpha

    def to_row(self) -> list[str]:
        return [self.kind, str(self.param), self.variant, str(self.index),
                "" if self.diameter is None else str(self.diameter),
                str(self.normal).lower(),
                "" if self.runtime_ms is None else str(self.runtime_ms)]


def _measure(spec: FamilySpec, param: int, variant: str, cap: int, timed: bool) -> FlatnessRecord:
    start = time.perf_counter()
    space = spec.member(param, variant)
    index = space.coset_count()
    try:
        diam = bfs_profile(space, cap).diameter
    except BfsCapExceeded:
        diam = None
    elapsed = round((time.perf_counter() - start) * 1000) if timed else None
    return FlatnessRecord(spec.kind, param, variant, index, diam, space.is_normal(), elapsed)


def sweep(spec: FamilySpec, cap: int = DEFAULT_BFS_CAP, threads: int = 1,
          timed: bool = False) -> list[FlatnessRecord]:
    """One record per member, in ascending parameter order.

    Runtimes are only recorded when ``timed`` is set, so untimed output is
    reproducible byte for byte.
    """
    members = list(spec.members())
    if threads <= 1:
        return [_measure(spec, p, v, cap, timed) for p, v in members]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda m: _measure(spec, m[0], m[1], cap, timed), members))


def records_to_csv(records: Sequence[FlatnessRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.to_row())
    return buf.getvalue()


# -- fitting ------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentFit:
    slope: Fraction
    intercept: float
    records_used: int
    residual: float

    def to_json(self) -> dict:
        return {"slope": float(self.slope), "slope_fraction": str(self.slope),
                "intercept": self.intercept, "records_used": self.records_used,
                "residual": self.residual}


def fit_exponent(records: Sequence[FlatnessRecord], tail_fraction: float = 0.5) -> ExponentFit:
    """Least squares of log diameter against log index over the tail of the sweep."""
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    usable = sorted((r for r in records if r.diameter is not None and r.diameter >= 1),
                    key=lambda r: (r.param, r.variant))
    if len(usable) < 2:
        raise ValueError("need at least 2 records with diameter >= 1")
    take = max(2, math.ceil(len(usable) * tail_fraction))
    tail = usable[-take:]
    x = np.log([r.index for r in tail])
    y = np.log([r.diameter for r in tail])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ (slope, intercept) - y) ** 2)))
    return ExponentFit(Fraction(float(slope)).limit_denominator(10**6), float(intercept),
                       len(tail), residual)


# -- violation search ---------------------------------------------------------

@dataclass(frozen=True)
class ViolationReport:
    witness: FlatnessRecord | None
    min_ratio: float | None
    argmin: FlatnessRecord | None

    def to_json(self) -> dict:
        return {"witness": None if self.witness is None else asdict(self.witness),
                "min_ratio": self.min_ratio,
                "argmin": None if self.argmin is None else asdict(self.argmin)}


def violation_search(records: Sequence[FlatnessRecord], alpha: float,
                     c: float = 1.0) -> ViolationReport:
    """First record (ascending parameter) with diameter < c * index^alpha."""
    if not 0 < alpha <= 1 or c <= 0:
        raise ValueError("need 0 < alpha <= 1 and c > 0")
    ordered = sorted((r for r in records if r.diameter is not None),
                     key=lambda r: (r.param, r.variant))
    witness = next((r for r in ordered if r.diameter < c * r.index ** alpha), None)
    if not ordered:
        return ViolationReport(None, None, None)
    argmin = min(ordered, key=lambda r: r.ratio(alpha))
    return ViolationReport(witness, argmin.ratio(alpha), argmin)
