"""Per-column distribution distances and their mean, the distribution shift.

Categorical columns are compared with the total variation distance over the
union of observed categories, numerical columns with the exact two-sample
Kolmogorov-Smirnov statistic. The distribution shift (DS) is the plain
average of the per-column distances; a dataset pair counts as shocked when
DS reaches a domain-informed threshold tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyColumnError, SchemaMismatchError
from .frame import ColumnKind, TabularFrame

#: Default shock threshold. Observed no-shock splits sit at DS <= 0.005 and
#: shocked splits at DS >= 0.12, so 0.05 separates the two regimes.
DEFAULT_TAU = 0.05


@dataclass(frozen=True)
class ColumnShift:
    column_name: str
    kind: ColumnKind
    distance: float

    def to_dict(self) -> dict:
        return {
            "name": self.column_name,
            "kind": self.kind.value,
            "distance": self.distance,
        }


@dataclass(frozen=True)
class DriftReport:
    per_column: tuple[ColumnShift, ...]
    ds: float
    tau: float
    is_shock: bool

    def to_dict(self) -> dict:
        return {
            "per_column": [c.to_dict() for c in self.per_column],
            "ds": self.ds,
            "tau": self.tau,
            "is_shock": self.is_shock,
        }


def _drop_missing_categorical(sample) -> np.ndarray:
    arr = np.asarray(sample, dtype=object)
    return arr[np.array([v is not None for v in arr], dtype=bool)]


def _drop_missing_numerical(sample) -> np.ndarray:
    arr = np.asarray(sample, dtype=np.float64)
    return arr[~np.isnan(arr)]


def tv_distance(p, q, column: str | None = None) -> float:
    """Total variation distance between two empirical categorical samples.

    Computes (1/2) * sum_c |p_hat(c) - q_hat(c)| over the union of observed
    categories; categories absent from one sample get frequency zero.
    Missing cells (None) are dropped first.
    """
    p = _drop_missing_categorical(p)
    q = _drop_missing_categorical(q)
    if p.size == 0 or q.size == 0:
        raise EmptyColumnError(column)
    cats = sorted(set(p.tolist()) | set(q.tolist()), key=str)
    index = {c: i for i, c in enumerate(cats)}
    fp = np.zeros(len(cats))
    fq = np.zeros(len(cats))
    for v in p:
        fp[index[v]] += 1.0
    for v in q:
        fq[index[v]] += 1.0
    fp /= p.size
    fq /= q.size
    return float(0.5 * np.abs(fp - fq).sum())


def ks_statistic(x, y, column: str | None = None) -> float:
    """Exact two-sample Kolmogorov-Smirnov statistic.

    sup_t |F_x(t) - F_y(t)| over the empirical CDFs, evaluated at the pooled
    sample points (where the supremum is attained). NaN cells are dropped.
    """
    x = np.sort(_drop_missing_numerical(x))
    y = np.sort(_drop_missing_numerical(y))
    if x.size == 0 or y.size == 0:
        raise EmptyColumnError(column)
    pooled = np.concatenate([x, y])
    fx = np.searchsorted(x, pooled, side="right") / x.size
    fy = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.abs(fx - fy).max())


def distribution_shift(
    base: TabularFrame,
    shock: TabularFrame,
    tau: float = DEFAULT_TAU,
    excluded=(),
) -> DriftReport:
    """Mean per-column distance between two frames plus the shock verdict.

    Every column present in `base` (minus `excluded`) must exist in `shock`
    with the same kind. Categorical columns contribute a TV distance,
    numerical ones a KS statistic; ds is their arithmetic mean, 0.0 when no
    columns remain. `is_shock` is ds >= tau.
    """
    excluded = set(excluded)
    shifts = []
    for name in sorted(base.column_names):
        if name in excluded:
            continue
        col = base.column(name)
        if name not in shock:
            raise SchemaMismatchError(name, "missing from shock frame")
        other = shock.column(name)
        if other.kind != col.kind:
            raise SchemaMismatchError(
                name, f"kind {col.kind.value} vs {other.kind.value}"
            )
        if col.kind is ColumnKind.CATEGORICAL:
            d = tv_distance(col.values, other.values, column=name)
        else:
            d = ks_statistic(col.values, other.values, column=name)
        shifts.append(ColumnShift(name, col.kind, d))
    for name in shock.column_names:
        if name not in excluded and name not in base:
            raise SchemaMismatchError(name, "missing from base frame")
    ds = float(np.mean([s.distance for s in shifts])) if shifts else 0.0
    return DriftReport(
        per_column=tuple(shifts), ds=ds, tau=tau, is_shock=bool(ds >= tau)
    )
