"""Deterministic synthetic credit-style dataset with an injected shock.

The generated table has a date column, four numeric features, one
categorical feature and a binary default label. Rows dated at or after the
shock date come from shifted feature distributions (covariate drift) and a
rotated feature/label relationship (concept drift), so a model trained
pre-shock degrades on the shocked segment and the mean per-feature distance
between the two segments exceeds 0.1 by a wide margin.
"""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np

from .frame import Column, ColumnKind, TabularFrame
from .splitting import child_rng

SHOCK_DATE = "2018-03-22"
SECTORS = np.array(["agro", "retail", "services", "trade"], dtype=object)
PRE_SECTOR_P = (0.20, 0.40, 0.10, 0.30)
POST_SECTOR_P = (0.25, 0.15, 0.15, 0.45)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _dates(rng, n, start: date, span_days: int):
    offsets = rng.integers(0, span_days, size=n)
    stamps = sorted(start + timedelta(days=int(o)) for o in offsets)
    return np.array([d.isoformat() for d in stamps], dtype=object)


def _segment(rng, n, shocked: bool):
    if not shocked:
        rate = rng.normal(5.0, 1.0, n)
        volume = rng.lognormal(3.0, 0.5, n)
        score = rng.normal(0.0, 1.0, n)
        price = rng.normal(50.0, 10.0, n)
        sector = rng.choice(SECTORS, size=n, p=PRE_SECTOR_P)
        logit = 0.9 * (rate - 5.0) - 1.1 * score + 0.8 * (sector == "trade") - 1.1
    else:
        rate = rng.normal(7.5, 1.3, n)
        volume = rng.lognormal(3.2, 0.6, n)
        score = rng.normal(0.0, 1.0, n)
        price = rng.normal(44.0, 12.0, n)
        sector = rng.choice(SECTORS, size=n, p=POST_SECTOR_P)
        # rotated relationship: the pre-shock model ranks these poorly
        logit = -0.9 * (rate - 7.5) + 1.1 * score + 0.8 * (sector == "agro") - 0.9
    label = (rng.random(n) < _sigmoid(logit)).astype(np.float64)
    return rate, volume, score, price, sector, label


def make_shocked_fixture(
    rows: int = 2000,
    shocked_fraction: float = 0.2,
    shock_date: str = SHOCK_DATE,
    seed: int = 20180322,
    missing_rate: float = 0.02,
) -> TabularFrame:
    """Build the shocked evaluation fixture; fully deterministic under seed."""
    rng = child_rng(seed)
    n_post = int(round(shocked_fraction * rows))
    n_pre = rows - n_post

    pre = _segment(rng, n_pre, shocked=False)
    post = _segment(rng, n_post, shocked=True)
    rate, volume, score, price, sector, label = (
        np.concatenate([a, b]) for a, b in zip(pre, post)
    )

    boundary = date.fromisoformat(shock_date)
    dates = np.concatenate(
        [
            _dates(rng, n_pre, boundary - timedelta(days=365), 365),
            _dates(rng, n_post, boundary, 180),
        ]
    )

    if missing_rate > 0:
        volume[rng.random(rows) < missing_rate] = np.nan
        sector = sector.astype(object)
        sector[rng.random(rows) < missing_rate] = None

    columns = [
        Column("date", ColumnKind.CATEGORICAL, np.asarray(dates, dtype=object)),
        Column("rate", ColumnKind.NUMERICAL, rate),
        Column("volume", ColumnKind.NUMERICAL, volume),
        Column("score", ColumnKind.NUMERICAL, score),
        Column("price", ColumnKind.NUMERICAL, price),
        Column("sector", ColumnKind.CATEGORICAL, np.asarray(sector, dtype=object)),
        Column("is_bad", ColumnKind.NUMERICAL, label),
    ]
    return TabularFrame(columns)
