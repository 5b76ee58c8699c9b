"""Covariance-matched synthetic data with EVT-family tail injection.

The generator fits per-column marginals, a regularized covariance matrix
over the numerical columns and empirical frequency tables for categorical
ones. Body rows come from the fitted multivariate normal (categoricals
drawn independently); tail rows start from the same correlated base and
then have their most extreme coordinate pushed beyond `tail_sigma` standard
deviations using one of five tail families. Symmetric families (normal,
Laplace) keep the sign of the underlying draw, the one-sided Gumbel and
Weibull forms are reflected with probability 1/2 so both tails are
reachable, and Levy places outliers on its heavy side only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import (
    ConfigError,
    DegenerateMarginalsError,
    EmptyInputError,
    InsufficientDataError,
    InsufficientSyntheticError,
    SchemaMismatchError,
)
from .frame import Column, ColumnKind, TabularFrame, concat_frames
from .splitting import child_rng

FAMILIES = {
    "normal": sps.norm,
    "laplace": sps.laplace,
    "gumbel": sps.gumbel_r,
    "weibull": sps.weibull_min(1.0),
    "levy": sps.levy,
}

#: Families whose tail side follows the sign of the correlated base draw.
_SYMMETRIC = frozenset({"normal", "laplace"})
#: Families reflected with probability 1/2 (one-sided standard forms).
_REFLECTED = frozenset({"gumbel", "weibull"})

BODY = "body"
TAIL = "tail"


@dataclass(frozen=True)
class OutlierSpec:
    """Sampling request: family, outlier share, tail rule and row budget."""

    family: str
    outlier_fraction: float
    total_rows: int
    seed: int = 0
    tail_sigma: float = 3.0
    nonneg_columns: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(
                f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}"
            )
        if not (0.0 <= self.outlier_fraction <= 1.0):
            raise ConfigError(
                f"outlier_fraction must lie in [0, 1], got {self.outlier_fraction!r}"
            )
        if self.total_rows < 1:
            raise ConfigError(f"total_rows must be positive, got {self.total_rows!r}")
        if not (self.tail_sigma > 0):
            raise ConfigError(f"tail_sigma must be > 0, got {self.tail_sigma!r}")
        object.__setattr__(self, "nonneg_columns", tuple(self.nonneg_columns))

    @property
    def outlier_count(self) -> int:
        return int(round(self.outlier_fraction * self.total_rows))


@dataclass
class FittedGenerator:
    """Marginals, covariance and categorical frequencies learned from data."""

    schema: tuple  # ordered (name, ColumnKind) pairs of the fitted frame
    numerical_names: tuple
    means: np.ndarray
    stds: np.ndarray
    covariance: np.ndarray  # regularized, PSD
    categorical_names: tuple
    frequencies: dict  # name -> (labels array, probabilities array)
    degenerate_columns: tuple = ()
    _factor: np.ndarray = field(default=None, repr=False)

    def cholesky_factor(self) -> np.ndarray:
        """Lower-triangular-ish factor L with L @ L.T == covariance."""
        if self._factor is None:
            try:
                factor = np.linalg.cholesky(self.covariance)
            except np.linalg.LinAlgError:
                # PSD but singular: eigendecomposition with clipped spectrum
                eigval, eigvec = np.linalg.eigh(self.covariance)
                factor = eigvec * np.sqrt(np.clip(eigval, 0.0, None))
            self._factor = factor
        return self._factor

    def marginals(self) -> dict:
        return {
            name: (float(m), float(s))
            for name, m, s in zip(self.numerical_names, self.means, self.stds)
        }


@dataclass
class SyntheticBatch:
    """Generated rows plus per-row provenance and the fitted marginals."""

    frame: TabularFrame
    outlier_mask: np.ndarray
    provenance: tuple  # "body" | "tail" per row
    marginals: dict  # numerical column -> (mean, std) used for the 3-sigma rule
    spec: OutlierSpec | None = None


def _pairwise_covariance(matrix: np.ndarray) -> np.ndarray:
    """Pairwise-complete covariance for data with missing cells."""
    d = matrix.shape[1]
    cov = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            both = ~np.isnan(matrix[:, i]) & ~np.isnan(matrix[:, j])
            if both.sum() >= 2:
                xi = matrix[both, i]
                xj = matrix[both, j]
                cov[i, j] = cov[j, i] = float(
                    np.sum((xi - xi.mean()) * (xj - xj.mean())) / (both.sum() - 1)
                )
    return cov


def fit(train: TabularFrame, regularization: float | None = None) -> FittedGenerator:
    """Fit marginals, covariance and categorical frequencies on `train`.

    The covariance is estimated on complete numerical rows, falling back to
    pairwise-complete estimates when fewer than two complete rows exist, and
    is then shifted along the diagonal to be positive semidefinite. The
    default shift is 1e-8 * trace / dim.
    """
    if train.row_count < 2:
        raise InsufficientDataError(
            f"need at least 2 rows to fit, got {train.row_count}"
        )
    if regularization is not None and regularization < 0:
        raise ConfigError("regularization must be >= 0")

    num_cols = [c for c in train.columns if c.kind is ColumnKind.NUMERICAL]
    cat_cols = [c for c in train.columns if c.kind is ColumnKind.CATEGORICAL]

    means, stds = [], []
    degenerate = []
    for col in num_cols:
        present = col.non_missing()
        if present.size < 2:
            raise InsufficientDataError(
                f"column {col.name!r} has {present.size} non-missing values; need >= 2"
            )
        means.append(float(np.mean(present)))
        stds.append(float(np.std(present, ddof=1)))
        if stds[-1] == 0.0:
            degenerate.append(col.name)
    means = np.asarray(means)
    stds = np.asarray(stds)

    d = len(num_cols)
    if d > 0:
        matrix = np.column_stack([c.values for c in num_cols])
        complete = ~np.isnan(matrix).any(axis=1)
        if complete.sum() >= 2:
            cov = np.atleast_2d(np.cov(matrix[complete], rowvar=False))
        else:
            cov = _pairwise_covariance(matrix)
        cov = 0.5 * (cov + cov.T)
        if regularization is None:
            regularization = 1e-8 * float(np.trace(cov)) / d
        min_eig = float(np.linalg.eigvalsh(cov).min()) if d > 0 else 0.0
        shift = regularization + max(0.0, -min_eig)
        cov = cov + shift * np.eye(d)
    else:
        cov = np.zeros((0, 0))

    frequencies = {}
    for col in cat_cols:
        present = col.non_missing()
        if present.size == 0:
            raise InsufficientDataError(
                f"categorical column {col.name!r} is entirely missing"
            )
        labels, counts = np.unique(np.asarray(present, dtype=str), return_counts=True)
        frequencies[col.name] = (labels, counts / counts.sum())

    return FittedGenerator(
        schema=tuple((c.name, c.kind) for c in train.columns),
        numerical_names=tuple(c.name for c in num_cols),
        means=means,
        stds=stds,
        covariance=cov,
        categorical_names=tuple(c.name for c in cat_cols),
        frequencies=frequencies,
        degenerate_columns=tuple(degenerate),
    )


def upsample(train: TabularFrame, target_rows: int, seed: int = 0) -> TabularFrame:
    """Resample rows with replacement until `target_rows`; no-op if already there."""
    if train.row_count == 0:
        raise EmptyInputError("cannot upsample an empty frame")
    if target_rows < 1:
        raise ConfigError(f"target_rows must be positive, got {target_rows!r}")
    n = train.row_count
    if n >= target_rows:
        return train
    rng = child_rng(seed, n, target_rows)
    extras = rng.integers(0, n, size=target_rows - n)
    return train.take(list(range(n)) + [int(i) for i in extras])


def _tail_magnitudes(family: str, rng, size: int) -> np.ndarray:
    """Standardized draws s >= 1 from the family conditioned on its tail."""
    dist = FAMILIES[family]
    # u bounded away from 0 so heavy-tailed inverse survival stays finite
    u = rng.uniform(1e-12, 1.0, size=size)
    return dist.isf(u * dist.sf(1.0))


def generate(gen: FittedGenerator, spec: OutlierSpec) -> SyntheticBatch:
    """Draw `spec.total_rows` synthetic rows with an exact outlier share.

    Body rows follow the fitted multivariate normal; each tail row exceeds
    `tail_sigma` fitted standard deviations on at least one numerical
    coordinate before any post-processing. Rows are shuffled; everything is
    deterministic under `spec.seed`.
    """
    n_tail = spec.outlier_count
    n_body = spec.total_rows - n_tail
    d = len(gen.numerical_names)
    usable = [
        i for i, name in enumerate(gen.numerical_names)
        if name not in gen.degenerate_columns
    ]
    if spec.outlier_fraction > 0 and not usable:
        raise DegenerateMarginalsError(
            "tail injection needs at least one numerical column with spread"
        )

    rng = child_rng(spec.seed)
    factor = gen.cholesky_factor() if d else np.zeros((0, 0))

    def correlated(n):
        if d == 0:
            return np.zeros((n, 0))
        z = rng.standard_normal((n, d))
        return gen.means + z @ factor.T

    body = correlated(n_body)
    tails = correlated(n_tail)

    if n_tail:
        safe_stds = np.where(gen.stds > 0, gen.stds, np.inf)
        zscores = (tails - gen.means) / safe_stds
        pick = np.argmax(np.abs(zscores), axis=1)
        magnitudes = _tail_magnitudes(spec.family, rng, n_tail)
        if spec.family in _SYMMETRIC:
            signs = np.where(zscores[np.arange(n_tail), pick] < 0, -1.0, 1.0)
        elif spec.family in _REFLECTED:
            signs = np.where(rng.random(n_tail) < 0.5, -1.0, 1.0)
        else:  # levy: heavy-tail side only
            signs = np.ones(n_tail)
        rows = np.arange(n_tail)
        tails[rows, pick] = (
            gen.means[pick] + signs * spec.tail_sigma * gen.stds[pick] * magnitudes
        )

    numeric = np.vstack([body, tails]) if d else np.zeros((spec.total_rows, 0))
    categorical = {
        name: rng.choice(labels, size=spec.total_rows, p=probs)
        for name, (labels, probs) in (
            (n, gen.frequencies[n]) for n in gen.categorical_names
        )
    }
    provenance = np.array([BODY] * n_body + [TAIL] * n_tail, dtype=object)
    mask = np.array([False] * n_body + [True] * n_tail, dtype=bool)

    perm = rng.permutation(spec.total_rows)
    numeric = numeric[perm]
    provenance = provenance[perm]
    mask = mask[perm]
    for name in categorical:
        categorical[name] = categorical[name][perm]

    num_index = {name: j for j, name in enumerate(gen.numerical_names)}
    columns = []
    for name, kind in gen.schema:
        if kind is ColumnKind.NUMERICAL:
            columns.append(Column(name, kind, numeric[:, num_index[name]].copy()))
        else:
            values = np.array([str(v) for v in categorical[name]], dtype=object)
            columns.append(Column(name, kind, values))
    return SyntheticBatch(
        frame=TabularFrame(columns),
        outlier_mask=mask,
        provenance=tuple(provenance),
        marginals=gen.marginals(),
        spec=spec,
    )


def postprocess(batch: SyntheticBatch, spec: OutlierSpec) -> SyntheticBatch:
    """Enforce nonnegativity constraints on the listed columns.

    Negative tail values are reflected about the fitted marginal mean (the
    distance from the mean is preserved, the side flips); negative body
    values are clamped to zero. Masks and counts are untouched.
    """
    for name in spec.nonneg_columns:
        if name not in batch.frame:
            raise ConfigError(f"nonneg column {name!r} not in the synthetic frame")
        if batch.frame.kind_of(name) is not ColumnKind.NUMERICAL:
            raise ConfigError(f"nonneg column {name!r} is not numerical")

    tail_rows = batch.outlier_mask
    columns = []
    for col in batch.frame.columns:
        if col.name not in spec.nonneg_columns:
            columns.append(col)
            continue
        mean = batch.marginals[col.name][0]
        values = col.values.copy()
        negative = values < 0
        reflect = negative & tail_rows
        clamp = negative & ~tail_rows
        values[reflect] = np.maximum(mean + np.abs(values[reflect] - mean), 0.0)
        values[clamp] = 0.0
        columns.append(Column(col.name, col.kind, values))
    return SyntheticBatch(
        frame=TabularFrame(columns),
        outlier_mask=batch.outlier_mask,
        provenance=batch.provenance,
        marginals=batch.marginals,
        spec=batch.spec,
    )


def mix(
    real: TabularFrame,
    synthetic: SyntheticBatch,
    real_fraction: float = 0.5,
    seed: int = 0,
) -> TabularFrame:
    """Blend all real rows with synthetic ones at the requested real share.

    The synthetic rows are the first round(n_real * (1 - f) / f) rows of the
    (already seeded-shuffled) batch; the combined frame is then shuffled
    deterministically under `seed`.
    """
    if not (0.0 < real_fraction < 1.0):
        raise ConfigError(
            f"real_fraction must lie in (0, 1), got {real_fraction!r}"
        )
    synth_frame = synthetic.frame
    for name in real.column_names:
        if name not in synth_frame:
            raise SchemaMismatchError(name, "missing from synthetic frame")
        if synth_frame.kind_of(name) != real.kind_of(name):
            raise SchemaMismatchError(name, "kind conflict")
    for name in synth_frame.column_names:
        if name not in real:
            raise SchemaMismatchError(name, "missing from real frame")

    n_real = real.row_count
    needed = int(round(n_real * (1.0 - real_fraction) / real_fraction))
    if synth_frame.row_count < needed:
        raise InsufficientSyntheticError(needed, synth_frame.row_count)

    chosen = synth_frame.take(range(needed))
    # align synthetic columns to the real frame's order
    chosen = TabularFrame([chosen.column(n) for n in real.column_names])
    combined = concat_frames(real, chosen)
    rng = child_rng(seed, n_real, needed)
    perm = [int(i) for i in rng.permutation(combined.row_count)]
    return combined.take(perm)
