"""Quasi-optimal selection of the logistic slopes from expert anchors.

Experts pin a handful of uplift values (for example 0, 0.5 and 1) for known
AUC/shift constellations; an exhaustive grid search then picks the slope
triple minimizing the confidence-weighted squared error against those
anchors. A coarse sensitivity sweep checks that grid conclusions (cell
signs, per-model best outlier level) survive slope perturbations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError
from .stability import (
    DEFAULT_COEFFICIENTS,
    DEFAULT_EPSILON,
    UpliftCoefficients,
    batch_uplift,
    stabilization_uplift,
)

#: Coarse sweep used both as the default calibration grid and for the
#: sensitivity report: one step down and one up from the default slopes.
DEFAULT_SWEEP = {
    "k1": (50.0, 100.0, 200.0),
    "k2": (500.0, 1000.0, 2000.0),
    "k3": (500.0, 1000.0, 2000.0),
}

#: Default compact bounds: ten times the default slope per coefficient.
DEFAULT_BOUNDS = {
    "k1": 10.0 * DEFAULT_COEFFICIENTS.k1,
    "k2": 10.0 * DEFAULT_COEFFICIENTS.k2,
    "k3": 10.0 * DEFAULT_COEFFICIENTS.k3,
}


@dataclass(frozen=True)
class AnchorPoint:
    """One expert-labelled SU target for a concrete AUC/DS constellation."""

    a_base: float
    a_shock: float
    b_base: float
    b_shock: float
    ds: float
    target_su: float
    confidence: float = 1.0

    def __post_init__(self):
        for name in ("a_base", "a_shock", "b_base", "b_shock"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        if not (0.0 <= self.ds <= 1.0):
            raise DomainError(f"ds must lie in [0, 1], got {self.ds!r}")
        if not (-1.0 <= self.target_su <= 1.0):
            raise DomainError(f"target_su must lie in [-1, 1], got {self.target_su!r}")
        if not (self.confidence > 0):
            raise DomainError(f"confidence must be > 0, got {self.confidence!r}")


@dataclass
class CalibrationResult:
    coeffs: UpliftCoefficients
    objective: float
    grid_trace: list = field(default_factory=list)  # (UpliftCoefficients, objective)

    def to_dict(self) -> dict:
        return {
            "coefficients": self.coeffs.to_dict(),
            "objective": self.objective,
            "grid_trace": [
                {"coefficients": c.to_dict(), "objective": o}
                for c, o in self.grid_trace
            ],
        }


def _objective(coeffs: UpliftCoefficients, anchors, epsilon: float) -> float:
    num = 0.0
    den = 0.0
    for a in anchors:
        su = stabilization_uplift(
            (a.a_base, a.a_shock), (a.b_base, a.b_shock), a.ds, coeffs, epsilon
        ).su
        num += a.confidence * (su - a.target_su) ** 2
        den += a.confidence
    return num / den


def calibrate(
    anchors,
    grid: dict | None = None,
    bounds: dict | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> CalibrationResult:
    """Exhaustive grid search for the slope triple matching the anchors.

    Ties break toward the smallest (k1, then k2, then k3). Every evaluated
    point lands in the result's grid_trace. Candidates must lie inside the
    per-coefficient bounds (0, K_i].
    """
    anchors = list(anchors)
    if not anchors:
        raise ConfigError("calibrate needs at least one anchor point")
    grid = dict(DEFAULT_SWEEP if grid is None else grid)
    bounds = dict(DEFAULT_BOUNDS if bounds is None else bounds)
    candidates = []
    for name in ("k1", "k2", "k3"):
        values = sorted(float(v) for v in grid.get(name, ()))
        if not values:
            raise ConfigError(f"empty candidate list for {name}")
        upper = float(bounds.get(name, math.inf))
        for v in values:
            if not (0.0 < v <= upper):
                raise ConfigError(
                    f"candidate {name}={v} outside bounds (0, {upper}]"
                )
        candidates.append(values)

    best = None
    best_obj = math.inf
    trace = []
    for k1, k2, k3 in itertools.product(*candidates):
        coeffs = UpliftCoefficients(k1, k2, k3)
        obj = _objective(coeffs, anchors, epsilon)
        trace.append((coeffs, obj))
        if obj < best_obj:  # strict: earlier (smaller) tuples win ties
            best, best_obj = coeffs, obj
    return CalibrationResult(coeffs=best, objective=best_obj, grid_trace=trace)


@dataclass
class SweepReport:
    baseline: UpliftCoefficients
    entries: list = field(default_factory=list)
    all_preserved: bool = True

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline.to_dict(),
            "all_preserved": self.all_preserved,
            "entries": self.entries,
        }


def _sign(x: float, tol: float = 1e-12) -> int:
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def _argmax_levels(grid) -> dict:
    """Best outlier level per model by displayed SU; earliest level wins ties."""
    out = {}
    for model in grid.models:
        best_level, best_su = None, -math.inf
        for lvl in grid.levels:
            br = grid.cells.get((lvl, model))
            if br is not None and br.su_display > best_su:
                best_level, best_su = lvl, br.su_display
        out[model] = best_level
    return out


def sensitivity_sweep(
    records,
    ds: float,
    sweep: dict | None = None,
    baseline: UpliftCoefficients = DEFAULT_COEFFICIENTS,
    epsilon: float = DEFAULT_EPSILON,
) -> SweepReport:
    """Recompute the SU grid for every slope combination in the sweep.

    For each combination the report states, per cell, whether the sign of
    the raw SU matches the baseline coefficients' sign, and per model
    whether the best outlier level is unchanged.
    """
    sweep = dict(DEFAULT_SWEEP if sweep is None else sweep)
    for name in ("k1", "k2", "k3"):
        if not sweep.get(name):
            raise ConfigError(f"empty sweep list for {name}")
    records = list(records)
    base_grid = batch_uplift(records, ds, baseline, epsilon)
    base_signs = {key: _sign(br.su) for key, br in base_grid.cells.items()}
    base_argmax = _argmax_levels(base_grid)

    report = SweepReport(baseline=baseline)
    for k1, k2, k3 in itertools.product(
        sorted(sweep["k1"]), sorted(sweep["k2"]), sorted(sweep["k3"])
    ):
        coeffs = UpliftCoefficients(float(k1), float(k2), float(k3))
        grid = batch_uplift(records, ds, coeffs, epsilon)
        cells = []
        signs_ok = True
        for (lvl, model), br in sorted(grid.cells.items()):
            preserved = _sign(br.su) == base_signs[(lvl, model)]
            signs_ok &= preserved
            cells.append(
                {
                    "level": lvl,
                    "model": model,
                    "su": br.su,
                    "sign_preserved": preserved,
                }
            )
        argmax = _argmax_levels(grid)
        argmax_entries = {
            model: {
                "baseline_level": base_argmax[model],
                "level": argmax[model],
                "preserved": argmax[model] == base_argmax[model],
            }
            for model in grid.models
        }
        argmax_ok = all(e["preserved"] for e in argmax_entries.values())
        report.entries.append(
            {
                "coefficients": coeffs.to_dict(),
                "cells": cells,
                "all_signs_preserved": signs_ok,
                "argmax_by_model": argmax_entries,
                "argmax_preserved": argmax_ok,
            }
        )
        report.all_preserved &= signs_ok and argmax_ok
    return report
