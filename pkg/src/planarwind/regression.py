"""Fitting the monomial model to labeled windings, and error reporting.

Taking log10 of the model turns it into a linear relation

    log10(L) = c0 + a1*log10(D1) + ... + a8*log10(N_L) + a9*(N_L-1)*log10(O)

with intercept c0 = log10(a0 * mu0), so the coefficients follow from
ordinary least squares on a design matrix of logged dimensions.  The layer
gap enters through the single regressor x9 = (N_L - 1) * log10(O), which is
exactly zero for single-layer rows (where no gap exists).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .dataset import Sample, split_train_eval
from .estimator import COEFFICIENT_NAMES, MU0, CoefficientSet, inductance

FEATURE_NAMES = (
    "intercept",
    "log10_D1",
    "log10_D2",
    "log10_Dbar1",
    "log10_Dbar2",
    "log10_w",
    "log10_s",
    "log10_NT",
    "log10_NL",
    "gap_term",
)


class RankDeficiencyError(ValueError):
    """Design matrix does not identify all model coefficients."""

    def __init__(self, rank: int, columns: Sequence[str]):
        self.rank = rank
        self.columns = tuple(columns)
        super().__init__(
            f"design matrix has rank {rank} < {len(FEATURE_NAMES)}; "
            f"dependent columns: {', '.join(columns)} "
            f"(the corpus does not vary these independently)"
        )


@dataclass(frozen=True)
class DesignRow:
    """One winding as a regression row: logged features and response."""

    x1: float  # log10 D1
    x2: float  # log10 D2
    x3: float  # log10 Dbar1
    x4: float  # log10 Dbar2
    x5: float  # log10 w
    x6: float  # log10 s
    x7: float  # log10 N_T
    x8: float  # log10 N_L
    x9: float  # (N_L - 1) * log10 O, exactly 0 for a single layer
    y: float   # log10 L_ref


def design_row(sample: Sample) -> DesignRow:
    """Logged features and response for one labeled winding."""
    g = sample.geometry
    if g.n_layers == 1:
        x9 = 0.0
    else:
        x9 = (g.n_layers - 1) * math.log10(g.layer_gap)
    return DesignRow(
        x1=math.log10(g.D1),
        x2=math.log10(g.D2),
        x3=math.log10((g.D1 + g.d1) / 2.0),
        x4=math.log10((g.D2 + g.d2) / 2.0),
        x5=math.log10(g.w),
        x6=math.log10(g.s),
        x7=math.log10(g.n_turns),
        x8=math.log10(g.n_layers),
        x9=x9,
        y=math.log10(sample.L_ref),
    )


def build_design_matrix(samples: Sequence[Sample]) -> tuple[np.ndarray, np.ndarray]:
    """Design matrix (with leading intercept column) and response vector."""
    if len(samples) == 0:
        raise ValueError("no samples")
    X = np.empty((len(samples), len(FEATURE_NAMES)))
    y = np.empty(len(samples))
    for i, sample in enumerate(samples):
        if not (sample.L_ref > 0.0 and math.isfinite(sample.L_ref)):
            raise ValueError(f"sample {i}: L_ref must be positive and finite, got {sample.L_ref}")
        row = design_row(sample)
        X[i, 0] = 1.0
        X[i, 1:] = (row.x1, row.x2, row.x3, row.x4, row.x5, row.x6, row.x7, row.x8, row.x9)
        y[i] = row.y
    return X, y


def fit_ols(X: np.ndarray, y: np.ndarray, label: str = "ols") -> CoefficientSet:
    """Least-squares coefficients from a design matrix.

    Solves min ||X c - y|| via SVD and maps the intercept back to the
    prefactor, a0 = 10**c0 / mu0.

    Raises:
        ValueError: on shape mismatch or too few rows to identify the model.
        RankDeficiencyError: if the columns are linearly dependent; the
            error names the dependent columns, found by pivoted QR.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(FEATURE_NAMES):
        raise ValueError(f"X must have {len(FEATURE_NAMES)} columns, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise ValueError(f"y has shape {y.shape}, expected ({X.shape[0]},)")
    if X.shape[0] <= X.shape[1]:
        raise ValueError(
            f"need more than {X.shape[1]} samples to identify the model, got {X.shape[0]}"
        )
    solution, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        from scipy.linalg import qr

        _, _, pivots = qr(X, mode="economic", pivoting=True)
        dependent = sorted(FEATURE_NAMES[j] for j in pivots[rank:])
        raise RankDeficiencyError(rank, dependent)
    return CoefficientSet(
        a0=10.0 ** solution[0] / MU0,
        a1=float(solution[1]),
        a2=float(solution[2]),
        a3=float(solution[3]),
        a4=float(solution[4]),
        a5=float(solution[5]),
        a6=float(solution[6]),
        a7=float(solution[7]),
        a8=float(solution[8]),
        a9=float(solution[9]),
        label=label,
    )


@dataclass(frozen=True)
class FitReport:
    """Evaluation of a coefficient set against labeled windings.

    Errors are relative deviations in percent,

        e = (L_ref - L_model) / L_ref * 100

    so positive means the model underestimates.  The histogram is a tuple
    of (lo, hi, count) bins of width bin_width_pct centered on zero,
    contiguous from the lowest to the highest populated bin, each covering
    [lo, hi).  exceedance_by_NL counts samples with |e| above the report's
    threshold, keyed by layer count.  n_train and seed describe the fit
    that produced the coefficients; repeats is the number of fit repeats
    behind the report, 0 for an evaluation of externally given
    coefficients.
    """

    coefficients: CoefficientSet
    mean_error_pct: float
    std_error_pct: float
    mae_pct: float
    threshold_pct: float
    histogram: tuple[tuple[float, float, int], ...]
    exceedance_by_NL: dict
    n_train: int = 0
    n_eval: int = 0
    seed: Optional[int] = None
    repeats: int = 0

    def to_mapping(self) -> dict:
        return {
            "coefficients": self.coefficients.to_mapping(),
            "mean_error_pct": self.mean_error_pct,
            "std_error_pct": self.std_error_pct,
            "mae_pct": self.mae_pct,
            "threshold_pct": self.threshold_pct,
            "histogram": [[lo, hi, count] for lo, hi, count in self.histogram],
            "exceedance_by_NL": {str(k): v for k, v in sorted(self.exceedance_by_NL.items())},
            "n_train": self.n_train,
            "n_eval": self.n_eval,
            "seed": self.seed,
            "repeats": self.repeats,
        }


def error_pct(sample: Sample, coefficients: CoefficientSet) -> float:
    """Relative deviation of the model from the label, in percent."""
    L_model = inductance(sample.geometry, coefficients)
    return (sample.L_ref - L_model) / sample.L_ref * 100.0


def _histogram(errors: np.ndarray, bin_width_pct: float) -> tuple[tuple[float, float, int], ...]:
    # Bin k is centered at k * width; assignment is half-open on the right.
    k = np.floor(errors / bin_width_pct + 0.5).astype(int)
    kmin, kmax = int(k.min()), int(k.max())
    counts = np.bincount(k - kmin, minlength=kmax - kmin + 1)
    return tuple(
        ((i + kmin - 0.5) * bin_width_pct, (i + kmin + 0.5) * bin_width_pct, int(c))
        for i, c in enumerate(counts)
    )


def evaluate(
    samples: Sequence[Sample],
    coefficients: CoefficientSet,
    threshold_pct: float = 5.0,
    bin_width_pct: float = 0.5,
) -> FitReport:
    """Error statistics of a coefficient set on labeled windings."""
    if len(samples) == 0:
        raise ValueError("no samples to evaluate")
    if bin_width_pct <= 0.0:
        raise ValueError(f"bin_width_pct must be positive, got {bin_width_pct}")
    if threshold_pct < 0.0:
        raise ValueError(f"threshold_pct must be >= 0, got {threshold_pct}")
    errors = np.array([error_pct(sample, coefficients) for sample in samples])
    layers = np.array([sample.geometry.n_layers for sample in samples])
    exceedance = {
        int(nl): int(np.sum((np.abs(errors) > threshold_pct) & (layers == nl)))
        for nl in sorted(set(layers.tolist()))
    }
    return FitReport(
        coefficients=coefficients,
        mean_error_pct=float(errors.mean()),
        std_error_pct=float(errors.std()),
        mae_pct=float(np.abs(errors).mean()),
        threshold_pct=threshold_pct,
        histogram=_histogram(errors, bin_width_pct),
        exceedance_by_NL=exceedance,
        n_eval=len(samples),
    )


def fit_and_evaluate(
    samples: Sequence[Sample],
    fraction: float = 0.8,
    seed: int = 0,
    threshold_pct: float = 5.0,
    bin_width_pct: float = 0.5,
) -> tuple[CoefficientSet, FitReport]:
    """Split, fit on the training side, evaluate on the held-out side."""
    split = split_train_eval(samples, fraction, seed)
    train = [samples[i] for i in split.train]
    held_out = [samples[i] for i in split.eval]
    X, y = build_design_matrix(train)
    coefficients = fit_ols(X, y, label=f"ols seed={seed} n_train={len(train)}")
    report = evaluate(held_out, coefficients, threshold_pct, bin_width_pct)
    report = replace(report, n_train=len(train), seed=seed, repeats=1)
    return coefficients, report


@dataclass(frozen=True)
class CoefficientDispersion:
    """Per-coefficient mean, population std and max-min spread across repeats."""

    mean: dict
    std: dict
    spread: dict

    def to_mapping(self) -> dict:
        return {"mean": dict(self.mean), "std": dict(self.std), "spread": dict(self.spread)}


def repeated_fit(
    samples: Sequence[Sample],
    fraction: float = 0.8,
    base_seed: int = 0,
    repeats: int = 1,
    threshold_pct: float = 5.0,
    bin_width_pct: float = 0.5,
) -> tuple[list[tuple[CoefficientSet, FitReport]], CoefficientDispersion]:
    """Repeat the split-fit-evaluate cycle with derived seeds.

    Repeat i uses seed base_seed + i.  The dispersion summary shows how much
    the recovered coefficients move with the split, which is the cheap check
    that a fit is not an artifact of one particular shuffle.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    results = []
    for i in range(repeats):
        coefficients, report = fit_and_evaluate(
            samples, fraction, base_seed + i, threshold_pct, bin_width_pct
        )
        report = replace(report, repeats=repeats)
        results.append((coefficients, report))
    stacked = np.array([c.as_tuple() for c, _ in results])
    dispersion = CoefficientDispersion(
        mean={name: float(v) for name, v in zip(COEFFICIENT_NAMES, stacked.mean(axis=0))},
        std={name: float(v) for name, v in zip(COEFFICIENT_NAMES, stacked.std(axis=0))},
        spread={name: float(v) for name, v in
                zip(COEFFICIENT_NAMES, stacked.max(axis=0) - stacked.min(axis=0))},
    )
    return results, dispersion
