"""Inductance maximization over a bounded box of winding dimensions.

The design task: choose (D1, D2, w, s, N_T) inside per-variable bounds,
with the derived inner sides d1, d2 also bounded and D1 < D2 strictly, to
maximize the monomial inductance model at fixed N_L and layer gap.

The inner sides are substituted, never free variables: d_i = D_i
- 2*N_T*(w + s) + 2*s turns their bounds into linear constraints on
(D1, D2, w, s) once N_T is fixed.  The integer N_T is enumerated (the
domain is small), and each (N_T, restart) pair runs a bound-constrained
local maximizer from a seeded random start inside the box.  A grid-scan
oracle provides an independent check of the same problem.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .estimator import DEFAULT_COEFFICIENTS, CoefficientSet, inductance, inductance_from_dims
from .geometry import WindingGeometry
from .units import h_to_uh, m_to_mm, mm_to_m

BOUND_KEYS = ("D1", "D2", "d1", "d2", "w", "s")

# Margin enforcing the strict inequality D1 < D2 in the continuous solver.
_STRICT_MARGIN = 1e-6  # m

# Keeps the objective defined when an iterate wanders outside feasibility.
_TINY = 1e-9  # m


class InfeasibleProblemError(ValueError):
    """No feasible point exists on the searched set."""


@dataclass(frozen=True)
class OptimizationProblem:
    """Bounded inductance-maximization task, SI units.

    bounds maps each of D1, D2, d1, d2, w, s to (lower, upper) in meters;
    the d bounds apply to the derived inner sides.  N_L and the layer gap
    are fixed, not searched.
    """

    bounds: Mapping[str, tuple[float, float]]
    NT_domain: tuple[int, ...]
    n_layers: int
    layer_gap: Optional[float]
    coefficients: CoefficientSet = DEFAULT_COEFFICIENTS

    def __post_init__(self) -> None:
        missing = [key for key in BOUND_KEYS if key not in self.bounds]
        if missing:
            raise ValueError(f"bounds missing for {', '.join(missing)}")
        for key in BOUND_KEYS:
            lo, hi = self.bounds[key]
            if not lo <= hi:
                raise ValueError(f"bounds for {key} are inverted: ({lo}, {hi})")
            if key in ("d1", "d2"):
                if lo < 0:
                    raise ValueError(f"lower bound for {key} must not be negative, got {lo}")
            elif lo <= 0:
                raise ValueError(f"lower bound for {key} must be positive, got {lo}")
        if len(self.NT_domain) == 0:
            raise ValueError("NT_domain must not be empty")
        if any(nt < 1 for nt in self.NT_domain):
            raise ValueError(f"NT_domain must be positive integers, got {self.NT_domain}")
        object.__setattr__(self, "NT_domain", tuple(sorted(set(int(nt) for nt in self.NT_domain))))
        if self.n_layers < 1:
            raise ValueError(f"n_layers must be >= 1, got {self.n_layers}")
        if self.n_layers == 1:
            object.__setattr__(self, "layer_gap", None)
        elif self.layer_gap is None or self.layer_gap <= 0:
            raise ValueError(f"a positive layer_gap is required for n_layers={self.n_layers}")

    def to_mapping(self) -> dict:
        # Bounds are authored in mm; rounding to 1e-9 mm strips the
        # unit-conversion dust so the mapping round-trips exactly.
        out = {
            key: [round(m_to_mm(self.bounds[key][0]), 9), round(m_to_mm(self.bounds[key][1]), 9)]
            for key in BOUND_KEYS
        }
        out["NT"] = list(self.NT_domain)
        out["NL"] = self.n_layers
        if self.layer_gap is not None:
            out["O_mm"] = round(m_to_mm(self.layer_gap), 9)
        out["coefficients"] = self.coefficients.to_mapping()
        return out

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "OptimizationProblem":
        missing = [key for key in BOUND_KEYS if key not in mapping]
        if missing:
            raise ValueError(f"problem is missing bounds for {', '.join(missing)}")
        bounds = {}
        for key in BOUND_KEYS:
            pair = mapping[key]
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ValueError(f"bounds for {key} must be a [lower, upper] pair, got {pair!r}")
            bounds[key] = (mm_to_m(float(pair[0])), mm_to_m(float(pair[1])))
        if "NT" not in mapping:
            raise ValueError("problem is missing the NT domain")
        n_layers = int(mapping.get("NL", 1))
        gap = mapping.get("O_mm")
        coefficients = DEFAULT_COEFFICIENTS
        if "coefficients" in mapping:
            coefficients = CoefficientSet.from_mapping(mapping["coefficients"])
        return cls(
            bounds=bounds,
            NT_domain=tuple(int(v) for v in mapping["NT"]),
            n_layers=n_layers,
            layer_gap=mm_to_m(float(gap)) if gap is not None else None,
            coefficients=coefficients,
        )


def default_problem() -> OptimizationProblem:
    """Reference design task: the standard bounded box, four layers."""
    return OptimizationProblem(
        bounds={
            "D1": (mm_to_m(12.0), mm_to_m(54.0)),
            "D2": (mm_to_m(55.0), mm_to_m(101.0)),
            "d1": (mm_to_m(10.5), mm_to_m(52.0)),
            "d2": (mm_to_m(54.0), mm_to_m(99.0)),
            "w": (mm_to_m(2.5), mm_to_m(5.0)),
            "s": (mm_to_m(0.1), mm_to_m(1.0)),
        },
        NT_domain=(3, 4, 5, 6, 7, 8, 9, 10),
        n_layers=4,
        layer_gap=mm_to_m(0.5),
    )


DEFAULT_RESOLUTION = {
    "D1": mm_to_m(0.5),
    "D2": mm_to_m(0.5),
    "w": mm_to_m(0.1),
    "s": mm_to_m(0.1),
}


def feasible(
    candidate: Sequence[float], problem: OptimizationProblem
) -> tuple[bool, float, float]:
    """Exact feasibility of a (D1, D2, w, s, N_T) candidate.

    Checks every bound including the derived inner sides, strict D1 < D2,
    and N_T membership.  Returns (ok, d1, d2) with the derived sides
    reported even when infeasible.
    """
    D1, D2, w, s, nt = candidate
    d1 = D1 - 2.0 * nt * (w + s) + 2.0 * s
    d2 = D2 - 2.0 * nt * (w + s) + 2.0 * s
    b = problem.bounds
    ok = (
        int(nt) in problem.NT_domain
        and D1 < D2
        and d1 > 0.0
        and d2 > 0.0
        and b["D1"][0] <= D1 <= b["D1"][1]
        and b["D2"][0] <= D2 <= b["D2"][1]
        and b["w"][0] <= w <= b["w"][1]
        and b["s"][0] <= s <= b["s"][1]
        and b["d1"][0] <= d1 <= b["d1"][1]
        and b["d2"][0] <= d2 <= b["d2"][1]
    )
    return ok, d1, d2


@dataclass(frozen=True)
class RestartRecord:
    """One local search: start, converged point, value if feasible."""

    n_turns: int
    index: int
    start: tuple[float, float, float, float]
    point: tuple[float, float, float, float]
    value: Optional[float]
    feasible: bool

    def to_mapping(self) -> dict:
        return {
            "N_T": self.n_turns,
            "index": self.index,
            "start_mm": [m_to_mm(v) for v in self.start],
            "point_mm": [m_to_mm(v) for v in self.point],
            "L_uH": h_to_uh(self.value) if self.value is not None else None,
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class OptimizationResult:
    """Best feasible winding found, with the search log."""

    best: Optional[WindingGeometry]
    L_best: Optional[float]
    restarts_run: int
    feasible_found: bool
    restarts: tuple[RestartRecord, ...]

    def to_mapping(self) -> dict:
        best = None
        if self.best is not None:
            g = self.best
            best = {
                "D1_mm": m_to_mm(g.D1),
                "D2_mm": m_to_mm(g.D2),
                "d1_mm": m_to_mm(g.d1),
                "d2_mm": m_to_mm(g.d2),
                "w_mm": m_to_mm(g.w),
                "s_mm": m_to_mm(g.s),
                "N_T": g.n_turns,
                "N_L": g.n_layers,
                "O_mm": m_to_mm(g.layer_gap) if g.layer_gap is not None else None,
            }
        return {
            "best": best,
            "L_best_uH": h_to_uh(self.L_best) if self.L_best is not None else None,
            "restarts_run": self.restarts_run,
            "feasible_found": self.feasible_found,
            "restarts": [record.to_mapping() for record in self.restarts],
        }


def _box(problem: OptimizationProblem) -> tuple[np.ndarray, np.ndarray]:
    b = problem.bounds
    lo = np.array([b["D1"][0], b["D2"][0], b["w"][0], b["s"][0]])
    hi = np.array([b["D1"][1], b["D2"][1], b["w"][1], b["s"][1]])
    return lo, hi


def _objective(problem: OptimizationProblem, nt: int):
    c = problem.coefficients

    def negative_log_inductance(x):
        D1 = max(x[0], _TINY)
        D2 = max(x[1], _TINY)
        w = max(x[2], _TINY)
        s = max(x[3], _TINY)
        # Clamps keep the value defined at infeasible iterates; the linear
        # d constraints pull the solver back regardless.
        d1 = max(D1 - 2.0 * nt * (w + s) + 2.0 * s, _TINY)
        d2 = max(D2 - 2.0 * nt * (w + s) + 2.0 * s, _TINY)
        L = inductance_from_dims(
            D1, D2, d1, d2, w, s, nt, problem.n_layers, problem.layer_gap, coefficients=c
        )
        return -math.log10(L)

    return negative_log_inductance


def _constraints(problem: OptimizationProblem, nt: int) -> list:
    b = problem.bounds
    # d_i = D_i - 2*nt*w - (2*nt - 2)*s is linear in x = (D1, D2, w, s).
    rows = []
    for i, key in ((0, "d1"), (1, "d2")):
        coeff = np.zeros(4)
        coeff[i] = 1.0
        coeff[2] = -2.0 * nt
        coeff[3] = -(2.0 * nt - 2.0)
        rows.append({"type": "ineq", "fun": (lambda x, c=coeff, lo=b[key][0]: c @ x - lo)})
        rows.append({"type": "ineq", "fun": (lambda x, c=coeff, hi=b[key][1]: hi - c @ x)})
    rows.append({"type": "ineq", "fun": lambda x: x[1] - x[0] - _STRICT_MARGIN})
    return rows


def _better(value, point, best_value, best_point) -> bool:
    if best_value is None or value > best_value:
        return True
    return value == best_value and point < best_point


def maximize(
    problem: OptimizationProblem, restarts: int = 100, seed: int = 0
) -> OptimizationResult:
    """Multi-start local maximization of inductance over the bounded box.

    For each N_T in the domain, runs ``restarts`` local searches from
    uniform random starts inside the (D1, D2, w, s) box, each seeded by
    (seed, N_T, restart index) so results are deterministic and the first
    k restarts of a longer run equal a k-restart run.  Converged points
    are clipped to the box, checked exactly for feasibility, and reduced
    to an incumbent in a fixed order with a lexicographic tie-break, so
    the outcome does not depend on evaluation order.

    Returns a result with feasible_found False if no restart produced a
    feasible point.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    lo, hi = _box(problem)
    records = []
    best_value = None
    best_point = None
    for nt in problem.NT_domain:
        objective = _objective(problem, nt)
        constraints = _constraints(problem, nt)
        bounds = list(zip(lo, hi))
        for index in range(restarts):
            rng = np.random.default_rng([seed, nt, index])
            start = rng.uniform(lo, hi)
            with warnings.catch_warnings():
                warnings.filterwarnings(
                    "ignore", message="Values in x were outside bounds"
                )
                result = minimize(
                    objective,
                    start,
                    method="SLSQP",
                    bounds=bounds,
                    constraints=constraints,
                    options={"maxiter": 200, "ftol": 1e-12},
                )
            point = np.clip(result.x, lo, hi)
            # A coordinate on an active bound carries arithmetic dust from
            # the solver; snap it to the bound exactly.
            for bound in (lo, hi):
                near = np.abs(point - bound) <= 1e-9 * np.abs(bound)
                point = np.where(near, bound, point)
            candidate = (float(point[0]), float(point[1]), float(point[2]), float(point[3]), nt)
            ok, d1, d2 = feasible(candidate, problem)
            value = None
            if ok:
                value = float(inductance_from_dims(
                    candidate[0], candidate[1], d1, d2, candidate[2], candidate[3],
                    nt, problem.n_layers, problem.layer_gap,
                    coefficients=problem.coefficients,
                ))
                if _better(value, candidate, best_value, best_point):
                    best_value = value
                    best_point = candidate
            records.append(RestartRecord(
                n_turns=nt,
                index=index,
                start=tuple(float(v) for v in start),
                point=candidate[:4],
                value=value,
                feasible=ok,
            ))
    if best_point is None:
        return OptimizationResult(
            best=None,
            L_best=None,
            restarts_run=len(records),
            feasible_found=False,
            restarts=tuple(records),
        )
    geometry = WindingGeometry(
        best_point[0], best_point[1], best_point[2], best_point[3],
        best_point[4], problem.n_layers, problem.layer_gap,
    )
    return OptimizationResult(
        best=geometry,
        L_best=inductance(geometry, problem.coefficients),
        restarts_run=len(records),
        feasible_found=True,
        restarts=tuple(records),
    )


def _axis(lo_m: float, hi_m: float, step_m: float) -> np.ndarray:
    # Axes are laid out in mm and snapped to nm so grid points stay the
    # clean decimals the bounds were written with.
    lo = round(m_to_mm(lo_m), 6)
    hi = round(m_to_mm(hi_m), 6)
    step = round(m_to_mm(step_m), 6)
    if step <= 0:
        raise ValueError(f"resolution step must be positive, got {step_m}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    values_mm = np.round(lo + step * np.arange(count), 6)
    return values_mm[values_mm <= hi + 1e-9] * 1e-3


def brute_force_max(
    problem: OptimizationProblem,
    resolution: Optional[Mapping[str, float]] = None,
) -> OptimizationResult:
    """Exhaustive grid scan of the box, the oracle for :func:`maximize`.

    Evaluates every grid point of the (D1, D2, w, s) box at the given
    per-variable steps (meters) for every N_T, filters by the same
    feasibility rules as :func:`feasible`, and returns the exact argmax
    with a deterministic lexicographic tie-break on (D1, D2, w, s, N_T).

    Raises:
        InfeasibleProblemError: if no grid point is feasible.
    """
    steps = dict(DEFAULT_RESOLUTION)
    if resolution is not None:
        for key, value in resolution.items():
            if key not in steps:
                raise ValueError(f"unknown resolution key {key!r}, expected one of {tuple(steps)}")
            steps[key] = float(value)
    b = problem.bounds
    D1 = _axis(*b["D1"], steps["D1"])[:, None, None, None]
    D2 = _axis(*b["D2"], steps["D2"])[None, :, None, None]
    w = _axis(*b["w"], steps["w"])[None, None, :, None]
    s = _axis(*b["s"], steps["s"])[None, None, None, :]
    best_value = None
    best_point = None
    for nt in problem.NT_domain:
        d1 = D1 - 2.0 * nt * (w + s) + 2.0 * s
        d2 = D2 - 2.0 * nt * (w + s) + 2.0 * s
        mask = (
            (D1 < D2)
            & (d1 > 0.0)
            & (d2 > 0.0)
            & (d1 >= b["d1"][0]) & (d1 <= b["d1"][1])
            & (d2 >= b["d2"][0]) & (d2 <= b["d2"][1])
        )
        if not mask.any():
            continue
        L = inductance_from_dims(
            D1, D2, np.maximum(d1, _TINY), np.maximum(d2, _TINY), w, s,
            nt, problem.n_layers, problem.layer_gap,
            coefficients=problem.coefficients,
        )
        L = np.where(mask, L, -np.inf)
        flat_index = int(np.argmax(L))
        value = float(L.reshape(-1)[flat_index])
        i, j, k, m = np.unravel_index(flat_index, L.shape)
        point = (
            float(D1[i, 0, 0, 0]), float(D2[0, j, 0, 0]),
            float(w[0, 0, k, 0]), float(s[0, 0, 0, m]), nt,
        )
        if _better(value, point, best_value, best_point):
            best_value = value
            best_point = point
    if best_point is None:
        raise InfeasibleProblemError(
            "no feasible grid point in the box at this resolution"
        )
    geometry = WindingGeometry(
        best_point[0], best_point[1], best_point[2], best_point[3],
        best_point[4], problem.n_layers, problem.layer_gap,
    )
    return OptimizationResult(
        best=geometry,
        L_best=inductance(geometry, problem.coefficients),
        restarts_run=0,
        feasible_found=True,
        restarts=(),
    )
