"""Geometry of multilayer rectangular planar windings.

A winding is a stack of ``n_layers`` identical rectangular spirals, each with
``n_turns`` turns of trace width ``w`` and turn spacing ``s``, wound inward
from outer side lengths ``D1`` x ``D2``.  Consecutive layers are separated by
``layer_gap``.  The inner side lengths follow from the outer sides and the
turn geometry:

    d = D - 2 * n_turns * (w + s) + 2 * s

All lengths in this module are in meters.  Conversion from millimeters
happens at file and CLI boundaries only (see :mod:`planarwind.units`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


class GeometryError(ValueError):
    """Invalid winding geometry."""


class InfeasibleGeometryError(GeometryError):
    """The requested turns do not fit inside the outer dimensions."""


class OrientationError(GeometryError):
    """Outer sides are not in canonical order (D1 <= D2)."""


class IncompleteGeometryError(GeometryError):
    """A multilayer winding is missing its layer gap."""


def derive_inner_side(D: float, n_turns: int, w: float, s: float) -> float:
    """Inner side length of a spiral with n_turns of width w and spacing s.

    Args:
        D: outer side length (m).
        n_turns: number of turns per layer, >= 1.
        w: trace width (m).
        s: spacing between adjacent turns (m).

    Returns:
        The inner side length d = D - 2*n_turns*(w+s) + 2*s, in meters.

    Raises:
        GeometryError: if any length is nonpositive or n_turns < 1.
        InfeasibleGeometryError: if the turns do not fit (d <= 0).
    """
    if D <= 0.0 or w <= 0.0 or s <= 0.0:
        raise GeometryError(f"lengths must be positive, got D={D}, w={w}, s={s}")
    if n_turns < 1:
        raise GeometryError(f"n_turns must be >= 1, got {n_turns}")
    d = D - 2.0 * n_turns * (w + s) + 2.0 * s
    if d <= 0.0:
        raise InfeasibleGeometryError(
            f"{n_turns} turns of width {w} m at spacing {s} m do not fit "
            f"inside D={D} m (inner side would be {d:.6g} m)"
        )
    return d


@dataclass(frozen=True)
class WindingGeometry:
    """One multilayer rectangular planar winding, in SI units.

    Attributes:
        D1, D2: outer side lengths (m), canonical orientation D1 <= D2.
        w: trace width (m).
        s: turn spacing (m).
        n_turns: turns per layer.
        n_layers: number of stacked layers.
        layer_gap: separation between consecutive layers (m).  Required for
            n_layers >= 2.  A single-layer winding has no gap; a value passed
            with n_layers == 1 is dropped so equal windings compare equal.
        d1, d2: inner side lengths (m), derived.  Not constructor arguments.
    """

    D1: float
    D2: float
    w: float
    s: float
    n_turns: int
    n_layers: int
    layer_gap: Optional[float] = None
    d1: float = field(init=False)
    d2: float = field(init=False)

    def __post_init__(self) -> None:
        if self.n_layers < 1:
            raise GeometryError(f"n_layers must be >= 1, got {self.n_layers}")
        if self.D1 > self.D2:
            raise OrientationError(
                f"sides out of order: D1={self.D1} > D2={self.D2} "
                f"(swap them, or use canonicalize())"
            )
        if self.n_layers == 1:
            object.__setattr__(self, "layer_gap", None)
        else:
            if self.layer_gap is None:
                raise IncompleteGeometryError(
                    f"layer_gap is required for n_layers={self.n_layers}"
                )
            if self.layer_gap <= 0.0:
                raise GeometryError(f"layer_gap must be positive, got {self.layer_gap}")
        object.__setattr__(self, "d1", derive_inner_side(self.D1, self.n_turns, self.w, self.s))
        object.__setattr__(self, "d2", derive_inner_side(self.D2, self.n_turns, self.w, self.s))


@dataclass(frozen=True)
class MeanSides:
    """Mean side lengths Dbar_i = (D_i + d_i) / 2, in meters."""

    Dbar1: float
    Dbar2: float


def mean_sides(geometry: WindingGeometry) -> MeanSides:
    """Mean of outer and inner side lengths for both axes."""
    return MeanSides(
        Dbar1=(geometry.D1 + geometry.d1) / 2.0,
        Dbar2=(geometry.D2 + geometry.d2) / 2.0,
    )


def canonicalize(
    D1: float,
    D2: float,
    w: float,
    s: float,
    n_turns: int,
    n_layers: int,
    layer_gap: Optional[float] = None,
) -> WindingGeometry:
    """Build a WindingGeometry, swapping the outer sides if needed so D1 <= D2.

    Inductance is invariant under exchanging the two sides, so the swap only
    normalizes storage.  Idempotent: feeding back a canonical geometry's
    fields returns an equal geometry.
    """
    if D1 > D2:
        D1, D2 = D2, D1
    return WindingGeometry(D1, D2, w, s, n_turns, n_layers, layer_gap)


def meets_min_inner(d: float, min_inner: float, strict: bool) -> bool:
    """Compare an inner side length against a minimum, decimal-safe.

    Grid values are specified in millimeters at no finer than micrometer
    granularity, so both sides are rounded to 1e-6 mm before comparing.
    This keeps boundary cases exact: a winding whose inner side works out
    to 17 mm on paper may carry float dust of either sign depending on the
    order of arithmetic, and a raw comparison would misclassify it.

    Args:
        d: inner side length (m).
        min_inner: minimum inner side length (m).
        strict: require d > min_inner instead of d >= min_inner.
    """
    dq = round(d * 1e3, 6)
    mq = round(min_inner * 1e3, 6)
    return dq > mq if strict else dq >= mq


@dataclass(frozen=True)
class ValidationCheck:
    """Outcome of one validation rule."""

    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """Results of all validation rules for one geometry."""

    checks: tuple[ValidationCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> tuple[ValidationCheck, ...]:
        return tuple(check for check in self.checks if not check.passed)


def validate(
    geometry: WindingGeometry,
    min_inner: float = 0.0,
    strict: bool = False,
) -> ValidationReport:
    """Run all geometric feasibility checks on a winding.

    The constructor already rejects windings that violate the structural
    rules, so on a constructed geometry only the minimum inner side checks
    can fail.  The full report is still produced: it documents every rule
    and guards against objects built by bypassing the constructor.

    Args:
        geometry: the winding to check.
        min_inner: minimum inner side length (m), default 0.
        strict: require d > min_inner instead of d >= min_inner.
    """
    checks = []

    def check(name: str, passed: bool, detail: str) -> None:
        checks.append(ValidationCheck(name=name, passed=bool(passed), detail=detail))

    g = geometry
    check(
        "positive_lengths",
        g.D1 > 0 and g.D2 > 0 and g.w > 0 and g.s > 0,
        f"D1={g.D1}, D2={g.D2}, w={g.w}, s={g.s}",
    )
    check("counts", g.n_turns >= 1 and g.n_layers >= 1, f"n_turns={g.n_turns}, n_layers={g.n_layers}")
    check("sides_ordered", g.D1 <= g.D2, f"D1={g.D1}, D2={g.D2}")
    d1_expected = g.D1 - 2.0 * g.n_turns * (g.w + g.s) + 2.0 * g.s
    d2_expected = g.D2 - 2.0 * g.n_turns * (g.w + g.s) + 2.0 * g.s
    check(
        "inner_sides_consistent",
        g.d1 == d1_expected and g.d2 == d2_expected,
        f"d1={g.d1} (expected {d1_expected}), d2={g.d2} (expected {d2_expected})",
    )
    check("inner_sides_positive", g.d1 > 0 and g.d2 > 0, f"d1={g.d1}, d2={g.d2}")
    gap_ok = (g.layer_gap is None) == (g.n_layers == 1)
    if g.n_layers >= 2 and g.layer_gap is not None:
        gap_ok = gap_ok and g.layer_gap > 0
    check("layer_gap_presence", gap_ok, f"n_layers={g.n_layers}, layer_gap={g.layer_gap}")
    op = ">" if strict else ">="
    check(
        "min_inner_d1",
        meets_min_inner(g.d1, min_inner, strict),
        f"d1={g.d1} {op} {min_inner}",
    )
    check(
        "min_inner_d2",
        meets_min_inner(g.d2, min_inner, strict),
        f"d2={g.d2} {op} {min_inner}",
    )
    return ValidationReport(checks=tuple(checks))
