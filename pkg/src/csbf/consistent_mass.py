"""Consistent approximation in mass coordinates.

A belief function is consistent when all focal elements share an element x,
i.e. its mass lives on the ultrafilter ``{B : x in B}``.  The consistent
region is a union of simplices, one per element, so approximation proceeds in
two stages: a partial solution per candidate element, then a global pick of
the partial solution(s) at minimal distance.

Closed forms in mass coordinates:

* L1 (and L2 in the ``mass-n2`` embedding): keep the masses inside the
  ultrafilter, move everything else onto the full frame.  Distance is the
  total mass moved, ``b(complement of x)``.
* Linf: the solutions form an axis-aligned box, every mass inside the
  ultrafilter free to move by up to the largest single mass outside it.  The
  box barycenter is the L1 solution.
* L2 in the ``mass-n1`` embedding: spread the outside mass evenly over all
  ``2^(n-1)`` ultrafilter members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Generic, Iterator, Mapping, TypeVar

from .core import Frame, MassFunction, PseudoMassFunction, ultrafilter
from .geometry import EmbeddingSpace, SpaceKind

#: Tie tolerance when collecting globally optimal elements.
TIE_TOL = 1e-9

P = TypeVar("P")


@dataclass(frozen=True)
class PartialApprox:
    """Best consistent approximation supported on one ultrafilter.

    ``distance`` is the attained norm value, measured in ``space``.
    """

    focus: str
    result: PseudoMassFunction
    distance: float
    space: EmbeddingSpace


@dataclass(frozen=True)
class ApproxBox:
    """Axis-aligned interval family of Linf-optimal mass assignments.

    Intervals cover every ultrafilter member except the full frame, whose
    coordinate is always recovered by normalization.  Intervals are stored
    unclipped, so parts of the box may be inadmissible (negative masses);
    :meth:`admissible_intervals` gives the view intersected with [0, 1].
    """

    focus: str
    lower: Mapping[int, float]
    upper: Mapping[int, float]
    barycenter: MassFunction
    distance: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", MappingProxyType(dict(self.lower)))
        object.__setattr__(self, "upper", MappingProxyType(dict(self.upper)))

    @property
    def frame(self) -> Frame:
        return self.barycenter.frame

    def midpoint_masses(self) -> PseudoMassFunction:
        """Interval midpoints, full frame taking the normalization remainder."""
        return self._point({mask: (self.lower[mask] + self.upper[mask]) / 2.0 for mask in self.lower})

    def corners(self) -> Iterator[PseudoMassFunction]:
        """All box corners as (possibly pseudo) mass functions."""
        masks = sorted(self.lower)
        for choice in range(1 << len(masks)):
            yield self._point(
                {
                    mask: (self.upper[mask] if choice >> i & 1 else self.lower[mask])
                    for i, mask in enumerate(masks)
                }
            )

    def admissible_intervals(self) -> tuple[dict[int, float], dict[int, float], bool]:
        """Intervals intersected with [0, 1], plus a flag when that clips anything."""
        lo = {mask: max(0.0, v) for mask, v in self.lower.items()}
        hi = {mask: min(1.0, v) for mask, v in self.upper.items()}
        clipped = any(lo[m] > self.lower[m] or hi[m] < self.upper[m] for m in lo)
        return lo, hi, clipped

    def contains(self, masses: PseudoMassFunction, tol: float = TIE_TOL) -> bool:
        return all(
            self.lower[mask] - tol <= masses.value(mask) <= self.upper[mask] + tol
            for mask in self.lower
        )

    def _point(self, values: dict[int, float]) -> PseudoMassFunction:
        frame = self.frame
        values[frame.full_mask] = 1.0 - sum(values.values())
        return PseudoMassFunction(frame, values)


@dataclass(frozen=True)
class GlobalResult(Generic[P]):
    """Globally optimal focus elements with their partial solutions.

    ``optima`` lists every element whose criterion value ties the minimum
    within tolerance, in frame order; ``payloads`` holds the partial
    approximation for each optimum.
    """

    optima: tuple[str, ...]
    payloads: Mapping[str, P]
    criterion_values: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "payloads", MappingProxyType(dict(self.payloads)))
        object.__setattr__(
            self, "criterion_values", MappingProxyType(dict(self.criterion_values))
        )


def argmin_elements(frame: Frame, criterion: Mapping[str, float], tie_tol: float) -> tuple[str, ...]:
    best = min(criterion.values())
    return tuple(lbl for lbl in frame.elements if criterion[lbl] <= best + tie_tol)


def _outside_masses(m: PseudoMassFunction, xbit: int) -> list[float]:
    return [v for mask, v in m.masses.items() if not mask & xbit]


def partial_l1_mass(m: MassFunction, x: str) -> PartialApprox:
    """L1-closest consistent assignment focused on x (mass-n2 embedding).

    Ultrafilter masses are kept, the outside mass ``b(x^c)`` moves to the
    full frame.  Always admissible.
    """
    frame = m.frame
    xbit = frame.singleton(x)
    moved = sum(_outside_masses(m, xbit))
    masses = {mask: v for mask, v in m.masses.items() if mask & xbit and mask != frame.full_mask}
    masses[frame.full_mask] = m.value(frame.full_mask) + moved
    result = MassFunction(frame, masses)
    space = EmbeddingSpace(SpaceKind.MASS_N2, frame)
    return PartialApprox(x, result, moved, space)


def global_l1_mass(m: MassFunction, tie_tol: float = TIE_TOL) -> GlobalResult[PartialApprox]:
    """Global L1 pick: the maximal-plausibility element(s)."""
    frame = m.frame
    criterion = {lbl: sum(_outside_masses(m, frame.singleton(lbl))) for lbl in frame.elements}
    optima = argmin_elements(frame, criterion, tie_tol)
    return GlobalResult(optima, {lbl: partial_l1_mass(m, lbl) for lbl in optima}, criterion)


def _max_outside(m: MassFunction, xbit: int) -> float:
    return max(_outside_masses(m, xbit), default=0.0)


def partial_linf_mass(m: MassFunction, x: str) -> ApproxBox:
    """Linf solution box focused on x (mass-n2 embedding).

    Every ultrafilter coordinate except the full frame ranges over
    ``m(B) +- M`` with M the largest mass outside the ultrafilter; the
    attained distance is M and the barycenter is the partial L1 solution.
    """
    frame = m.frame
    xbit = frame.singleton(x)
    slack = _max_outside(m, xbit)
    members = [mask for mask in ultrafilter(frame, x) if mask != frame.full_mask]
    lower = {mask: m.value(mask) - slack for mask in members}
    upper = {mask: m.value(mask) + slack for mask in members}
    barycenter = partial_l1_mass(m, x).result
    assert isinstance(barycenter, MassFunction)
    return ApproxBox(x, lower, upper, barycenter, slack)


def global_linf_mass(m: MassFunction, tie_tol: float = TIE_TOL) -> GlobalResult[ApproxBox]:
    """Global Linf pick: minimize the maximal mass outside the ultrafilter."""
    frame = m.frame
    criterion = {lbl: _max_outside(m, frame.singleton(lbl)) for lbl in frame.elements}
    optima = argmin_elements(frame, criterion, tie_tol)
    return GlobalResult(optima, {lbl: partial_linf_mass(m, lbl) for lbl in optima}, criterion)


def _l2_criterion(m: MassFunction, xbit: int, kind: SpaceKind) -> float:
    """Squared L2 distance from m to its partial L2 solution in ``kind``.

    In ``mass-n2`` the projection leaves every free coordinate untouched, so
    only the fixed outside coordinates contribute; ``mass-n1`` adds the full
    frame coordinate, which absorbs the moved mass spread over the whole
    ultrafilter.
    """
    outside = _outside_masses(m, xbit)
    moved = sum(outside)
    squares = sum(v * v for v in outside)
    if kind is SpaceKind.MASS_N2:
        return squares
    return moved * moved / (1 << (m.frame.size - 1)) + squares


def partial_l2_mass(m: MassFunction, x: str, kind: SpaceKind) -> PartialApprox:
    """L2-closest consistent assignment focused on x, per mass embedding.

    In ``mass-n2`` the projection coincides with the partial L1 solution; in
    ``mass-n1`` the outside mass is split evenly over the whole ultrafilter.
    Either way ``distance`` is the attained L2 norm in that embedding.
    """
    frame = m.frame
    xbit = frame.singleton(x)
    if kind is SpaceKind.MASS_N2:
        result = partial_l1_mass(m, x).result
    elif kind is SpaceKind.MASS_N1:
        share = sum(_outside_masses(m, xbit)) / (1 << (frame.size - 1))
        masses = {mask: m.value(mask) + share for mask in ultrafilter(frame, x)}
        result = MassFunction(frame, masses)
    else:
        raise ValueError("L2 mass approximation needs a mass embedding, got belief")
    distance = math.sqrt(_l2_criterion(m, xbit, kind))
    return PartialApprox(x, result, distance, EmbeddingSpace(kind, frame))


def global_l2_mass(
    m: MassFunction, kind: SpaceKind, tie_tol: float = TIE_TOL
) -> GlobalResult[PartialApprox]:
    """Global L2 pick in the chosen mass embedding.

    Criterion values are the squared distances, built from the sum and the
    sum of squares of the masses outside each ultrafilter.
    """
    frame = m.frame
    criterion = {lbl: _l2_criterion(m, frame.singleton(lbl), kind) for lbl in frame.elements}
    optima = argmin_elements(frame, criterion, tie_tol)
    payloads = {lbl: partial_l2_mass(m, lbl, kind) for lbl in optima}
    return GlobalResult(optima, payloads, criterion)
