"""Consistent approximation in belief coordinates.

Unlike the mass-coordinate projections, belief-space projection tells the
ultrafilter members apart by their set relations with the outside focal
elements.  The L1 and L2 projections onto one ultrafilter coincide and equal
the *focused transform*: every focal element B is mapped to ``B union {x}``,
so the new mass of A is ``m(A) + m(A minus x)``.

The Linf solution set is again a box, but an axis-aligned one only in the
triangular "gamma" coordinates, where ``gamma(A)`` accumulates the mass
shifts of the ultrafilter members inside A.  The box midpoint maps back to
the focused transform through Moebius inversion on the sublattice of sets
containing x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .core import (
    Frame,
    MassFunction,
    PseudoMassFunction,
    belief_from_mass,
    contour,
    iter_submasks,
    superset_sum_transform,
)
from .consistent_mass import TIE_TOL, GlobalResult, argmin_elements
from .geometry import EmbeddingSpace, SpaceKind, embed
from .sampling import random_mass_function

#: Default slack when checking orthogonality certificates and box membership.
CHECK_TOL = 1e-9


@dataclass(frozen=True)
class FocusedTransform:
    """Focused consistent transform: mass of B moves to ``B union {x}``.

    This is simultaneously the partial L1 and the partial L2 projection in
    belief coordinates; ``distance_l1`` and ``distance_l2`` are the attained
    values of the respective norms.
    """

    focus: str
    result: MassFunction
    distance_l1: float
    distance_l2: float


def _belief_table(m: MassFunction) -> np.ndarray:
    return belief_from_mass(m).belief


def _outside_belief_sums(belief: np.ndarray, frame: Frame, xbit: int) -> tuple[float, float]:
    """Sum and sum of squares of b(A) over subsets A of the complement of x."""
    comp = frame.complement(xbit)
    total = 0.0
    squares = 0.0
    for sub in iter_submasks(comp):
        v = float(belief[sub])
        total += v
        squares += v * v
    return total, squares


def focused_transform(m: MassFunction, x: str) -> FocusedTransform:
    """Partial L1/L2 belief-space projection onto the ultrafilter of x."""
    frame = m.frame
    xbit = frame.singleton(x)
    masses: dict[int, float] = {}
    for mask, v in m.masses.items():
        masses[mask | xbit] = masses.get(mask | xbit, 0.0) + v
    result = MassFunction(frame, masses)
    total, squares = _outside_belief_sums(_belief_table(m), frame, xbit)
    return FocusedTransform(x, result, total, math.sqrt(squares))


def verify_orthogonality(m: MassFunction, ft: FocusedTransform, tol: float = CHECK_TOL) -> bool:
    """L2-optimality certificate for a focused transform.

    Checks that the belief-space residual is orthogonal to the categorical
    belief vector of every proper ultrafilter member, which characterizes the
    projection onto the ultrafilter's span.
    """
    frame = m.frame
    xbit = frame.singleton(ft.focus)
    space = EmbeddingSpace(SpaceKind.BELIEF, frame)
    diff = embed(m, space).coords - embed(ft.result, space).coords
    residual = np.zeros(frame.n_subsets)
    residual[1 : space.dimension + 1] = diff
    # <residual, b_B> = sum of residual over supersets of B (the full frame
    # contributes zero because its coordinate is not part of the space).
    sums = superset_sum_transform(residual)
    return all(abs(sums[mask]) <= tol for mask in range(1, frame.full_mask) if mask & xbit)


def global_l1_belief(m: MassFunction, tie_tol: float = TIE_TOL) -> GlobalResult[FocusedTransform]:
    """Global L1 pick in belief coordinates.

    The criterion is the total belief of the subsets missing x, which is NOT
    in general minimized by the maximal-plausibility element.
    """
    frame = m.frame
    belief = _belief_table(m)
    criterion = {
        lbl: _outside_belief_sums(belief, frame, frame.singleton(lbl))[0]
        for lbl in frame.elements
    }
    optima = argmin_elements(frame, criterion, tie_tol)
    return GlobalResult(optima, {lbl: focused_transform(m, lbl) for lbl in optima}, criterion)


def global_l2_belief(m: MassFunction, tie_tol: float = TIE_TOL) -> GlobalResult[FocusedTransform]:
    """Global L2 pick in belief coordinates; criterion values are squared distances."""
    frame = m.frame
    belief = _belief_table(m)
    criterion = {
        lbl: _outside_belief_sums(belief, frame, frame.singleton(lbl))[1]
        for lbl in frame.elements
    }
    optima = argmin_elements(frame, criterion, tie_tol)
    return GlobalResult(optima, {lbl: focused_transform(m, lbl) for lbl in optima}, criterion)


@dataclass(frozen=True)
class GammaBox:
    """Linf solution family in belief coordinates, boxed in gamma variables.

    One gamma coordinate per proper subset A containing x; each ranges over
    an interval of width ``2 * b(x^c)``.  The box degenerates to a point
    exactly when the source is already consistent on x.  The source mass
    function is kept so gamma points can be mapped back to mass coordinates.
    """

    focus: str
    source: MassFunction
    lower: Mapping[int, float]
    upper: Mapping[int, float]
    distance: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", MappingProxyType(dict(self.lower)))
        object.__setattr__(self, "upper", MappingProxyType(dict(self.upper)))

    @property
    def frame(self) -> Frame:
        return self.source.frame

    def midpoint(self) -> dict[int, float]:
        return {mask: (self.lower[mask] + self.upper[mask]) / 2.0 for mask in self.lower}

    def corner(self, take_upper: Mapping[int, bool]) -> dict[int, float]:
        return {
            mask: (self.upper[mask] if take_upper[mask] else self.lower[mask])
            for mask in self.lower
        }

    def corners(self) -> list[dict[int, float]]:
        masks = sorted(self.lower)
        return [
            self.corner({mask: bool(choice >> i & 1) for i, mask in enumerate(masks)})
            for choice in range(1 << len(masks))
        ]

    def contains(self, gamma_point: Mapping[int, float], tol: float = CHECK_TOL) -> bool:
        if set(gamma_point) != set(self.lower):
            return False
        return all(
            self.lower[mask] - tol <= gamma_point[mask] <= self.upper[mask] + tol
            for mask in self.lower
        )


def partial_linf_belief(m: MassFunction, x: str) -> GammaBox:
    """Linf solution box focused on x, in gamma coordinates.

    For each proper A containing x the bound is ``|gamma(A) + b(A minus x)|
    <= b(x^c)``; the attained distance is ``b(x^c)``.
    """
    frame = m.frame
    xbit = frame.singleton(x)
    belief = _belief_table(m)
    radius = float(belief[frame.complement(xbit)])
    lower: dict[int, float] = {}
    upper: dict[int, float] = {}
    for sub in iter_submasks(frame.complement(xbit)):
        mask = sub | xbit
        if mask == frame.full_mask:
            continue
        inside = float(belief[sub])  # total mass of subsets of A avoiding x
        lower[mask] = -radius - inside
        upper[mask] = radius - inside
    return GammaBox(x, m, lower, upper, radius)


def gamma_to_mass(box: GammaBox, gamma_point: Mapping[int, float]) -> PseudoMassFunction:
    """Map a gamma point of the box back to mass coordinates.

    Moebius inversion on the sublattice of sets containing the focus turns
    the cumulative gamma values back into per-subset mass shifts, which are
    subtracted from the source masses; the full frame absorbs normalization.
    Raises ``ValueError`` when the point lies outside the box.
    """
    if not box.contains(gamma_point):
        raise ValueError("gamma point lies outside the solution box")
    frame = box.frame
    xbit = frame.singleton(box.focus)
    masses: dict[int, float] = {}
    acc = 0.0
    for mask in box.lower:
        rest = mask ^ xbit
        shift = 0.0
        for sub in iter_submasks(rest):
            sign = -1.0 if (rest ^ sub).bit_count() & 1 else 1.0
            shift += sign * gamma_point[sub | xbit]
        value = box.source.value(mask) - shift
        masses[mask] = value
        acc += value
    masses[frame.full_mask] = 1.0 - acc
    return PseudoMassFunction(frame, masses)


def global_linf_belief(m: MassFunction, tie_tol: float = TIE_TOL) -> GlobalResult[GammaBox]:
    """Global Linf pick in belief coordinates: maximal-plausibility element(s)."""
    frame = m.frame
    belief = _belief_table(m)
    criterion = {
        lbl: float(belief[frame.complement(frame.singleton(lbl))]) for lbl in frame.elements
    }
    optima = argmin_elements(frame, criterion, tie_tol)
    return GlobalResult(optima, {lbl: partial_linf_belief(m, lbl) for lbl in optima}, criterion)


def find_global_l1_counterexample(
    frame: Frame,
    seed: int = 20240,
    max_draws: int = 100_000,
    tie_tol: float = TIE_TOL,
) -> tuple[MassFunction | None, int]:
    """Search for an input whose global L1 belief pick is not maximally plausible.

    Draws masses uniformly (Dirichlet over the full mass simplex, fixed seed)
    until the global L1 optima differ, as a set, from the maximal-plausibility
    elements.  Returns the witness and the number of draws used, or ``(None,
    max_draws)`` when the search comes up empty.
    """
    rng = np.random.default_rng(seed)
    for draw in range(1, max_draws + 1):
        m = random_mass_function(frame, rng, full_support=True)
        pl = contour(m)
        best = max(pl.values())
        most_plausible = tuple(lbl for lbl in frame.elements if pl[lbl] >= best - tie_tol)
        if set(global_l1_belief(m, tie_tol).optima) != set(most_plausible):
            return m, draw
    return None, max_draws
