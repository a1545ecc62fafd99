"""Brute-force verification of the closed-form approximations.

The oracle minimizes an Lp distance over one component of the consistent
region directly: candidates are *admissible* mass functions supported on the
ultrafilter of the focus element, parametrized by their masses on the proper
ultrafilter members (the full frame absorbs normalization).  Minimization is
a dense lattice scan over that simplex followed by shrinking neighborhood
refinements and random restarts; for L2 an exact pairwise coordinate descent
polishes the incumbent.  Nothing here reuses the closed forms being checked,
they enter only in the final comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .core import Frame, MassFunction, PseudoMassFunction, ultrafilter
from .consistent_mass import (
    GlobalResult,
    global_l1_mass,
    global_l2_mass,
    global_linf_mass,
    partial_l1_mass,
    partial_l2_mass,
    partial_linf_mass,
)
from .consistent_belief import (
    focused_transform,
    global_l1_belief,
    global_l2_belief,
    global_linf_belief,
    partial_linf_belief,
)
from .geometry import EmbeddingSpace, SpaceKind, embed

#: Largest frame the oracle will grind through.
MAX_ORACLE_FRAME = 4

#: Hard cap on initial lattice size; exceeding it asks for a coarser step.
LATTICE_CAP = 4_000_000

#: Full neighborhood products above this size fall back to coordinate sweeps.
NEIGHBORHOOD_CAP = 20_000

#: Norm/space pairs with a closed form to compare against.
SUPPORTED_PAIRS: tuple[tuple[float, SpaceKind], ...] = (
    (1, SpaceKind.MASS_N2),
    (2, SpaceKind.MASS_N2),
    (2, SpaceKind.MASS_N1),
    (math.inf, SpaceKind.MASS_N2),
    (1, SpaceKind.BELIEF),
    (2, SpaceKind.BELIEF),
    (math.inf, SpaceKind.BELIEF),
)


class FrameTooLargeError(ValueError):
    """The frame exceeds what exhaustive verification can handle."""


@dataclass(frozen=True)
class OracleConfig:
    grid_step: float = 0.02
    refinement_rounds: int = 3
    shrink: float = 0.2
    random_restarts: int = 16
    tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.grid_step <= 0 or self.tolerance <= 0:
            raise ValueError("grid_step and tolerance must be positive")

    @property
    def final_step(self) -> float:
        return self.grid_step * self.shrink**self.refinement_rounds

    @property
    def match_tolerance(self) -> float:
        """How closely the incumbent must reproduce the closed-form distance."""
        return max(self.tolerance, 10.0 * self.final_step)


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one brute-force minimization, gap included, never hidden."""

    focus: str
    norm: float
    space: EmbeddingSpace
    oracle_distance: float
    closed_form_distance: float
    oracle_point: MassFunction
    max_gap: float
    converged: bool


def _as_kind(space: EmbeddingSpace | SpaceKind) -> SpaceKind:
    return space.kind if isinstance(space, EmbeddingSpace) else space


def closed_form_partial(
    m: MassFunction, x: str, p: float, space: EmbeddingSpace | SpaceKind
) -> tuple[float, PseudoMassFunction]:
    """Library closed form for one (norm, space, focus): distance and a minimizer.

    For Linf the returned point is the solution-set barycenter.
    """
    kind = _as_kind(space)
    if kind is SpaceKind.MASS_N2:
        if p == 1:
            pa = partial_l1_mass(m, x)
            return pa.distance, pa.result
        if p == 2:
            pa = partial_l2_mass(m, x, kind)
            return pa.distance, pa.result
        if p == math.inf:
            box = partial_linf_mass(m, x)
            return box.distance, box.barycenter
    elif kind is SpaceKind.MASS_N1:
        if p == 2:
            pa = partial_l2_mass(m, x, kind)
            return pa.distance, pa.result
    elif kind is SpaceKind.BELIEF:
        if p in (1, 2):
            ft = focused_transform(m, x)
            return (ft.distance_l1 if p == 1 else ft.distance_l2), ft.result
        if p == math.inf:
            box = partial_linf_belief(m, x)
            return box.distance, focused_transform(m, x).result
    raise ValueError(f"no closed form for norm {p!r} in space {kind.value!r}")


def library_global(
    m: MassFunction, p: float, space: EmbeddingSpace | SpaceKind, tie_tol: float = 1e-9
) -> GlobalResult:
    """The library's global selector for one (norm, space) pair."""
    kind = _as_kind(space)
    if kind is SpaceKind.MASS_N2:
        if p == 1:
            return global_l1_mass(m, tie_tol)
        if p == 2:
            return global_l2_mass(m, kind, tie_tol)
        if p == math.inf:
            return global_linf_mass(m, tie_tol)
    elif kind is SpaceKind.MASS_N1 and p == 2:
        return global_l2_mass(m, kind, tie_tol)
    elif kind is SpaceKind.BELIEF:
        if p == 1:
            return global_l1_belief(m, tie_tol)
        if p == 2:
            return global_l2_belief(m, tie_tol)
        if p == math.inf:
            return global_linf_belief(m, tie_tol)
    raise ValueError(f"no global selector for norm {p!r} in space {kind.value!r}")


# ---------------------------------------------------------------------------
# Candidate parametrization: q holds the masses of the proper ultrafilter
# members (ascending mask order); the full frame takes 1 - sum(q).
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _categorical_coords_matrix(frame: Frame, x: str, kind: SpaceKind) -> tuple:
    """Embedding coordinates of the categorical masses on each ultrafilter member.

    Returns (members, V) with V[i] the embedding of the unit mass on
    members[i]; the full frame is always the last member.
    """
    space = EmbeddingSpace(kind, frame)
    members = [mask for mask in ultrafilter(frame, x) if mask != frame.full_mask]
    members.append(frame.full_mask)
    dim = space.dimension
    v = np.zeros((len(members), dim))
    for i, member in enumerate(members):
        if kind is SpaceKind.BELIEF:
            for coord in range(1, dim + 1):
                if coord & member == member:
                    v[i, coord - 1] = 1.0
        else:
            if member <= dim:
                v[i, member - 1] = 1.0
    v.setflags(write=False)
    return tuple(members), v


@lru_cache(maxsize=64)
def _simplex_lattice(dim: int, steps: int) -> np.ndarray:
    """Integer lattice points of the simplex: c >= 0 componentwise, sum <= steps."""
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    blocks = []
    for first in range(steps + 1):
        rest = _simplex_lattice(dim - 1, steps - first)
        col = np.full((rest.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([col, rest]))
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def _offset_grid(dim: int, span: int = 5) -> np.ndarray:
    axes = np.meshgrid(*([np.arange(-span, span + 1)] * dim), indexing="ij")
    out = np.stack([a.ravel() for a in axes], axis=1).astype(np.int64)
    out.setflags(write=False)
    return out


class _SimplexObjective:
    """Vectorized Lp distance from the target to candidates Q on the simplex."""

    def __init__(self, target: np.ndarray, e_matrix: np.ndarray, base: np.ndarray, p: float):
        self.target = target
        self.e_matrix = e_matrix
        self.base = base
        self.p = p

    def __call__(self, q: np.ndarray) -> np.ndarray:
        diff = (q @ self.e_matrix + self.base) - self.target
        if diff.shape[1] == 0:
            return np.zeros(diff.shape[0])
        if self.p == 1:
            return np.abs(diff).sum(axis=1)
        if self.p == 2:
            return np.sqrt((diff * diff).sum(axis=1))
        return np.abs(diff).max(axis=1)

    def best(self, q: np.ndarray) -> tuple[np.ndarray, float]:
        values = self(q)
        idx = int(np.argmin(values))
        return q[idx].copy(), float(values[idx])


def _feasible(q: np.ndarray) -> np.ndarray:
    ok = (q.min(axis=1, initial=0.0) >= -1e-12) & (q.sum(axis=1) <= 1.0 + 1e-12)
    return np.clip(q[ok], 0.0, None)


def _refine(
    objective: _SimplexObjective, center: np.ndarray, value: float, cfg: OracleConfig
) -> tuple[np.ndarray, float]:
    """Shrinking neighborhood search around an incumbent."""
    dim = center.size
    if dim == 0:
        return center, value
    full_grid = 11**dim <= NEIGHBORHOOD_CAP
    for r in range(cfg.refinement_rounds + 1):
        step = cfg.grid_step * cfg.shrink**r
        if full_grid:
            cand = _feasible(center + _offset_grid(dim) * step)
            best_q, best_v = objective.best(cand)
            if best_v < value:
                center, value = best_q, best_v
        else:
            # Coordinate lines plus pairwise transfers keep the candidate
            # count polynomial when the full offset product is too large.
            for _ in range(3):
                offsets = np.arange(-5, 6) * step
                for i in range(dim):
                    cand = np.tile(center, (offsets.size, 1))
                    cand[:, i] += offsets
                    best_q, best_v = objective.best(_feasible(cand))
                    if best_v < value:
                        center, value = best_q, best_v
                for i in range(dim):
                    for j in range(i + 1, dim):
                        cand = np.tile(center, (offsets.size, 1))
                        cand[:, i] += offsets
                        cand[:, j] -= offsets
                        best_q, best_v = objective.best(_feasible(cand))
                        if best_v < value:
                            center, value = best_q, best_v
    return center, value


def _pairwise_descent(
    objective: _SimplexObjective, members_v: np.ndarray, q: np.ndarray, tol: float
) -> np.ndarray:
    """Exact coordinate descent for the L2 objective over the full simplex.

    Works on the complete weight vector (absorber included) and moves mass
    between coordinate pairs, solving each one-dimensional quadratic exactly.
    """
    k = members_v.shape[0]
    w = np.empty(k)
    w[:-1] = q
    w[-1] = 1.0 - q.sum()
    for _ in range(200):
        coords = w @ members_v
        residual = objective.target - coords
        improved = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                u = members_v[i] - members_v[j]
                uu = float(u @ u)
                if uu == 0.0:
                    continue
                t = float(residual @ u) / uu
                t = min(max(t, -w[i]), w[j])
                if t == 0.0:
                    continue
                gain = 2.0 * t * float(residual @ u) - uu * t * t
                if gain <= 0.0:
                    continue
                w[i] += t
                w[j] -= t
                residual = residual - t * u
                improved += gain
        if improved < tol * tol:
            break
    return np.clip(w[:-1], 0.0, None)


def brute_force_partial(
    m: MassFunction,
    x: str,
    p: float,
    space: EmbeddingSpace | SpaceKind,
    cfg: OracleConfig = OracleConfig(),
) -> OracleReport:
    """Minimize the Lp distance over one consistent component by search.

    The search is deterministic for a fixed config (restart draws come from
    the config seed).  The report always carries the gap against the closed
    form; ``converged`` is false when the gap exceeds the match tolerance.
    """
    frame = m.frame
    if frame.size > MAX_ORACLE_FRAME:
        raise FrameTooLargeError(
            f"brute-force verification supports frames of size <= {MAX_ORACLE_FRAME}"
        )
    kind = _as_kind(space)
    emb_space = EmbeddingSpace(kind, frame)
    members, v = _categorical_coords_matrix(frame, x, kind)
    dim = len(members) - 1  # free coordinates, full frame absorbed
    e_matrix = v[:-1] - v[-1]
    target = embed(m, emb_space).coords
    objective = _SimplexObjective(target, e_matrix, v[-1].copy(), p)

    steps = max(1, round(1.0 / cfg.grid_step))
    if math.comb(steps + dim, dim) > LATTICE_CAP:
        raise ValueError(
            f"initial lattice would hold {math.comb(steps + dim, dim)} points; "
            "increase grid_step"
        )
    lattice = _simplex_lattice(dim, steps) * (1.0 / steps)
    best_q, best_v = objective.best(lattice)
    best_q, best_v = _refine(objective, best_q, best_v, cfg)

    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.random_restarts):
        start = rng.dirichlet(np.ones(dim + 1))[:dim]
        q, value = _refine(objective, start, float(objective(start[None, :])[0]), cfg)
        if value < best_v:
            best_q, best_v = q, value

    if p == 2:
        q = _pairwise_descent(objective, v, best_q, cfg.tolerance)
        value = float(objective(q[None, :])[0])
        if value < best_v:
            best_q, best_v = q, value

    masses = {mask: float(val) for mask, val in zip(members[:-1], best_q)}
    masses[frame.full_mask] = 1.0 - float(best_q.sum())
    point = MassFunction(frame, masses)
    closed_distance, _ = closed_form_partial(m, x, p, kind)
    gap = abs(best_v - closed_distance)
    return OracleReport(
        focus=x,
        norm=p,
        space=emb_space,
        oracle_distance=best_v,
        closed_form_distance=closed_distance,
        oracle_point=point,
        max_gap=gap,
        converged=gap <= cfg.match_tolerance,
    )


def globals_agree(
    result: GlobalResult,
    reports: Mapping[str, OracleReport],
    cfg: OracleConfig,
) -> bool:
    """Tolerance-aware set agreement between library and oracle argmins.

    Every library optimum must be oracle-optimal within the match tolerance,
    and every strict oracle argmin must be library-optimal within it, both
    measured on the attained distances (same scale on both sides).
    """
    tol = cfg.match_tolerance
    closed = {x: r.closed_form_distance for x, r in reports.items()}
    oracle = {x: r.oracle_distance for x, r in reports.items()}
    closed_min = min(closed.values())
    oracle_min = min(oracle.values())
    oracle_loose = {x for x, d in oracle.items() if d <= oracle_min + tol}
    closed_loose = {x for x, d in closed.items() if d <= closed_min + tol}
    oracle_strict = {x for x, d in oracle.items() if d <= oracle_min + 1e-9}
    return set(result.optima) <= oracle_loose and oracle_strict <= closed_loose


def exhaustive_global_check(
    m: MassFunction,
    p: float,
    space: EmbeddingSpace | SpaceKind,
    cfg: OracleConfig = OracleConfig(),
) -> bool:
    """Recompute all partial distances by brute force and compare argmin sets."""
    kind = _as_kind(space)
    reports = {
        x: brute_force_partial(m, x, p, kind, cfg) for x in m.frame.elements
    }
    return globals_agree(library_global(m, p, kind), reports, cfg)
