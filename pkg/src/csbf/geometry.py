"""Vector embeddings of belief functions and Lp geometry on them.

Three Cartesian embeddings are supported, all ordered by ascending subset
mask:

* ``mass-n1``: one mass coordinate per nonempty subset, the full frame
  included; dimension ``2^n - 1``.
* ``mass-n2``: the full-frame coordinate is dropped (it is fixed by
  normalization); dimension ``2^n - 2``.
* ``belief``: belief values of the proper nonempty subsets; dimension
  ``2^n - 2``.

The two mass embeddings are both first class because L2 projection onto the
consistent complex gives genuinely different answers in each; callers must
pick one explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Frame, PseudoMassFunction, zeta_transform


class SpaceKind(str, Enum):
    MASS_N1 = "mass-n1"
    MASS_N2 = "mass-n2"
    BELIEF = "belief"


@dataclass(frozen=True)
class EmbeddingSpace:
    kind: SpaceKind
    frame: Frame

    @property
    def dimension(self) -> int:
        n_subsets = self.frame.n_subsets
        return n_subsets - 1 if self.kind is SpaceKind.MASS_N1 else n_subsets - 2

    @property
    def coordinate_masks(self) -> range:
        """Subset masks backing each coordinate, in coordinate order."""
        return range(1, self.dimension + 1)


@dataclass(frozen=True, eq=False)
class PointVector:
    space: EmbeddingSpace
    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=float)
        if coords.shape != (self.space.dimension,):
            raise ValueError(
                f"expected {self.space.dimension} coordinates, got {coords.shape}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    def value_at(self, mask: int) -> float:
        if not 1 <= mask <= self.space.dimension:
            raise ValueError(f"mask {mask} has no coordinate in this space")
        return float(self.coords[mask - 1])


def embed(m: PseudoMassFunction, space: EmbeddingSpace) -> PointVector:
    """Coordinates of a (possibly pseudo) mass function in the given space."""
    if m.frame != space.frame:
        raise ValueError("mass function and embedding space use different frames")
    if space.kind is SpaceKind.BELIEF:
        values = zeta_transform(m.as_array())
    else:
        values = m.as_array()
    return PointVector(space, values[1 : space.dimension + 1])


def lp_distance(u: PointVector, v: PointVector, p: float) -> float:
    """L1, L2 or Linf distance between two points of the same space."""
    if u.space != v.space:
        raise ValueError("points live in different embedding spaces")
    diff = u.coords - v.coords
    if diff.size == 0:
        return 0.0
    if p == 1:
        return float(np.sum(np.abs(diff)))
    if p == 2:
        return float(np.sqrt(np.sum(diff * diff)))
    if p == math.inf:
        return float(np.max(np.abs(diff)))
    raise ValueError(f"unsupported norm order {p!r}")


def _categorical_dot(frame: Frame, a: int, b: int) -> int:
    # Belief vectors of categorical masses are superset indicators, so their
    # dot product counts the proper supersets of the union.
    return (1 << (frame.complement(a | b)).bit_count()) - 1


def categorical_inner_product(frame: Frame, a: int, b: int) -> int:
    """Belief-space inner product of two categorical belief functions.

    Equals ``2^|complement(A union B)| - 1``, the number of proper subsets of
    the frame containing both A and B.
    """
    if a == 0 or b == 0:
        raise ValueError("categorical belief functions are indexed by nonempty subsets")
    frame.check_mask(a)
    frame.check_mask(b)
    return _categorical_dot(frame, a, b)


def lemma_alternating_sum(frame: Frame, a: int, b: int) -> int:
    """Signed superset sum of categorical inner products.

    Computes ``sum over C superset of B of <b_C, b_A> * (-1)^|C minus B|``.
    For proper B it collapses to the subset indicator: 1 when A is a subset
    of B, else 0; this is what lets the L2 optimality system row-reduce to
    the L1 one in the belief space.  For B equal to the whole frame every
    inner product vanishes and the sum is 0 (that row never occurs in the
    system).
    """
    frame.check_mask(a)
    frame.check_mask(b)
    total = 0
    rest = frame.complement(b)
    sub = rest
    while True:
        sign = -1 if sub.bit_count() & 1 else 1
        total += sign * _categorical_dot(frame, a, b | sub)
        if sub == 0:
            return total
        sub = (sub - 1) & rest
