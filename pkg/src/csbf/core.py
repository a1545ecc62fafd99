"""Frames, mass assignments, and belief/plausibility measures.

A frame is an ordered finite set of hypothesis labels.  Subsets of the frame
are represented throughout as integer bitmasks: bit ``i`` of the mask is set
exactly when element ``i`` of the frame belongs to the subset.  ``0`` is the
empty set and ``frame.full_mask`` is the whole frame.  All set functions
(mass, belief, plausibility) are indexed by these masks, which keeps subset,
superset, intersection and complement queries at single word operations and
makes the fast zeta / Moebius transforms over the subset lattice possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

#: Hard cap on frame size so the full powerset stays enumerable.
MAX_FRAME_SIZE = 24

#: Ingestion tolerance: mass values must sum to one within this.
MASS_SUM_TOL = 1e-9

#: Input masses in [-MASS_CLAMP_TOL, 0) are treated as rounding noise.
MASS_CLAMP_TOL = 1e-9

#: Threshold above which a (possibly computed) mass value counts as focal.
FOCAL_EPS = 1e-9


class EvidenceError(ValueError):
    """A frame, subset or mass assignment violates its invariants."""


@dataclass(frozen=True)
class Frame:
    """Ordered frame of discernment.

    The element order is canonical: it fixes the bit layout of subset masks
    and the coordinate order of every vector embedding built on top.
    """

    elements: tuple[str, ...]

    def __post_init__(self) -> None:
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if not 1 <= len(elements) <= MAX_FRAME_SIZE:
            raise EvidenceError(
                f"frame must have between 1 and {MAX_FRAME_SIZE} elements, got {len(elements)}"
            )
        if len(set(elements)) != len(elements):
            raise EvidenceError("frame elements must be unique")
        for label in elements:
            if not label or not isinstance(label, str):
                raise EvidenceError("frame elements must be nonempty strings")
            if "," in label or label != label.strip():
                raise EvidenceError(
                    f"frame element {label!r} may not contain commas or outer whitespace"
                )

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def n_subsets(self) -> int:
        """Number of subsets of the frame, including the empty set."""
        return 1 << len(self.elements)

    @property
    def full_mask(self) -> int:
        return self.n_subsets - 1

    def index_of(self, label: str) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise EvidenceError(f"unknown frame element {label!r}") from None

    def singleton(self, label: str) -> int:
        return 1 << self.index_of(label)

    def subset(self, labels: Iterable[str]) -> int:
        mask = 0
        for label in labels:
            mask |= self.singleton(label)
        return mask

    def labels_of(self, mask: int) -> tuple[str, ...]:
        self.check_mask(mask)
        return tuple(lbl for i, lbl in enumerate(self.elements) if mask >> i & 1)

    def format_subset(self, mask: int) -> str:
        """Canonical text form: labels comma-joined in frame order, '' for the empty set."""
        return ",".join(self.labels_of(mask))

    def parse_subset(self, text: str) -> int:
        labels = [part.strip() for part in text.split(",")]
        if any(not lbl for lbl in labels):
            raise EvidenceError(f"malformed subset key {text!r}")
        if len(set(labels)) != len(labels):
            raise EvidenceError(f"subset key {text!r} repeats an element")
        return self.subset(labels)

    def complement(self, mask: int) -> int:
        self.check_mask(mask)
        return self.full_mask ^ mask

    def check_mask(self, mask: int) -> None:
        if not 0 <= mask < self.n_subsets:
            raise EvidenceError(f"subset mask {mask} out of range for frame of size {self.size}")


def iter_submasks(mask: int) -> Iterator[int]:
    """Yield every submask of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def ultrafilter(frame: Frame, label: str) -> tuple[int, ...]:
    """All subsets containing the given element, in ascending mask order."""
    xbit = frame.singleton(label)
    rest = frame.full_mask ^ xbit
    return tuple(sorted(xbit | sub for sub in iter_submasks(rest)))


# ---------------------------------------------------------------------------
# Lattice transforms.  Arrays are indexed by subset mask and must have
# power-of-two length; each transform costs O(N log N).
# ---------------------------------------------------------------------------


def zeta_transform(values: np.ndarray) -> np.ndarray:
    """Cumulative subset sums: out[A] = sum of values[B] over B a subset of A."""
    out = np.array(values, dtype=float)
    n = out.size.bit_length() - 1
    if out.size != 1 << n:
        raise ValueError("array length must be a power of two")
    for i in range(n):
        v = out.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return out


def mobius_transform(values: np.ndarray) -> np.ndarray:
    """Inverse of :func:`zeta_transform`."""
    out = np.array(values, dtype=float)
    n = out.size.bit_length() - 1
    if out.size != 1 << n:
        raise ValueError("array length must be a power of two")
    for i in range(n):
        v = out.reshape(-1, 2, 1 << i)
        v[:, 1, :] -= v[:, 0, :]
    return out


def superset_sum_transform(values: np.ndarray) -> np.ndarray:
    """Cumulative superset sums: out[A] = sum of values[B] over B a superset of A."""
    out = np.array(values, dtype=float)
    n = out.size.bit_length() - 1
    if out.size != 1 << n:
        raise ValueError("array length must be a power of two")
    for i in range(n):
        v = out.reshape(-1, 2, 1 << i)
        v[:, 0, :] += v[:, 1, :]
    return out


# ---------------------------------------------------------------------------
# Mass assignments.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PseudoMassFunction:
    """Normalized set function on the frame, negative values allowed.

    Improper ("pseudo") assignments arise as intermediate products of the
    approximation machinery, e.g. corners of interval solution boxes.  Only
    nonzero entries are stored; the empty set never carries mass.
    """

    frame: Frame
    masses: Mapping[int, float]

    def __post_init__(self) -> None:
        cleaned: dict[int, float] = {}
        for mask, value in self.masses.items():
            self.frame.check_mask(mask)
            if mask == 0:
                if abs(value) > MASS_SUM_TOL:
                    raise EvidenceError("the empty set may not carry mass")
                continue
            value = self._ingest(float(value))
            if value != 0.0:
                cleaned[mask] = value
        total = sum(cleaned.values())
        if abs(total - 1.0) > MASS_SUM_TOL:
            raise EvidenceError(f"mass values must sum to 1, got {total!r}")
        object.__setattr__(self, "masses", MappingProxyType(cleaned))

    def _ingest(self, value: float) -> float:
        return value

    def value(self, mask: int) -> float:
        self.frame.check_mask(mask)
        return self.masses.get(mask, 0.0)

    def focal_elements(self) -> tuple[int, ...]:
        """Masks carrying mass beyond numerical noise, ascending."""
        return tuple(sorted(m for m, v in self.masses.items() if abs(v) > FOCAL_EPS))

    def is_admissible(self, tol: float = MASS_CLAMP_TOL) -> bool:
        return all(v >= -tol for v in self.masses.values())

    @property
    def admissible(self) -> bool:
        return self.is_admissible()

    def allclose(self, other: "PseudoMassFunction", tol: float = 1e-12) -> bool:
        if self.frame != other.frame:
            return False
        keys = set(self.masses) | set(other.masses)
        return all(abs(self.value(k) - other.value(k)) <= tol for k in keys)

    def as_array(self) -> np.ndarray:
        """Dense mass vector indexed by subset mask (length 2^n)."""
        arr = np.zeros(self.frame.n_subsets)
        for mask, value in self.masses.items():
            arr[mask] = value
        return arr

    @classmethod
    def from_labels(cls, frame: Frame, assignment: Mapping[object, float]):
        """Build from label-keyed masses; keys are comma strings or label iterables."""
        masses: dict[int, float] = {}
        for key, value in assignment.items():
            mask = frame.parse_subset(key) if isinstance(key, str) else frame.subset(key)
            if mask in masses:
                raise EvidenceError(f"duplicate subset {frame.format_subset(mask)!r}")
            masses[mask] = value
        return cls(frame, masses)


@dataclass(frozen=True)
class MassFunction(PseudoMassFunction):
    """Basic probability assignment: nonnegative masses summing to one.

    Input values in ``[-MASS_CLAMP_TOL, 0)`` are clamped to zero; anything
    more negative is rejected.
    """

    def _ingest(self, value: float) -> float:
        if value < 0.0:
            if value < -MASS_CLAMP_TOL:
                raise EvidenceError(f"negative mass {value!r}")
            return 0.0
        return value

    @classmethod
    def vacuous(cls, frame: Frame) -> "MassFunction":
        return cls(frame, {frame.full_mask: 1.0})


@dataclass(frozen=True, eq=False)
class BeliefView:
    """Belief and plausibility of every subset, as dense arrays by mask."""

    frame: Frame
    belief: np.ndarray
    plausibility: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.belief, self.plausibility):
            arr.setflags(write=False)

    @classmethod
    def from_belief_array(cls, frame: Frame, belief: np.ndarray) -> "BeliefView":
        belief = np.asarray(belief, dtype=float)
        if belief.shape != (frame.n_subsets,):
            raise EvidenceError("belief array length must be 2^|frame|")
        if abs(belief[0]) > MASS_SUM_TOL or abs(belief[-1] - 1.0) > MASS_SUM_TOL:
            raise EvidenceError("belief must vanish on the empty set and reach 1 on the frame")
        # pl(A) = 1 - b(complement A); complementing a mask reverses the index order.
        plausibility = 1.0 - belief[::-1]
        return cls(frame, belief.copy(), plausibility)

    def belief_of(self, mask: int) -> float:
        self.frame.check_mask(mask)
        return float(self.belief[mask])

    def plausibility_of(self, mask: int) -> float:
        self.frame.check_mask(mask)
        return float(self.plausibility[mask])


def belief_from_mass(m: PseudoMassFunction) -> BeliefView:
    """Belief of A = total mass of subsets of A, via the zeta transform."""
    return BeliefView.from_belief_array(m.frame, zeta_transform(m.as_array()))


def mass_from_belief(view: BeliefView) -> PseudoMassFunction:
    """Moebius inversion of a belief table back to a (possibly pseudo) mass."""
    masses = mobius_transform(view.belief)
    entries = {mask: float(v) for mask, v in enumerate(masses) if mask and v != 0.0}
    return PseudoMassFunction(view.frame, entries)


def core_of(m: PseudoMassFunction) -> int:
    """Intersection of all focal elements; 0 when they share no element."""
    core = m.frame.full_mask
    for mask in m.focal_elements():
        core &= mask
    return core


def is_consistent(m: PseudoMassFunction) -> bool:
    """True when the focal elements have a common element."""
    return core_of(m) != 0


def contour(m: PseudoMassFunction) -> dict[str, float]:
    """Plausibility of each singleton: pl(x) = total mass of sets containing x."""
    values = {}
    for i, label in enumerate(m.frame.elements):
        bit = 1 << i
        values[label] = sum(v for mask, v in m.masses.items() if mask & bit)
    return values
