import json
import math
import os

import numpy as np
import pytest

from csbf import (
    EmbeddingSpace,
    Frame,
    MassFunction,
    SpaceKind,
    belief_from_mass,
    contour,
    embed,
    find_global_l1_counterexample,
    focused_transform,
    gamma_to_mass,
    global_l1_belief,
    global_l2_belief,
    global_linf_belief,
    lp_distance,
    partial_linf_belief,
    verify_orthogonality,
)
from csbf.sampling import random_mass_function

from conftest import frame_of_size

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def assert_masses(frame, result, expected, tol=1e-12):
    keys = set(expected) | {frame.format_subset(mask) for mask in result.masses}
    for key in keys:
        assert result.value(frame.parse_subset(key)) == pytest.approx(
            expected.get(key, 0.0), abs=tol
        ), key


class TestFocusedTransform:
    def test_ternary_tables(self, ternary, ternary_frame):
        ft = focused_transform(ternary, "x")
        assert_masses(ternary_frame, ft.result, {"x": 0.2, "x,y": 0.5, "x,z": 0.0, "x,y,z": 0.3})
        ft = focused_transform(ternary, "y")
        assert_masses(ternary_frame, ft.result, {"y": 0.1, "x,y": 0.6, "y,z": 0.3, "x,y,z": 0.0})

    def test_focal_elements_absorb_the_focus(self):
        # four-element case: {y}, {y,z}, {x,z,w} keep their masses, unioned with x
        frame = Frame(("x", "y", "z", "w"))
        m = MassFunction.from_labels(frame, {"y": 0.5, "y,z": 0.3, "x,z,w": 0.2})
        ft = focused_transform(m, "x")
        assert_masses(frame, ft.result, {"x,y": 0.5, "x,y,z": 0.3, "x,z,w": 0.2})

    def test_mass_conserved_exactly(self, rng):
        frame = frame_of_size(4)
        for _ in range(100):
            m = random_mass_function(frame, rng)
            for label in frame.elements:
                ft = focused_transform(m, label)
                assert sum(ft.result.masses.values()) == pytest.approx(1.0, abs=1e-15)
                assert ft.result.admissible


class TestOrthogonality:
    def test_holds_for_every_focus(self, ternary):
        for label in ternary.frame.elements:
            assert verify_orthogonality(ternary, focused_transform(ternary, label))

    def test_perturbation_breaks_it(self, ternary):
        from csbf.consistent_belief import FocusedTransform

        frame = ternary.frame
        ft = focused_transform(ternary, "x")
        masses = dict(ft.result.masses)
        masses[frame.subset(("x", "y"))] += 0.01
        masses[frame.full_mask] -= 0.01
        perturbed = FocusedTransform(
            "x", MassFunction(frame, masses), ft.distance_l1, ft.distance_l2
        )
        assert not verify_orthogonality(ternary, perturbed)

    def test_vacuous_trivially_orthogonal(self):
        frame = frame_of_size(3)
        m = MassFunction.vacuous(frame)
        assert verify_orthogonality(m, focused_transform(m, "x"))


class TestGlobalL1Belief:
    def test_ternary_criterion(self, ternary):
        result = global_l1_belief(ternary)
        assert result.optima == ("y",)
        assert result.criterion_values["x"] == pytest.approx(0.5, abs=1e-12)
        assert result.criterion_values["y"] == pytest.approx(0.4, abs=1e-12)
        assert result.criterion_values["z"] == pytest.approx(1.0, abs=1e-12)

    def test_binary_frame_picks_max_plausibility(self, rng):
        frame = Frame(("x", "y"))
        for _ in range(100):
            m = random_mass_function(frame, rng)
            pl = contour(m)
            best = max(pl.values())
            expected = {lbl for lbl in frame.elements if pl[lbl] >= best - 1e-9}
            assert set(global_l1_belief(m).optima) == expected

    def test_counterexample_search_finds_one(self):
        frame = frame_of_size(3)
        m, draws = find_global_l1_counterexample(frame, seed=20240, max_draws=5000)
        assert m is not None
        pl = contour(m)
        best = max(pl.values())
        most_plausible = {lbl for lbl in frame.elements if pl[lbl] >= best - 1e-9}
        assert set(global_l1_belief(m).optima) != most_plausible


class TestGlobalL2Belief:
    def test_ternary_criterion(self, ternary):
        result = global_l2_belief(ternary)
        assert result.optima == ("y",)
        assert result.criterion_values["x"] == pytest.approx(0.17, abs=1e-12)
        assert result.criterion_values["y"] == pytest.approx(0.08, abs=1e-12)
        assert result.criterion_values["z"] == pytest.approx(0.54, abs=1e-12)

    def test_vacuous_ties_at_zero(self):
        frame = frame_of_size(3)
        result = global_l2_belief(MassFunction.vacuous(frame))
        assert result.optima == frame.elements
        assert all(v == 0.0 for v in result.criterion_values.values())

    def test_criterion_is_squared_belief_distance(self, rng):
        frame = frame_of_size(4)
        space = EmbeddingSpace(SpaceKind.BELIEF, frame)
        for _ in range(25):
            m = random_mass_function(frame, rng)
            origin = embed(m, space)
            result = global_l2_belief(m)
            for label in frame.elements:
                ft = focused_transform(m, label)
                direct = lp_distance(origin, embed(ft.result, space), 2)
                assert result.criterion_values[label] == pytest.approx(direct**2, abs=1e-12)
                assert ft.distance_l2 == pytest.approx(direct, abs=1e-12)

    def test_can_diverge_from_global_l1(self):
        # documented instance where the L1 and L2 belief picks differ
        frame = frame_of_size(3)
        rng = np.random.default_rng(7)
        found = None
        for _ in range(100):
            m = random_mass_function(frame, rng, full_support=True)
            if set(global_l1_belief(m).optima) != set(global_l2_belief(m).optima):
                found = m
                break
        assert found is not None

    def test_l1_distance_identity(self, rng):
        # direct belief-space L1 distance matches the closed-form criterion
        frame = frame_of_size(4)
        space = EmbeddingSpace(SpaceKind.BELIEF, frame)
        for _ in range(25):
            m = random_mass_function(frame, rng)
            origin = embed(m, space)
            for label in frame.elements:
                ft = focused_transform(m, label)
                direct = lp_distance(origin, embed(ft.result, space), 1)
                assert ft.distance_l1 == pytest.approx(direct, abs=1e-12)

    def test_l1_local_optimality_probe(self, ternary, rng):
        # random points of the ultrafilter simplex never beat the closed form
        frame = ternary.frame
        space = EmbeddingSpace(SpaceKind.BELIEF, frame)
        origin = embed(ternary, space)
        from csbf import ultrafilter

        for label in frame.elements:
            ft = focused_transform(ternary, label)
            members = ultrafilter(frame, label)
            for _ in range(200):
                weights = rng.dirichlet(np.ones(len(members)))
                candidate = MassFunction(
                    frame, {mask: float(w) for mask, w in zip(members, weights)}
                )
                d = lp_distance(origin, embed(candidate, space), 1)
                assert d >= ft.distance_l1 - 1e-12


class TestGammaBox:
    def test_bounds_follow_inside_belief(self, ternary, ternary_frame):
        box = partial_linf_belief(ternary, "x")
        view = belief_from_mass(ternary)
        radius = view.belief_of(ternary_frame.complement(ternary_frame.singleton("x")))
        assert box.distance == pytest.approx(radius, abs=1e-12)
        for mask in box.lower:
            inside = view.belief_of(mask ^ ternary_frame.singleton("x"))
            assert box.lower[mask] == pytest.approx(-radius - inside, abs=1e-12)
            assert box.upper[mask] == pytest.approx(box.lower[mask] + 2 * radius, abs=1e-12)

    def test_midpoint_maps_to_focused_transform(self, rng):
        for i in range(200):
            frame = frame_of_size(2 + i % 3)
            m = random_mass_function(frame, rng)
            for label in frame.elements:
                box = partial_linf_belief(m, label)
                bary = gamma_to_mass(box, box.midpoint())
                assert bary.allclose(focused_transform(m, label).result, tol=1e-12)

    def test_ternary_corners_match_vertex_formulas(self, ternary, ternary_frame):
        # frozen closed-form corner list for the ternary case, in terms of
        # belief values, as [m(x), m(xy), m(xz), m(frame)]
        frame = ternary_frame
        view = belief_from_mass(ternary)
        bx = view.belief_of(frame.singleton("x"))
        bxy = view.belief_of(frame.subset(("x", "y")))
        bxz = view.belief_of(frame.subset(("x", "z")))
        bc = view.belief_of(frame.complement(frame.singleton("x")))
        expected = {
            (bx - bc, bxy - bx, bxz - bx, 1 + bx + bc - bxy - bxz),
            (bx - bc, bxy - bx, bxz - bx + 2 * bc, 1 + bx - bxy - bxz - bc),
            (bx - bc, bxy - bx + 2 * bc, bxz - bx, 1 + bx - bxy - bxz - bc),
            (bx - bc, bxy - bx + 2 * bc, bxz - bx + 2 * bc, 1 + bx - bxy - bxz - 3 * bc),
            (bx + bc, bxy - bx - 2 * bc, bxz - bx - 2 * bc, 1 + bx - bxy - bxz + 3 * bc),
            (bx + bc, bxy - bx - 2 * bc, bxz - bx, 1 + bx - bxy - bxz + bc),
            (bx + bc, bxy - bx, bxz - bx - 2 * bc, 1 + bx - bxy - bxz + bc),
            (bx + bc, bxy - bx, bxz - bx, 1 + bx - bxy - bxz - bc),
        }
        box = partial_linf_belief(ternary, "x")
        order = [
            frame.singleton("x"),
            frame.subset(("x", "y")),
            frame.subset(("x", "z")),
            frame.full_mask,
        ]
        got = set()
        for corner in box.corners():
            point = gamma_to_mass(box, corner)
            got.add(tuple(round(point.value(mask), 9) for mask in order))
        assert got == {tuple(round(v, 9) for v in vertex) for vertex in expected}

    def test_corner_belief_vectors_attain_the_distance(self, ternary):
        frame = ternary.frame
        space = EmbeddingSpace(SpaceKind.BELIEF, frame)
        origin = embed(ternary, space)
        box = partial_linf_belief(ternary, "x")
        assert len(box.corners()) == 8
        for corner in box.corners():
            point = gamma_to_mass(box, corner)
            d = lp_distance(origin, embed(point, space), math.inf)
            assert d == pytest.approx(box.distance, abs=1e-12)

    def test_zero_width_box_returns_the_input(self):
        frame = frame_of_size(3)
        m = MassFunction.from_labels(frame, {"x": 0.25, "x,z": 0.25, "x,y,z": 0.5})
        box = partial_linf_belief(m, "x")
        assert box.distance == 0.0
        assert gamma_to_mass(box, box.midpoint()).allclose(m, tol=1e-15)

    def test_point_outside_box_rejected(self, ternary):
        box = partial_linf_belief(ternary, "x")
        point = box.midpoint()
        some_mask = next(iter(point))
        point[some_mask] = box.upper[some_mask] + 0.5
        with pytest.raises(ValueError):
            gamma_to_mass(box, point)

    def test_point_with_wrong_coordinates_rejected(self, ternary):
        box = partial_linf_belief(ternary, "x")
        point = box.midpoint()
        point.pop(next(iter(point)))
        with pytest.raises(ValueError):
            gamma_to_mass(box, point)

    def test_single_element_frame_degenerates_cleanly(self):
        frame = Frame(("x",))
        m = MassFunction.vacuous(frame)
        ft = focused_transform(m, "x")
        assert ft.result.allclose(m) and ft.distance_l1 == 0.0
        box = partial_linf_belief(m, "x")
        assert box.corners() == [{}]
        assert gamma_to_mass(box, {}).allclose(m)
        assert verify_orthogonality(m, ft)


class TestGlobalLinfBelief:
    def test_ternary_optimum(self, ternary):
        result = global_linf_belief(ternary)
        assert result.optima == ("y",)
        assert result.payloads["y"].distance == pytest.approx(0.2, abs=1e-12)

    def test_vacuous_ties(self):
        frame = frame_of_size(3)
        assert global_linf_belief(MassFunction.vacuous(frame)).optima == frame.elements

    def test_distance_complements_plausibility(self, rng):
        frame = frame_of_size(4)
        for _ in range(40):
            m = random_mass_function(frame, rng)
            result = global_linf_belief(m)
            pl = contour(m)
            for label in result.optima:
                assert result.payloads[label].distance == pytest.approx(
                    1.0 - pl[label], abs=1e-12
                )


class TestCounterexampleFixture:
    def test_committed_witness_still_works(self):
        with open(os.path.join(FIXTURES, "l1_belief_counterexample.json")) as fh:
            doc = json.load(fh)
        frame = Frame(tuple(doc["frame"]))
        m = MassFunction.from_labels(frame, doc["masses"])
        pl = contour(m)
        best = max(pl.values())
        most_plausible = {lbl for lbl in frame.elements if pl[lbl] >= best - 1e-9}
        optima = set(global_l1_belief(m).optima)
        assert optima == set(doc["global_l1_belief_optima"])
        assert most_plausible == set(doc["max_plausibility_elements"])
        assert optima != most_plausible
