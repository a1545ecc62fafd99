import math

import pytest

from csbf import (
    FrameTooLargeError,
    MassFunction,
    OracleConfig,
    SpaceKind,
    brute_force_partial,
    exhaustive_global_check,
    partial_linf_mass,
)
from csbf.oracle import SUPPORTED_PAIRS
from csbf.sampling import random_mass_function

from conftest import frame_of_size

FAST_CFG = OracleConfig(random_restarts=4)


class TestBruteForcePartial:
    def test_running_example_l1_mass(self, ternary):
        report = brute_force_partial(ternary, "x", 1, SpaceKind.MASS_N2, FAST_CFG)
        assert report.oracle_distance == pytest.approx(0.4, abs=FAST_CFG.match_tolerance)
        assert report.converged

    def test_vacuous_is_its_own_approximation(self):
        frame = frame_of_size(3)
        m = MassFunction.vacuous(frame)
        for p, kind in SUPPORTED_PAIRS:
            report = brute_force_partial(m, "x", p, kind, FAST_CFG)
            assert report.oracle_distance == pytest.approx(0.0, abs=1e-12)
            assert report.oracle_point.allclose(m, tol=1e-9)

    def test_l2_belief_point_matches_focused_transform(self, ternary):
        from csbf import focused_transform

        report = brute_force_partial(ternary, "x", 2, SpaceKind.BELIEF, FAST_CFG)
        expected = focused_transform(ternary, "x").result
        assert report.oracle_point.allclose(expected, tol=1e-4)

    def test_closed_form_never_beaten(self, rng):
        frame = frame_of_size(3)
        for _ in range(3):
            m = random_mass_function(frame, rng)
            for p, kind in SUPPORTED_PAIRS:
                for label in frame.elements:
                    report = brute_force_partial(m, label, p, kind, FAST_CFG)
                    assert report.oracle_distance >= report.closed_form_distance - FAST_CFG.tolerance
                    assert report.oracle_distance <= (
                        report.closed_form_distance + 10 * FAST_CFG.grid_step
                    )

    def test_linf_incumbent_lies_in_the_box(self, rng):
        frame = frame_of_size(3)
        for _ in range(5):
            m = random_mass_function(frame, rng)
            for label in frame.elements:
                report = brute_force_partial(m, label, math.inf, SpaceKind.MASS_N2, FAST_CFG)
                box = partial_linf_mass(m, label)
                assert box.contains(report.oracle_point, tol=FAST_CFG.match_tolerance)

    def test_deterministic_for_fixed_seed(self, ternary):
        a = brute_force_partial(ternary, "y", 1, SpaceKind.BELIEF, FAST_CFG)
        b = brute_force_partial(ternary, "y", 1, SpaceKind.BELIEF, FAST_CFG)
        assert a.oracle_distance == b.oracle_distance
        assert a.oracle_point.allclose(b.oracle_point, tol=0.0)

    def test_frame_too_large_rejected(self):
        frame = frame_of_size(5)
        m = MassFunction.vacuous(frame)
        with pytest.raises(FrameTooLargeError):
            brute_force_partial(m, "x", 1, SpaceKind.MASS_N2, FAST_CFG)

    def test_explosive_lattice_rejected(self):
        frame = frame_of_size(4)
        m = MassFunction.vacuous(frame)
        with pytest.raises(ValueError, match="grid_step"):
            brute_force_partial(m, "x", 1, SpaceKind.MASS_N2, OracleConfig(grid_step=0.02))

    def test_four_element_frame_with_coarse_grid(self, rng):
        frame = frame_of_size(4)
        m = random_mass_function(frame, rng)
        cfg = OracleConfig(grid_step=0.1, random_restarts=4)
        for p, kind in SUPPORTED_PAIRS:
            report = brute_force_partial(m, "x", p, kind, cfg)
            assert report.converged, (p, kind, report.max_gap)


class TestExhaustiveGlobalCheck:
    def test_running_example_every_pair(self, ternary):
        from csbf.oracle import library_global

        for p, kind in SUPPORTED_PAIRS:
            assert exhaustive_global_check(ternary, p, kind, FAST_CFG)
            assert library_global(ternary, p, kind).optima == ("y",)

    def test_uniform_bayesian_ties_every_singleton(self):
        frame = frame_of_size(3)
        m = MassFunction.from_labels(frame, {"x": 1 / 3, "y": 1 / 3, "z": 1 / 3})
        for p, kind in SUPPORTED_PAIRS:
            reports = {
                lbl: brute_force_partial(m, lbl, p, kind, FAST_CFG) for lbl in frame.elements
            }
            distances = [r.oracle_distance for r in reports.values()]
            assert max(distances) - min(distances) <= FAST_CFG.match_tolerance
            assert exhaustive_global_check(m, p, kind, FAST_CFG)

    def test_random_draws_agree(self, rng):
        frame = frame_of_size(3)
        for _ in range(3):
            m = random_mass_function(frame, rng)
            for p, kind in SUPPORTED_PAIRS:
                assert exhaustive_global_check(m, p, kind, FAST_CFG)
