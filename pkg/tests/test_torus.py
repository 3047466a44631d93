import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusword.torus import (
    BoundaryAmbiguityError,
    DegenerateHexagonError,
    IntervalCell,
    ParallelogramCell,
    PiecewiseTranslation,
    TorusError,
    check_fundamental_domain,
    circle_rotation,
    hexagon_example,
    hexagon_interior_point,
    hexagon_translation,
    minimality_check,
    sturmian_cylinder_measure,
    torus_coordinates,
    verify_measure_identities,
)
from torusword.words import Alphabet, FiniteWord

GOLDEN_RATIO = (1 + 5**0.5) / 2
ALPHA = 1 / GOLDEN_RATIO


class TestCells:
    def test_interval_classify(self):
        c = IntervalCell(1, 0.0, 0.5, (0,))
        assert c.classify(np.array([0.25]), 1e-9) == "in"
        assert c.classify(np.array([0.75]), 1e-9) == "out"
        assert c.classify(np.array([0.5 - 1e-12]), 1e-9) == "boundary"
        # exact lower endpoints belong to the cell
        assert c.classify(np.array([0.0]), 1e-9) == "in"

    def test_parallelogram_classify_and_measure(self):
        c = ParallelogramCell(1, (0.0, 0.0), (2.0, 0.0), (0.0, 1.0), (0, 0))
        assert c.measure == pytest.approx(2.0)
        assert c.classify(np.array([1.0, 0.5]), 1e-9) == "in"
        assert c.classify(np.array([2.5, 0.5]), 1e-9) == "out"
        assert c.classify(np.array([1.0, 1.0 - 1e-12]), 1e-9) == "boundary"
        assert c.classify(np.array([0.0, 0.0]), 1e-9) == "in"

    def test_degenerate_parallelogram_rejected(self):
        with pytest.raises(TorusError):
            ParallelogramCell(1, (0, 0), (1, 0), (2, 0), (0, 0))


class TestCircleRotation:
    def test_cells_partition_unit_interval(self):
        T = circle_rotation(ALPHA)
        assert T.m == 2
        assert T.domain_volume() == pytest.approx(1.0)
        assert T.covolume() == pytest.approx(1.0)

    def test_coding_matches_direct_rotation(self):
        T = circle_rotation(ALPHA)
        word = T.coding(0.0)
        got = word.prefix(200)
        x = 0.0
        expected = []
        for _ in range(200):
            expected.append(0 if x < 1 - ALPHA else 1)
            x = (x + ALPHA) % 1.0
        assert got.tolist() == expected

    def test_orbit_points_stay_in_domain(self):
        T = circle_rotation(ALPHA)
        res = T.orbit(0.2, 500)
        assert not res.truncated
        assert res.points.shape == (501, 1)
        assert ((res.points >= 0) & (res.points < 1)).all()

    def test_orbit_displacements_are_cell_shifts(self):
        T = circle_rotation(ALPHA)
        res = T.orbit(0.1, 50)
        for j in range(50):
            step = res.points[j + 1] - res.points[j]
            assert np.allclose(step, T.displacement(int(res.cells[j])))

    def test_rational_alpha_rejected_by_minimality(self):
        verdict = minimality_check(np.array([0.5]))
        assert verdict.status == "relation_found"
        assert verdict.relation == (2, -1)

    def test_alpha_out_of_range(self):
        with pytest.raises(TorusError):
            circle_rotation(0.0)
        with pytest.raises(TorusError):
            circle_rotation(1.0)


class TestBoundaryHandling:
    def test_boundary_band_point_rejected(self):
        T = circle_rotation(ALPHA)
        with pytest.raises(BoundaryAmbiguityError):
            T.locate(np.array([1 - ALPHA + 1e-12]))

    def test_coding_truncates_on_ambiguous_start(self):
        T = circle_rotation(ALPHA)
        with pytest.raises(BoundaryAmbiguityError):
            T.coding(1 - ALPHA + 1e-12)

    def test_orbit_through_boundary_truncates(self):
        # rotation by 0.25 from 0.2401 lands within eps of the cut at 0.75
        T = circle_rotation(0.25)
        res = T.orbit(0.2401, 10, eps=0.02)
        assert res.truncated
        assert res.reason == "boundary ambiguity"
        assert res.cells.size < 10


class TestHexagon:
    def test_example_geometry(self):
        T = hexagon_example(0)
        assert T.m == 3
        assert T.k == 2
        assert T.covolume() == pytest.approx(1.0, abs=1e-9)
        assert T.domain_volume() == pytest.approx(1.0, abs=1e-9)

    def test_translation_identity(self):
        # measure-weighted displacements cancel: sum_i A_i (a + B n_i) = 0
        T = hexagon_example(0)
        total = sum(c.measure * T.displacement(c.id) for c in T.cells)
        assert np.allclose(total, 0.0, atol=1e-12)
        rep = verify_measure_identities(T, samples=10**4, seed=0)
        assert rep.sum_exact == pytest.approx(0.0, abs=1e-9)

    def test_interior_point_is_located(self):
        T = hexagon_example(0)
        x0 = hexagon_interior_point(T)
        assert T.locate(x0).id == 1

    def test_seeds_give_distinct_generic_shapes(self):
        a0 = torus_coordinates(hexagon_example(0))
        a1 = torus_coordinates(hexagon_example(1))
        assert not np.allclose(a0, a1)
        assert minimality_check(a0).status == "no_relation_up_to_bound"

    def test_unperturbed_shape_is_rational(self):
        T = hexagon_example(0, perturbation=0.0)
        coords = torus_coordinates(T)
        assert np.allclose(np.sort(coords), [1 / 6, 1 / 2], atol=1e-9)
        verdict = minimality_check(coords)
        assert verdict.status == "relation_found"

    def test_degenerate_input_rejected(self):
        with pytest.raises(DegenerateHexagonError):
            hexagon_translation((1, 0), (2, 0), (3, 0))

    def test_orbit_stays_in_hexagon_cells(self):
        T = hexagon_example(0)
        res = T.orbit(hexagon_interior_point(T), 2000)
        assert not res.truncated
        for pt in res.points[::97]:
            T.locate(pt)

    def test_fundamental_domain_tiles(self):
        T = hexagon_example(0)
        assert check_fundamental_domain(T, samples=4000, seed=3) > 0.999


class TestSerialization:
    def test_circle_roundtrip(self):
        T = circle_rotation(ALPHA)
        S = PiecewiseTranslation.from_json(T.to_json())
        assert np.allclose(S.a, T.a)
        assert S.m == T.m
        assert S.coding(0.0).prefix(50).tolist() == T.coding(0.0).prefix(50).tolist()

    def test_hexagon_roundtrip(self):
        T = hexagon_example(1)
        S = PiecewiseTranslation.from_json(T.to_json())
        x0 = hexagon_interior_point(T)
        assert S.coding(x0).prefix(100).tolist() == T.coding(x0).prefix(100).tolist()
        assert np.allclose(S.lattice, T.lattice)


class TestMinimality:
    def test_irrational_direction_clears(self):
        verdict = minimality_check(np.array([ALPHA]))
        assert verdict.status == "no_relation_up_to_bound"
        assert not verdict.relation_found
        assert verdict.bound == 10**4

    def test_rational_pair(self):
        verdict = minimality_check(np.array([0.25, 0.5]))
        assert verdict.relation_found
        q = verdict.relation
        residual = q[0] * 0.25 + q[1] * 0.5 + q[2]
        assert abs(residual) < 1e-9

    def test_sign_normalization(self):
        verdict = minimality_check(np.array([0.5]))
        assert verdict.relation[0] > 0


class TestCylinderMeasures:
    def test_letter_measures(self):
        ab = Alphabet(2)
        m1 = sturmian_cylinder_measure(ALPHA, FiniteWord.from_labels(ab, "1"))
        m2 = sturmian_cylinder_measure(ALPHA, FiniteWord.from_labels(ab, "2"))
        assert m1 == pytest.approx(1 - ALPHA, abs=1e-12)
        assert m1 + m2 == pytest.approx(1.0, abs=1e-12)

    def test_forbidden_factor_has_zero_measure(self):
        ab = Alphabet(2)
        assert sturmian_cylinder_measure(ALPHA, FiniteWord.from_labels(ab, "11")) == 0.0

    @given(st.integers(1, 7))
    @settings(max_examples=7, deadline=None)
    def test_cylinders_partition_by_length(self, n):
        from torusword.words import factors

        T = circle_rotation(ALPHA)
        w = T.coding(0.0)
        total = sum(sturmian_cylinder_measure(ALPHA, f) for f in factors(w, n, 2**14))
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_measures_match_orbit_frequencies(self):
        T = circle_rotation(ALPHA)
        data = T.coding(0.0).prefix(2**16)
        ab = Alphabet(2)
        for fac in ("12", "21", "22", "121", "212", "221", "122"):
            arr = np.array([int(c) - 1 for c in fac], dtype=np.uint8)
            windows = np.lib.stride_tricks.sliding_window_view(data, len(arr))
            freq = float((windows == arr).all(axis=1).mean())
            exact = sturmian_cylinder_measure(ALPHA, FiniteWord.from_labels(ab, fac))
            assert exact == pytest.approx(freq, abs=2e-3)


class TestMeasureIdentities:
    def test_circle_exact(self):
        # sum_exact and sum_mc are residuals |sum A_i - 1|
        rep = verify_measure_identities(circle_rotation(ALPHA), samples=10**4, seed=0)
        assert rep.residual_exact < 1e-12
        assert rep.sum_exact < 1e-12

    def test_hexagon_monte_carlo_within_three_se(self):
        rep = verify_measure_identities(hexagon_example(0), samples=10**5, seed=0)
        assert rep.residual_mc <= 3 * rep.residual_mc_se + 1e-12
        assert rep.sum_mc <= 3 * rep.sum_mc_se + 1e-12
