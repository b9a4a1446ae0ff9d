import numpy as np
import pytest

from chowcert.field import PrimeModulus, SeededRng
from chowcert.geometry import (
    ChowPoint,
    SamplingStats,
    ambient_dimension,
    cone_dimension,
    expected_hessian_rank,
    expected_tangent_rank,
    hessian_at,
    sample_point,
    scaling_fiber_directions,
    tangent_basis,
    terracini_matrix,
)
from chowcert.matrix import null_vector
from chowcert.poly import LinearForm, Poly, contract, monomial_basis

MOD = PrimeModulus(20201)


def unit_form(n, i):
    coords = np.zeros(n + 1, dtype=np.int64)
    coords[i] = 1
    return LinearForm(coords, MOD)


def random_point(n, seed):
    return sample_point(n, MOD, SeededRng(seed))


class TestChowPoint:
    def test_rejects_zero_form(self):
        good = unit_form(2, 0)
        zero = LinearForm([0, 0, 0], MOD)
        with pytest.raises(ValueError):
            ChowPoint((good, good, zero))

    def test_rejects_wrong_count(self):
        with pytest.raises(ValueError):
            ChowPoint((unit_form(2, 0), unit_form(2, 1)))

    def test_expand(self):
        p = ChowPoint((unit_form(2, 0), unit_form(2, 1), unit_form(2, 2)))
        cubic = p.expand()
        assert cubic.coeffs[cubic.basis.index_of((1, 1, 1))] == 1
        assert cubic.coeffs.sum() == 1


class TestSamplePoint:
    def test_range_and_determinism(self):
        a = random_point(5, 99)
        b = random_point(5, 99)
        for fa, fb in zip(a.forms, b.forms):
            assert np.array_equal(fa.coords, fb.coords)
            assert fa.coords.min() >= 0 and fa.coords.max() < MOD.value

    def test_distinct_seeds_differ(self):
        a, b = random_point(5, 1), random_point(5, 2)
        assert any(
            not np.array_equal(fa.coords, fb.coords)
            for fa, fb in zip(a.forms, b.forms)
        )

    def test_stats_default_zero(self):
        stats = SamplingStats()
        sample_point(3, MOD, SeededRng(0), stats)
        assert stats.resamples == 0


class TestTangentBasis:
    def test_monomial_point_rank(self):
        # p = x0 x1 x2 at n=2: the 9 tangent vectors span dimension 7 = 3n+1
        p = ChowPoint((unit_form(2, 0), unit_form(2, 1), unit_form(2, 2)))
        mat = terracini_matrix([p])
        assert mat.shape == (9, 10)
        assert mat.rank() == 7

    def test_generic_point_rank(self):
        for n in (2, 3, 5):
            mat = terracini_matrix([random_point(n, 7)])
            assert mat.rank() == cone_dimension(n)

    def test_repeated_form_degenerates(self):
        # triple point x0^3: the span is x_i x0^2, dimension n+1 = 3
        x0 = unit_form(2, 0)
        p = ChowPoint((x0, x0, x0))
        mat = terracini_matrix([p])
        assert mat.rank() == 3

    def test_vector_values(self):
        p = ChowPoint((unit_form(2, 0), unit_form(2, 1), unit_form(2, 2)))
        basis = tangent_basis(p)
        assert len(basis.vectors) == 9
        # slot k=0, variable i=0: x0 * x1 x2
        v = basis.vectors[0]
        assert v.coeffs[v.basis.index_of((1, 1, 1))] == 1
        # slot k=2, variable i=2: x2 * x0 x1
        v = basis.vectors[8]
        assert v.coeffs[v.basis.index_of((1, 1, 1))] == 1
        # slot k=1, variable i=0: x0 * x0 x2 = x0^2 x2
        v = basis.vectors[3]
        assert v.coeffs[v.basis.index_of((2, 0, 1))] == 1


class TestTerraciniMatrix:
    def test_shape_and_order(self):
        points = [random_point(3, s) for s in (1, 2)]
        mat = terracini_matrix(points)
        assert mat.shape == (2 * 3 * 4, ambient_dimension(3))
        single = terracini_matrix([points[1]])
        assert np.array_equal(mat.data[12:], single.data)

    def test_generic_rank_three_points(self):
        points = [random_point(5, s) for s in (11, 12, 13)]
        mat = terracini_matrix(points)
        assert mat.shape == (54, 56)
        assert mat.rank() == expected_tangent_rank(5, 3) == 48

    def test_nondefectivity_sweep(self):
        # generic rank is min(r (3n+1), binom(n+3,3)) for all tested n, r
        for n in (2, 3, 4, 6, 10):
            dim = ambient_dimension(n)
            cone = cone_dimension(n)
            for r in range(1, dim // cone + 2):
                points = [random_point(n, 100 * n + s) for s in range(r)]
                assert terracini_matrix(points).rank() == min(r * cone, dim)


def certified_normal(points):
    mat = terracini_matrix(points)
    res = mat.rref()
    rng = SeededRng(4242)
    f0 = rng.vector(MOD, mat.cols - res.rank)
    n = points[0].n
    return Poly(monomial_basis(n, 3), null_vector(res, f0), MOD)


class TestHessian:
    def test_normal_vector_is_normal(self):
        points = [random_point(4, s) for s in (21, 22)]
        normal = certified_normal(points)
        for p in points:
            for t in tangent_basis(p).vectors:
                assert contract(t, normal).value == 0

    def test_symmetric_zero_diagonal(self):
        points = [random_point(4, s) for s in (31, 32)]
        normal = certified_normal(points)
        h = hessian_at(points[0], normal)
        data = h.entries.data
        assert np.array_equal(data, data.T)
        w = points[0].n + 1
        for k in range(3):
            block = data[k * w : (k + 1) * w, k * w : (k + 1) * w]
            assert not block.any()

    def test_expected_rank_generic(self):
        for n, r in ((2, 1), (3, 1), (4, 2), (5, 3)):
            pts = [random_point(n, 40 + 10 * n + s) for s in range(r)]
            normal = certified_normal(pts)
            h = hessian_at(pts[0], normal)
            assert h.entries.rank() == expected_hessian_rank(n)

    def test_scaling_fiber_in_kernel(self):
        points = [random_point(4, s) for s in (61, 62)]
        normal = certified_normal(points)
        for p in points:
            h = hessian_at(p, normal)
            for direction in scaling_fiber_directions(p):
                assert not (h.entries.data @ direction % MOD.value).any()

    def test_radial_direction_in_kernel(self):
        points = [random_point(3, 71)]
        normal = certified_normal(points)
        p = points[0]
        h = hessian_at(p, normal)
        radial = np.concatenate([f.coords for f in p.forms])
        assert not (h.entries.data @ radial % MOD.value).any()

    def test_normal_vector_validation(self):
        p = random_point(3, 81)
        wrong_degree = Poly.zero(monomial_basis(3, 2), MOD)
        with pytest.raises(ValueError):
            hessian_at(p, wrong_degree)


class TestDimensionHelpers:
    def test_values(self):
        assert cone_dimension(5) == 16
        assert ambient_dimension(5) == 56
        assert ambient_dimension(102) == 187460
        assert expected_tangent_rank(5, 3) == 48
        assert expected_hessian_rank(5) == 15
        assert expected_hessian_rank(2) == 6
        assert expected_hessian_rank(102) == 306

    def test_hessian_rank_requires_n2(self):
        with pytest.raises(ValueError):
            expected_hessian_rank(1)
