"""Tests for polynomial arithmetic, root finding, and discriminants.

Root finding is checked against planted factorizations, and the discriminant
against the product of squared root differences computed with numpy's
eigenvalue-based solver, so the two implementations cross-validate.
"""

import numpy as np
import pytest

from quasibraid import (
    BivariatePolynomial,
    InputError,
    NumericalFailure,
    UnivariatePolynomial,
    bivariate_from_json,
    bivariate_to_json,
    discriminant_w,
    fiber_roots,
    parse_bivariate_text,
    raw_roots,
    roots,
)

Z = UnivariatePolynomial((0, 1))
ONE = UnivariatePolynomial((1,))


def poly_from_roots(values):
    acc = ONE
    for r in values:
        acc = acc * UnivariatePolynomial((-r, 1))
    return acc


def squared_root_gaps(coeffs_ascending, z):
    """Product of (w_i - w_j)^2 over the fiber at z, via numpy eigenvalues."""
    fiber = [c(z) for c in coeffs_ascending]
    values = np.roots(fiber[::-1])
    prod = 1.0 + 0j
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            prod *= (values[i] - values[j]) ** 2
    return prod


class TestUnivariateArithmetic:
    def test_exact_trailing_zeros_are_trimmed(self):
        p = UnivariatePolynomial((1, 2, 0.0, 0.0))
        assert p.coefficients == (1 + 0j, 2 + 0j)
        assert p.degree == 1

    def test_zero_polynomial_has_degree_minus_one(self):
        assert UnivariatePolynomial(()).degree == -1
        assert UnivariatePolynomial((0.0,)).degree == -1

    def test_horner_evaluation(self):
        p = UnivariatePolynomial((1, -2, 3))
        assert p(2) == 1 - 4 + 12

    def test_evaluation_broadcasts_over_arrays(self):
        p = UnivariatePolynomial((0, 1))
        out = p(np.array([1.0, 2.0, 3.0]))
        assert np.allclose(out, [1, 2, 3])

    def test_derivative(self):
        p = UnivariatePolynomial((5, 3, 0, 2))
        assert p.derivative().coefficients == (3 + 0j, 0j, 6 + 0j)

    def test_product_matches_numpy_convolution(self):
        a = UnivariatePolynomial((1, 2, 3))
        b = UnivariatePolynomial((-1, 4))
        expected = np.convolve([1, 2, 3], [-1, 4])
        assert np.allclose((a * b).coefficients, expected)

    def test_magnitude_at_sums_absolute_terms(self):
        p = UnivariatePolynomial((3, -4j))
        assert p.magnitude_at(2.0) == pytest.approx(3 + 8)


class TestRootFinding:
    def test_planted_grid_roots_are_recovered(self):
        grid = [complex(a, b) for a in range(-2, 3) for b in range(-2, 3)]
        rng = np.random.default_rng(20260818)
        for _ in range(30):
            degree = int(rng.integers(2, 9))
            planted = list(map(complex, rng.choice(grid, size=degree, replace=False)))
            remaining = list(raw_roots(poly_from_roots(planted)))
            for expect in planted:
                got = min(remaining, key=lambda v: abs(v - expect))
                assert abs(got - expect) <= 1e-8 * (1 + abs(expect))
                remaining.remove(got)

    def test_scaling_the_polynomial_does_not_move_roots(self):
        p = poly_from_roots([1, 2j, -3])
        assert np.allclose(raw_roots(p.scale(17 - 5j)), raw_roots(p))

    def test_degree_one_is_solved_directly(self):
        assert raw_roots(UnivariatePolynomial((6, -2))) == (3 + 0j,)

    def test_constant_polynomial_is_rejected(self):
        with pytest.raises(InputError):
            raw_roots(UnivariatePolynomial((5,)))
        with pytest.raises(InputError):
            roots(UnivariatePolynomial(()))

    def test_double_root_is_clustered_with_multiplicity(self):
        p = poly_from_roots([1, 1, -2])
        found = roots(p)
        by_mult = dict(zip(found.multiplicities, found.values))
        assert abs(by_mult[2] - 1) < 1e-6
        assert abs(by_mult[1] + 2) < 1e-6
        assert found.total == 3

    def test_triple_root(self):
        found = roots(poly_from_roots([1j, 1j, 1j]))
        assert found.multiplicities == (3,)
        assert abs(found.values[0] - 1j) < 1e-4

    def test_starved_iteration_fails_loudly(self):
        p = poly_from_roots([k / 4 for k in range(1, 9)])
        with pytest.raises(NumericalFailure):
            roots(p, max_iterations=1)

    def test_raw_roots_certification_can_be_relaxed(self):
        # Near-coincident roots stall the iteration around the square root of
        # machine precision; the collective certificate must still accept the
        # cluster at a loosened tolerance.
        p = poly_from_roots([1.0, 1.0 + 1e-9, -1.0])
        values = raw_roots(p, tol=1e-15, certify_tol=1e-7)
        assert sum(1 for v in values if abs(v - 1) < 1e-3) == 2


class TestDiscriminant:
    def test_quadratic_in_w_has_its_branch_value_at_zero(self):
        f = parse_bivariate_text("w^2 - z")
        disc = discriminant_w(f)
        assert disc.degree == 1
        found = roots(disc)
        assert abs(found.values[0]) < 1e-12

    def test_depressed_cubic_formula(self):
        # For w^3 + p*w + q the discriminant is -(4 p^3 + 27 q^2) up to the
        # resultant normalization, so with p = -3, q = 2 z^4 the zero set is
        # the eighth roots of unity.
        f = parse_bivariate_text("w^3 - 3*w + 2*z^4")
        disc = discriminant_w(f)
        rng = np.random.default_rng(11)
        samples = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        ratios = [disc(z) / (1 - z**8) for z in samples]
        assert np.allclose(ratios, ratios[0], rtol=1e-8)
        found = roots(disc)
        assert found.total == 8
        for v in found.values:
            assert abs(v**8 - 1) < 1e-8

    @pytest.mark.parametrize(
        "text",
        [
            "w^2 - z",
            "w^3 - 3*w + 2*z",
            "w^3 - 3*w + 2*z^4",
            "w^4 - 2*w + z^3 - z",
            "w^8 + w^2 - z",
        ],
    )
    def test_matches_squared_root_gaps_up_to_a_constant(self, text):
        # The resultant of f and df/dw equals a z-independent constant times
        # the product of squared differences of fiber roots.  Twenty random
        # fibers solved with numpy eigenvalues pin that constant down.
        f = parse_bivariate_text(text)
        disc = discriminant_w(f)
        rng = np.random.default_rng(hash(text) % 2**32)
        ratios = []
        for _ in range(20):
            z = complex(rng.standard_normal(), rng.standard_normal())
            gap = squared_root_gaps(f.w_coefficients, z)
            assert abs(gap) > 1e-12
            ratios.append(disc(z) / gap)
        ratios = np.array(ratios)
        assert np.allclose(ratios, ratios[0], rtol=1e-6)

    def test_repeated_factor_is_rejected(self):
        squared = parse_bivariate_text("w^2 - 2*z*w + z^2")
        with pytest.raises(InputError):
            discriminant_w(squared)

    def test_repeated_quadratic_factor_is_rejected(self):
        squared = parse_bivariate_text("w^4 - 2*z*w^2 + z^2")
        with pytest.raises(InputError):
            discriminant_w(squared)


class TestBivariate:
    def test_fiber_evaluates_coefficients(self):
        f = parse_bivariate_text("w^2 - z")
        assert f.fiber(4).coefficients == (-4 + 0j, 0j, 1 + 0j)
        assert f.evaluate(4, 2) == 0

    def test_fiber_roots_of_the_square_root_surface(self):
        f = parse_bivariate_text("w^2 - z")
        found = fiber_roots(f, 9)
        assert sorted(v.real for v in found.values) == pytest.approx([-3, 3])

    def test_w_linear_perturbation(self):
        f = parse_bivariate_text("w^3 - z")
        g = f.add_w_linear(0.25)
        assert g.evaluate(0, 2) == f.evaluate(0, 2) + 0.25 * 2

    def test_degree_must_be_at_least_two(self):
        with pytest.raises(InputError):
            parse_bivariate_text("w - z")

    def test_leading_coefficient_must_be_constant(self):
        with pytest.raises(InputError):
            parse_bivariate_text("z*w^2 - 1")

    def test_unknown_symbols_are_rejected(self):
        with pytest.raises(InputError):
            parse_bivariate_text("w^2 - x")

    def test_parse_handles_signs_and_fractional_coefficients(self):
        f = parse_bivariate_text("-w^2 + 0.5*z^2 - 2")
        assert f.w_degree == 2
        assert f.leading_constant == -1
        assert f.evaluate(2, 0) == 0.5 * 4 - 2

    def test_json_round_trip(self):
        f = parse_bivariate_text("w^3 - 3*w + 2*z^4")
        assert bivariate_from_json(bivariate_to_json(f)) == f

    def test_json_rejects_malformed_payloads(self):
        with pytest.raises(InputError):
            bivariate_from_json({"n": 2})
