from fractions import Fraction

import numpy as np
import pytest

import clarktorus as ct
from clarktorus.polyalg import (
    GR_I,
    GaussianRational,
    ParseError,
    Poly1,
    Poly2,
    PolynomialError,
    parse_poly,
    poly1_roots,
    poly_to_str,
    proportional_scalar,
    reflect,
)


def random_exact_poly(rng, dmax=4):
    d1, d2 = rng.integers(0, dmax + 1, size=2)
    coeffs = {}
    for j in range(d1 + 1):
        for k in range(d2 + 1):
            if rng.uniform() < 0.6:
                coeffs[(j, k)] = GaussianRational(
                    Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))),
                    Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))),
                )
    return Poly2(coeffs, (d1, d2))


class TestGaussianRational:
    def test_arithmetic_exact(self):
        a = GaussianRational(Fraction(1, 2), Fraction(-3, 4))
        b = GaussianRational(2, 1)
        assert (a + b) - b == a
        assert (a * b) / b == a
        assert a.conjugate().conjugate() == a
        assert complex(GR_I * GR_I) == -1

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            GaussianRational(1) / GaussianRational(0)

    def test_str_forms(self):
        assert str(GaussianRational(Fraction(3, 2))) == "3/2"
        assert str(GaussianRational(0, 2)) == "2i"
        assert str(GaussianRational(1, -2)) == "1-2i"


class TestReflect:
    def test_antidiagonal_numerator(self):
        p = parse_poly("2 - z1 - z2")
        assert reflect(p, (1, 1)) == parse_poly("2*z1*z2 - z1 - z2")

    def test_identity_constant(self):
        assert reflect(parse_poly("1"), (0, 0)) == parse_poly("1")

    def test_degree_two_one(self):
        p = parse_poly("2 - z1*z2 - z1^2*z2")
        assert reflect(p, (2, 1)) == parse_poly("2*z1^2*z2 - z1 - 1")

    def test_involution_random(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            p = random_exact_poly(rng)
            d = (p.deg[0] + int(rng.integers(0, 2)), p.deg[1] + int(rng.integers(0, 2)))
            assert reflect(reflect(p, d), d) == p

    def test_modulus_preserved_on_torus(self):
        rng = np.random.default_rng(5)
        p = parse_poly("4 - z2 - 3*z1 - z1*z2 + z1^2")
        pt = reflect(p, (2, 1))
        th = rng.uniform(0, 2 * np.pi, size=(1000, 2))
        z1, z2 = np.exp(1j * th[:, 0]), np.exp(1j * th[:, 1])
        vp = np.abs(p.evaluate_many(z1, z2))
        vt = np.abs(pt.evaluate_many(z1, z2))
        assert np.abs(vp - vt).max() <= 1e-12 * max(1.0, vp.max())

    def test_degree_too_small(self):
        with pytest.raises(PolynomialError):
            reflect(parse_poly("z1^2"), (1, 1))


class TestEvaluate:
    def test_at_origin_and_corner(self):
        p = parse_poly("2 - z1 - z2")
        assert complex(p.evaluate(0, 0)) == 2
        assert complex(p.evaluate(1, 1)) == 0

    def test_reflected_at_mixed_point(self):
        pt = parse_poly("2*z1*z2 - z1 - z2")
        assert abs(complex(pt.evaluate(1j, -1j)) - 2) < 1e-15

    def test_exact_evaluation(self):
        p = parse_poly("z1*z2 - 1/2")
        val = p.evaluate(GaussianRational(Fraction(1, 3)), GaussianRational(Fraction(1, 5)))
        assert val == GaussianRational(Fraction(1, 15) - Fraction(1, 2))

    def test_product_homomorphism(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = random_exact_poly(rng, 3)
            q = random_exact_poly(rng, 3)
            z = complex(rng.normal(), rng.normal()) * 0.5
            w = complex(rng.normal(), rng.normal()) * 0.5
            lhs = complex((p * q).evaluate(z, w))
            rhs = complex(p.evaluate(z, w)) * complex(q.evaluate(z, w))
            assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))


class TestSlice:
    def test_slice_first(self):
        p = parse_poly("2 - z1*z2 - z1^2*z2")
        assert p.slice("first", 1) == Poly1([2, -2])

    def test_slice_second_origin(self):
        p = parse_poly("2 - z1 - z2")
        assert p.slice("second", 0) == Poly1([2, -1])

    def test_slice_monomial(self):
        p = parse_poly("z1*z2")
        a = np.exp(0.7j)
        s = p.slice("first", a)
        assert s.degree() == 1
        assert abs(s.coeffs[1] - a) < 1e-15


class TestCoordinateContent:
    def test_linear_factor(self):
        p = parse_poly("(z1 - 1)*(z1*z2 - 1)")
        c = p.coordinate_content("first")
        assert c == Poly1([-1, 1])

    def test_no_factor(self):
        p = parse_poly("1 - z1*z2")
        assert p.coordinate_content("first").degree() == 0

    def test_second_axis_gaussian(self):
        p = parse_poly("(z2 - i)*(2 - z1 - z2)")
        c = p.coordinate_content("second")
        assert c == Poly1([GaussianRational(0, -1), GaussianRational(1)])

    def test_zero_rejected(self):
        with pytest.raises(PolynomialError):
            Poly2.zero().coordinate_content("first")

    def test_content_roots_divide(self):
        p = parse_poly("(z1 - 1)*(z1*z2 - 1)")
        for r in poly1_roots(p.coordinate_content("first")):
            q = p.divide_out_linear("first", r)
            assert q.actual_degree()[0] == p.actual_degree()[0] - 1


class TestDivideOutLinear:
    def test_exact_division(self):
        p = parse_poly("(z1 - 1)*(z1*z2 - 1)")
        q = p.divide_out_linear("first", GaussianRational(1))
        assert q == parse_poly("z1*z2 - 1")

    def test_nondivisor_raises(self):
        with pytest.raises(PolynomialError):
            parse_poly("1 - z1*z2").divide_out_linear("first", GaussianRational(1))


class TestPoly1Roots:
    def test_linear(self):
        assert np.allclose(poly1_roots(Poly1([2, -2])), [1.0])

    def test_quadratic(self):
        roots = sorted(poly1_roots(Poly1([1, 0, 1])), key=lambda r: r.imag)
        assert np.allclose(roots, [-1j, 1j])

    def test_level_slice_root(self):
        p = parse_poly("2 - z1 - z2")
        q = reflect(p, (1, 1)) - p
        th = 0.83
        s = q.slice("first", complex(np.exp(1j * th)))
        roots = poly1_roots(s)
        assert len(roots) == 1
        assert abs(roots[0] - np.exp(-1j * th)) < 1e-12

    def test_residual_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
            q = Poly1(list(coeffs))
            scale = 1 + max(abs(c) for c in coeffs)
            for r in poly1_roots(q):
                assert abs(q(r)) <= 1e-10 * scale

    def test_degree_zero(self):
        assert poly1_roots(Poly1([3])) == []

    def test_zero_poly_rejected(self):
        with pytest.raises(PolynomialError):
            poly1_roots(Poly1([0]))


class TestRingOps:
    def test_add_sub_roundtrip(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            p, q = random_exact_poly(rng), random_exact_poly(rng)
            assert (p + q) - q == p

    def test_poly1_divmod(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            a = Poly1([GaussianRational(int(x)) for x in rng.integers(-5, 6, size=5)])
            b = Poly1([GaussianRational(int(x)) for x in rng.integers(-5, 6, size=3)])
            if b.is_zero():
                continue
            q, r = a.divmod(b)
            assert q * b + r == a
            assert r.is_zero() or r.degree() < b.degree()

    def test_proportional_scalar(self):
        p = parse_poly("1 - z1*z2")
        assert proportional_scalar(2 * p, p) == GaussianRational(2)
        assert proportional_scalar(parse_poly("1 - z1"), p) is None
        with pytest.raises(PolynomialError):
            proportional_scalar(p, Poly2.zero())


class TestParser:
    def test_paper_polynomials_roundtrip(self):
        for text in [
            "2 - z1 - z2",
            "2 - z1*z2 - z1^2*z2",
            "4 - z2 - 3*z1 - z1*z2 + z1^2",
            "3/2*z1 - 2i*z2 + (1-2i)*z1*z2",
        ]:
            p = parse_poly(text)
            assert parse_poly(poly_to_str(p)) == p

    def test_random_roundtrip(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            p = random_exact_poly(rng)
            assert parse_poly(poly_to_str(p)) == p

    def test_gaussian_literals(self):
        assert parse_poly("1-2i") == Poly2.constant(GaussianRational(1, -2))
        assert parse_poly("3/2") == Poly2.constant(GaussianRational(Fraction(3, 2)))
        assert parse_poly("3/2i") == Poly2.constant(GaussianRational(0, Fraction(3, 2)))

    def test_parentheses_and_powers(self):
        assert parse_poly("(z1 - 1)^2") == parse_poly("z1^2 - 2*z1 + 1")

    def test_unary_minus(self):
        assert parse_poly("-z1 + 2") == parse_poly("2 - z1")

    def test_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse_poly("2 - z1 &")
        assert err.value.pos == 7
        assert "^" in err.value.caret()

    def test_bad_exponent(self):
        with pytest.raises(ParseError):
            parse_poly("z1^(1)")
        with pytest.raises(ParseError):
            parse_poly("z1^i")

    def test_trailing_input(self):
        with pytest.raises(ParseError):
            parse_poly("z1 z2")


class TestPoly2Structure:
    def test_zero_coeffs_not_stored(self):
        p = parse_poly("z1 - z1")
        assert p.is_zero() and p.coeffs == {}

    def test_declared_degree_validation(self):
        with pytest.raises(PolynomialError):
            Poly2({(2, 0): 1}, (1, 1))

    def test_exact_to_float_oneway(self):
        p = parse_poly("2 - z1")
        assert p.exact and not p.to_float().exact

    def test_mixed_arithmetic_promotes(self):
        p = parse_poly("2 - z1")
        q = Poly2({(0, 1): 0.5 + 0j})
        assert not (p + q).exact
