"""
Tests for the Cauchy and Szegő kernels, the wedge closed forms and the
ellipse Riemann maps.
"""

import math

import numpy as np
import pytest
import scipy.integrate

from cauchy_szego.errors import (
    DomainError,
    OnCurveError,
    SideMismatchError,
    UnsupportedCurveError,
)
from cauchy_szego.geometry import (
    INFINITY,
    Circle,
    Ellipse,
    MoebiusMap,
    WedgeBoundary,
    arc_length,
    curve_pushforward,
    mobius_apply,
    mobius_sqrt_deriv,
    quadrature,
    sample,
)
from cauchy_szego.kernels import (
    DomainSide,
    cauchy_kernel,
    cauchy_norm_sq,
    cauchy_szego_distance_sq,
    circle_cauchy_norm_sq,
    ellipse_cauchy_norm0,
    ellipse_exterior_map,
    ellipse_riemann_map,
    side_of,
    sinc,
    szego_boundary_kernel,
    szego_diag,
    szego_row,
    wedge_cauchy_norm_sq,
    wedge_I,
    wedge_riemann_map,
    wedge_szego_diag,
)
from cauchy_szego.lambda_function import lambda_ellipse_0
from cauchy_szego.specfun import theta_constants

INT = DomainSide.INTERIOR
EXT = DomainSide.EXTERIOR
TWO_PI = 2.0 * math.pi

# pole 3.5 lies outside E_2
SHIFTED_INVERSION = MoebiusMap(a=1, b=0.25j, c=1, d=-3.5)


class TestCauchyKernel:
    def test_unit_circle_at_origin(self):
        assert abs(cauchy_kernel(Circle(), INT, 0j, 0.0) - 1.0 / TWO_PI) < 1e-15

    def test_exterior_is_negated(self):
        rng = np.random.default_rng(7)
        c = Ellipse(r=1.5)
        for _ in range(20):
            z = complex(*rng.uniform(-3, 3, size=2))
            t = float(rng.uniform(0, TWO_PI))
            assert cauchy_kernel(c, EXT, z, t) == -cauchy_kernel(c, INT, z, t)

    def test_ellipse_top_vertex(self, ellipse2):
        """ζ = i with tangent −1: −1/(2πi·i) = 1/(2π)."""
        assert abs(cauchy_kernel(ellipse2, INT, 0j, math.pi / 2) - 1.0 / TWO_PI) < 1e-15

    def test_on_node(self):
        with pytest.raises(OnCurveError):
            cauchy_kernel(Circle(), INT, 1 + 0j, 0.0)

    def test_moebius_law(self, ellipse2):
        """C¹(z, ζ) = √Φ′(z)·C²(Φz, Φζ)·conj √Φ′(ζ) for a map with its pole outside."""
        n = 64
        image = curve_pushforward(SHIFTED_INVERSION, ellipse2, n)
        z = 0.3 + 0.2j
        wz = mobius_apply(SHIFTED_INVERSION, z)
        for j in range(0, n, 5):
            t = TWO_PI * j / n
            zeta = complex(sample(ellipse2, n).points[j])
            lhs = cauchy_kernel(ellipse2, INT, z, t)
            rhs = (mobius_sqrt_deriv(SHIFTED_INVERSION, z)
                   * cauchy_kernel(image, INT, wz, t)
                   * np.conj(mobius_sqrt_deriv(SHIFTED_INVERSION, zeta)))
            assert abs(lhs - rhs) < 1e-12 * abs(lhs)


class TestCauchyNorm:
    def test_unit_circle_center(self):
        assert abs(cauchy_norm_sq(Circle(), 0j, quadrature(Circle(), 64)) - 1.0 / TWO_PI) < 1e-15

    def test_circle_closed_form(self):
        c = Circle(center=1 - 1j, radius=2.0)
        rule = quadrature(c, 256)
        for z in (1 - 0.5j, 4 + 2j):
            assert abs(cauchy_norm_sq(c, z, rule) - circle_cauchy_norm_sq(c, z)) < 1e-12

    def test_ellipse_origin_matches_closed_form(self, ellipse2_rule):
        assert abs(cauchy_norm_sq(Ellipse(r=2.0), 0j, ellipse2_rule) - ellipse_cauchy_norm0(2.0)) < 1e-10

    def test_far_field_scaling(self, ellipse2, ellipse2_rule):
        z = 1e6 + 0j
        scaled = abs(z) ** 2 * cauchy_norm_sq(ellipse2, z, ellipse2_rule)
        expected = arc_length(ellipse2) / (4.0 * math.pi ** 2)
        assert abs(scaled - expected) < 1e-6 * expected

    def test_on_curve(self, ellipse2_rule):
        with pytest.raises(OnCurveError):
            cauchy_norm_sq(Ellipse(r=2.0), 2 + 0j, ellipse2_rule)

    def test_moebius_transformation(self, ellipse2, ellipse2_rule):
        """‖C¹(z, ·)‖² = |Φ′(z)|·‖C²(Φz, ·)‖²."""
        image = curve_pushforward(SHIFTED_INVERSION, ellipse2, 512)
        image_rule = quadrature(image)
        for z in (0j, 0.5 + 0.5j, 5 - 1j):
            wz = mobius_apply(SHIFTED_INVERSION, z)
            lhs = cauchy_norm_sq(ellipse2, z, ellipse2_rule)
            factor = abs(mobius_sqrt_deriv(SHIFTED_INVERSION, z)) ** 2
            assert abs(lhs - factor * cauchy_norm_sq(image, wz, image_rule)) < 1e-8 * lhs


class TestEllipseCauchyNorm0:
    def test_circle_limit(self):
        assert ellipse_cauchy_norm0(1.0) == 1.0 / TWO_PI
        assert abs(ellipse_cauchy_norm0(1.0 + 1e-6) - 1.0 / TWO_PI) < 1e-5

    def test_parameter_integral(self):
        f = lambda t: math.sqrt(4 * math.sin(t) ** 2 + math.cos(t) ** 2) / (4 * math.cos(t) ** 2 + math.sin(t) ** 2)
        integral = scipy.integrate.quad(f, 0, TWO_PI, epsabs=1e-14, epsrel=1e-14, limit=200)[0]
        assert abs(ellipse_cauchy_norm0(2.0) - integral / (4.0 * math.pi ** 2)) < 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            ellipse_cauchy_norm0(0.9)


class TestWedgeClosedForms:
    def test_sinc(self):
        assert sinc(0.0) == 1.0
        assert abs(sinc(math.pi / 2) - 2.0 / math.pi) < 1e-15
        assert abs(sinc(1e-5) - math.sin(1e-5) / 1e-5) < 1e-15

    def test_wedge_I_values(self):
        assert abs(wedge_I(1.0, math.pi) - 1.0) < 1e-15
        assert abs(wedge_I(2.0, math.pi / 2) - math.pi / 4) < 1e-15

    def test_wedge_I_quadrature(self):
        a = np.exp(0.3j)
        f = lambda x: 1.0 / abs(x - a) ** 2
        near = scipy.integrate.quad(f, 0, 10, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        far = scipy.integrate.quad(f, 10, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        assert abs(wedge_I(1.0, 0.3) - (near + far)) < 1e-10

    @pytest.mark.parametrize("r,alpha", [(1.0, 0.0), (1.0, TWO_PI), (0.0, 1.0), (-1.0, 1.0)])
    def test_wedge_I_domain(self, r, alpha):
        with pytest.raises(DomainError):
            wedge_I(r, alpha)

    def test_norm_on_symmetry_ray(self):
        theta = math.pi / 4
        expected = 2.0 / sinc(math.pi - theta) / (4.0 * math.pi ** 2)
        assert abs(wedge_cauchy_norm_sq(theta, 1.0, 0.0) - expected) < 1e-15

    def test_norm_scaling(self):
        for phi in (0.2, 2.0, -0.5):
            one = wedge_cauchy_norm_sq(math.pi / 4, 1.0, phi)
            assert abs(wedge_cauchy_norm_sq(math.pi / 4, 2.0, phi) - one / 2) < 1e-15

    def test_norm_in_exterior_wedge(self):
        theta = math.pi / 4
        expected = (wedge_I(1.0, math.pi - theta) + wedge_I(1.0, math.pi + theta)) / (4.0 * math.pi ** 2)
        assert abs(wedge_cauchy_norm_sq(theta, 1.0, math.pi) - expected) < 1e-15

    def test_boundary_ray(self):
        with pytest.raises(OnCurveError):
            wedge_cauchy_norm_sq(math.pi / 4, 1.0, math.pi / 4)

    def test_szego_on_symmetry_ray(self):
        theta = 0.6
        for r in (0.5, 1.0, 3.0):
            assert abs(wedge_szego_diag(theta, r, 0.0) - 1.0 / (8 * r * theta)) < 1e-15
            assert abs(szego_diag(WedgeBoundary(theta=theta), INT, complex(r, 0)) - 1.0 / (8 * r * theta)) < 1e-14


class TestEllipseMaps:
    def test_interior_map_at_origin(self):
        q = 1.0 / 9.0
        t2, t3, _ = theta_constants(q)
        value = ellipse_riemann_map(2.0, 0j)
        assert value.value == 0
        assert abs(value.derivative - t2 * t3 / math.sqrt(3.0)) < 1e-12

    def test_interior_map_near_boundary(self):
        for t in np.linspace(0, TWO_PI, 12, endpoint=False):
            z = 0.99 * complex(2 * math.cos(t), math.sin(t))
            assert abs(abs(ellipse_riemann_map(2.0, z).value) - 1.0) < 0.05

    def test_interior_map_continuous_along_rays(self):
        """No branch jumps from the centre to the boundary; Θ stays in the disc."""
        rhos = np.linspace(0.0, 0.999, 400)
        for k in range(8):
            t = TWO_PI * k / 8 + 0.1
            direction = complex(2 * math.cos(t), math.sin(t))
            values = [ellipse_riemann_map(2.0, rho * direction) for rho in rhos]
            step = abs(direction) * (rhos[1] - rhos[0])
            for a, b in zip(values, values[1:]):
                assert abs(a.value) < 1.0 and abs(b.value) < 1.0
                slope = max(abs(a.derivative), abs(b.derivative))
                assert abs(b.value - a.value) <= 1.5 * slope * step + 1e-12

    def test_interior_map_continuous_across_focal_cut(self):
        """The vertical segment x = 1.9 crosses the real axis beyond the focus √3."""
        ys = np.linspace(-0.3, 0.3, 241)
        values = [ellipse_riemann_map(2.0, complex(1.9, y)) for y in ys]
        step = ys[1] - ys[0]
        for a, b in zip(values, values[1:]):
            assert abs(b.value) < 1.0
            slope = max(abs(a.derivative), abs(b.derivative))
            assert abs(b.value - a.value) <= 1.5 * slope * step + 1e-12
        middle = values[120].value
        assert middle.real > 0 and abs(middle.imag) < 1e-12

    def test_interior_map_maps_into_disc(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            rho, t = math.sqrt(rng.uniform(0, 0.95)), rng.uniform(0, TWO_PI)
            z = rho * complex(2 * math.cos(t), math.sin(t))
            assert abs(ellipse_riemann_map(2.0, z).value) < 1.0

    def test_interior_map_domain(self):
        with pytest.raises(DomainError):
            ellipse_riemann_map(2.0, 3 + 0j)
        with pytest.raises(DomainError):
            ellipse_riemann_map(2.0, 2 + 0j)

    def test_exterior_map_values(self):
        assert abs(ellipse_exterior_map(2.0, 3 + 0j).value - 3.0 / (3.0 + math.sqrt(6.0))) < 1e-15
        assert abs(ellipse_exterior_map(2.0, 1e8 + 0j).value) < 1e-7

    def test_exterior_map_near_boundary(self):
        for t in np.linspace(0, TWO_PI, 12, endpoint=False):
            zeta = complex(2 * math.cos(t), math.sin(t))
            tangent = complex(-2 * math.sin(t), math.cos(t))
            normal = -1j * tangent / abs(tangent)
            assert abs(abs(ellipse_exterior_map(2.0, zeta + 0.01 * normal).value) - 1.0) < 0.05

    def test_exterior_map_domain(self):
        with pytest.raises(DomainError):
            ellipse_exterior_map(2.0, 0.5 + 0j)

    def test_wedge_map_symmetry_points(self):
        theta = math.pi / 5
        assert abs(wedge_riemann_map(theta, INT, 1 + 0j).value) < 1e-15
        assert abs(wedge_riemann_map(theta, EXT, -1 + 0j).value) < 1e-15

    @pytest.mark.parametrize("side,z", [(INT, 2 * np.exp(0.2j)), (EXT, 0.5 * np.exp(2.5j))])
    def test_wedge_map_reproduces_szego_diagonal(self, side, z):
        """|Ψ′(z)| / (2π(1 − |Ψ(z)|²)) is the closed-form S(z, z)."""
        theta = math.pi / 4
        psi = wedge_riemann_map(theta, side, z)
        assert abs(psi.value) < 1.0
        via_map = abs(psi.derivative) / (TWO_PI * (1.0 - abs(psi.value) ** 2))
        closed = wedge_szego_diag(theta, abs(z), float(np.angle(z)))
        assert abs(via_map - closed) < 1e-12 * closed

    def test_wedge_map_domain(self):
        theta = math.pi / 4
        with pytest.raises(SideMismatchError):
            wedge_riemann_map(theta, INT, -1 + 0j)
        with pytest.raises(OnCurveError):
            wedge_riemann_map(theta, INT, 0j)


class TestSzegoKernel:
    def test_disc_center(self):
        assert abs(szego_diag(Circle(), INT, 0j) - 1.0 / TWO_PI) < 1e-15

    def test_shifted_circle(self):
        c = Circle(center=1 + 1j, radius=2.0)
        assert abs(szego_diag(c, INT, 1 + 1j) - 1.0 / (TWO_PI * 2.0)) < 1e-15

    def test_circle_exterior(self):
        z = 2 + 1j
        expected = 1.0 / (TWO_PI * (abs(z) ** 2 - 1.0))
        assert abs(szego_diag(Circle(), EXT, z) - expected) < 1e-15

    def test_infinity(self):
        assert szego_diag(Ellipse(r=2.0), EXT, INFINITY) == 0.0
        with pytest.raises(SideMismatchError):
            szego_diag(Ellipse(r=2.0), INT, INFINITY)

    def test_ellipse_origin_theta_form(self):
        t2, t3, _ = theta_constants(1.0 / 9.0)
        expected = t2 * t3 / (TWO_PI * math.sqrt(3.0))
        assert abs(szego_diag(Ellipse(r=2.0), INT, 0j) - expected) < 1e-13

    def test_wrong_side_and_on_curve(self):
        with pytest.raises(SideMismatchError):
            szego_diag(Ellipse(r=2.0), INT, 3 + 0j)
        with pytest.raises(OnCurveError):
            szego_diag(Circle(), INT, 1 + 0j)

    def test_sampled_unsupported(self):
        with pytest.raises(UnsupportedCurveError):
            szego_diag(sample(Circle(), 32), INT, 0j)

    def test_containment_monotonicity(self):
        """The unit disc sits inside E_2, so its Szegő diagonal at 0 is larger."""
        assert szego_diag(Ellipse(r=2.0), INT, 0j) < szego_diag(Circle(), INT, 0j)

    def test_boundary_kernel_disc_center(self):
        ts = np.linspace(0, TWO_PI, 9)
        assert np.allclose(szego_boundary_kernel(Circle(), INT, 0j, ts), 1.0 / TWO_PI, atol=1e-15)
        assert abs(szego_boundary_kernel(Circle(), INT, 0j, 1.3) - 1.0 / TWO_PI) < 1e-15

    @pytest.mark.parametrize("side,z", [(INT, 0.3 + 0.1j), (EXT, 3 + 1j)])
    def test_diagonal_from_boundary_values(self, ellipse2, ellipse2_rule, side, z):
        """S(z, z) = ∫ |S(z, ζ)|² dσ(ζ)."""
        row = szego_row(ellipse2, side, z, ellipse2_rule)
        assert abs(np.sum(ellipse2_rule.weights * np.abs(row) ** 2) - szego_diag(ellipse2, side, z)) < 1e-8

    def test_reproduces_holomorphic_functions(self, ellipse2, ellipse2_rule):
        z = 0.5 - 0.3j
        row = szego_row(ellipse2, INT, z, ellipse2_rule)
        assert abs(np.sum(ellipse2_rule.weights * row * ellipse2_rule.points ** 2) - z ** 2) < 1e-8

    def test_exterior_reproduces_decaying_functions(self, ellipse2, ellipse2_rule):
        z = 3 + 0j
        row = szego_row(ellipse2, EXT, z, ellipse2_rule)
        assert abs(np.sum(ellipse2_rule.weights * row / ellipse2_rule.points) - 1.0 / z) < 1e-8

    def test_extremal_property_at_origin(self, ellipse2, ellipse2_rule, ellipse2_solver_512):
        """|f(0)|² ≤ S(0, 0)·‖f‖² on E_2, with equality for f = S(·, 0)/√S(0, 0)."""
        w, points = ellipse2_rule.weights, ellipse2_rule.points
        S00 = szego_diag(ellipse2, INT, 0j)
        rng = np.random.default_rng(7)
        for _ in range(20):
            coeffs = rng.normal(size=6) + 1j * rng.normal(size=6)
            values = np.polyval(coeffs[::-1], points)
            norm_sq = float(np.sum(w * np.abs(values) ** 2))
            assert abs(coeffs[0]) ** 2 <= S00 * norm_sq * (1 + 1e-10)

        extremal = np.conj(szego_row(ellipse2, INT, 0j, ellipse2_rule)) / math.sqrt(S00)
        assert abs(np.sum(w * np.abs(extremal) ** 2) - 1.0) < 1e-10
        at_zero = np.sum(w * szego_row(ellipse2, INT, 0j, ellipse2_rule) * extremal)
        assert abs(abs(at_zero) - math.sqrt(S00)) < 1e-10

        unit, diag, _ = ellipse2_solver_512.solve(0j)
        assert abs(diag - S00) < 1e-6
        assert np.allclose(np.abs(unit.values), np.sqrt(w) * np.abs(extremal), atol=1e-6)

    def test_l2_distance_identity(self, ellipse2, ellipse2_rule):
        distance = cauchy_szego_distance_sq(ellipse2, INT, 0j, ellipse2_rule)
        expected = szego_diag(ellipse2, INT, 0j) * (lambda_ellipse_0(2.0) ** 2 - 1.0)
        assert abs(distance - expected) < 1e-8

    def test_side_of(self, ellipse2):
        assert side_of(ellipse2, 0j) is INT
        assert side_of(ellipse2, 5j) is EXT
