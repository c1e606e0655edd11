"""
Tests for the Nyström Cauchy matrix, the Kerzman-Stein operator, the KST
Szegő solve, Berezin transforms, spectra and the matrix dump.
"""

import math

import numpy as np
import pytest

from cauchy_szego.boundary_operator import (
    BoundaryOperatorMatrix,
    KSTSolver,
    berezin_A,
    berezin_A2,
    cauchy_row,
    discretize_cauchy,
    dump_matrix,
    kerzman_stein,
    kst_lambda,
    load_matrix,
    operator_norm,
    spectrum_A,
    szego_via_kst,
)
from cauchy_szego.errors import (
    ConditioningError,
    DomainError,
    FrameError,
    NonConvergenceError,
    SideMismatchError,
    UnboundedCurveError,
    UnsupportedCurveError,
)
from cauchy_szego.geometry import Circle, Ellipse, MoebiusMap, WedgeBoundary, curve_pushforward, quadrature
from cauchy_szego.kernels import DomainSide, szego_diag, szego_row
from cauchy_szego.lambda_function import fks_upper_bound, lambda_ellipse_0, lambda_ellipse_inf
from cauchy_szego.specfun import theta_constants

INT = DomainSide.INTERIOR
EXT = DomainSide.EXTERIOR


def frame_vector(Cmat, values):
    """Node values scaled into the symmetrised frame."""
    return np.sqrt(Cmat.weights) * values


class TestDiscretizeCauchy:
    def test_circle_reproduces_polynomials(self):
        Cmat = discretize_cauchy(Circle(), INT, 64)
        for k in range(6):
            v = frame_vector(Cmat, Cmat.points ** k)
            assert np.max(np.abs(Cmat.entries @ v - v)) < 1e-10

    def test_circle_annihilates_exterior_functions(self):
        Cmat = discretize_cauchy(Circle(), INT, 64)
        v = frame_vector(Cmat, 1.0 / Cmat.points)
        assert np.max(np.abs(Cmat.entries @ v)) < 1e-10

    def test_ellipse_projections(self, ellipse2_ops_256):
        """C₊ fixes ζ² and kills 1/ζ; C₋ = I − C₊ does the opposite."""
        Cmat, _ = ellipse2_ops_256
        inner = frame_vector(Cmat, Cmat.points ** 2)
        outer = frame_vector(Cmat, 1.0 / Cmat.points)
        assert np.max(np.abs(Cmat.entries @ inner - inner)) < 1e-8
        assert np.max(np.abs(Cmat.entries @ outer)) < 1e-8

        Cext = discretize_cauchy(Ellipse(r=2.0), EXT, 256)
        assert np.max(np.abs(Cext.entries @ outer - outer)) < 1e-8
        assert np.max(np.abs(Cext.entries @ inner)) < 1e-8

    def test_clockwise_samples_are_reversed(self):
        image = curve_pushforward(MoebiusMap(a=0, b=1, c=1, d=0), Ellipse(r=2.0), 128)
        Cmat = discretize_cauchy(image, INT)
        assert Cmat.n == 128
        v = frame_vector(Cmat, np.ones(128))
        assert np.max(np.abs(Cmat.entries @ v - v)) < 1e-8

    def test_node_count_limits(self, monkeypatch):
        with pytest.raises(DomainError):
            discretize_cauchy(Circle(), INT, 30)
        with pytest.raises(UnsupportedCurveError):
            discretize_cauchy(Circle(), INT, 33)
        monkeypatch.setenv("CSZ_MAX_NODES", "64")
        with pytest.raises(DomainError):
            discretize_cauchy(Circle(), INT, 128)

    def test_default_node_count(self, monkeypatch):
        monkeypatch.setenv("CSZ_NODES", "48")
        assert discretize_cauchy(Circle(), INT).n == 48

    def test_wedge_rejected(self):
        with pytest.raises(UnboundedCurveError):
            discretize_cauchy(WedgeBoundary(theta=0.5), INT, 64)


class TestKerzmanStein:
    def test_vanishes_on_circle(self, circle_ops):
        _, Amat = circle_ops
        assert np.max(np.abs(Amat.entries)) < 1e-10

    def test_skew_hermitian(self, ellipse2_ops_256):
        _, Amat = ellipse2_ops_256
        assert np.max(np.abs(Amat.entries + Amat.entries.conj().T)) < 1e-12

    def test_requires_symmetrised_frame(self, circle_ops):
        Cmat, _ = circle_ops
        raw = BoundaryOperatorMatrix(
            entries=Cmat.entries, weights=Cmat.weights, symmetrized=False,
            side=INT, points=Cmat.points, tangents=Cmat.tangents,
        )
        with pytest.raises(FrameError):
            kerzman_stein(raw)
        with pytest.raises(FrameError):
            operator_norm(raw)

    def test_small_eccentricity_norm(self):
        r = 1.1
        Amat = kerzman_stein(discretize_cauchy(Ellipse(r=r), INT, 256))
        expected = (r - 1.0) / (2.0 * (r + 1.0))
        assert abs(np.linalg.norm(Amat.entries, 2) - expected) < 0.05 * expected


class TestOperatorNorm:
    def test_circle(self, circle_ops):
        Cmat, _ = circle_ops
        assert abs(operator_norm(Cmat) - 1.0) < 1e-6

    def test_matches_dense_svd(self, ellipse2_ops_256):
        Cmat, _ = ellipse2_ops_256
        assert abs(operator_norm(Cmat) - np.linalg.norm(Cmat.entries, 2)) < 1e-8

    def test_sandwich(self, ellipse2_ops_512):
        Cmat, _ = ellipse2_ops_512
        norm = operator_norm(Cmat)
        assert max(lambda_ellipse_0(2.0), lambda_ellipse_inf(2.0)) <= norm + 1e-6
        assert norm <= fks_upper_bound(2.0) + 1e-6

    @pytest.mark.slow
    def test_interior_equals_exterior(self, ellipse2_ops_512):
        Cmat, _ = ellipse2_ops_512
        outer = discretize_cauchy(Ellipse(r=2.0), EXT, 512)
        assert abs(operator_norm(Cmat) - operator_norm(outer)) < 1e-6

    def test_iteration_cap(self, ellipse2_ops_256):
        Cmat, _ = ellipse2_ops_256
        with pytest.raises(NonConvergenceError) as info:
            operator_norm(Cmat, x0=np.ones(Cmat.n), max_iter=1)
        assert info.value.iterations == 1
        assert info.value.estimate > 0


class TestSpectrum:
    def test_circle(self, circle_ops):
        _, Amat = circle_ops
        assert all(v < 1e-10 for v in spectrum_A(Amat))

    def test_pairs_and_norm_identity(self):
        Cmat = discretize_cauchy(Ellipse(r=1.1), INT, 256)
        lam = spectrum_A(kerzman_stein(Cmat), 4)
        assert lam == sorted(lam, reverse=True)
        assert abs(lam[0] - lam[1]) < 1e-8
        assert abs(lam[0] - math.sqrt(operator_norm(Cmat) ** 2 - 1.0)) < 1e-6

    @pytest.mark.parametrize("r", [1.05, 1.1, 1.2])
    def test_small_eccentricity_law(self, r):
        lam = spectrum_A(kerzman_stein(discretize_cauchy(Ellipse(r=r), INT, 256)), 1)
        assert 0.9 <= lam[0] * 2.0 * (r + 1.0) / (r - 1.0) <= 1.1

    def test_rejects_non_skew(self, ellipse2_ops_256):
        Cmat, _ = ellipse2_ops_256
        with pytest.raises(FrameError):
            spectrum_A(Cmat)


class TestKSTSolve:
    def test_circle_center(self, circle_ops):
        _, S00 = szego_via_kst(*circle_ops, 0j)
        assert abs(S00 - 1.0 / (2.0 * math.pi)) < 1e-8

    def test_ellipse_origin_theta_form(self, ellipse2_ops_256):
        t2, t3, _ = theta_constants(1.0 / 9.0)
        _, S00 = szego_via_kst(*ellipse2_ops_256, 0j)
        assert abs(S00 - t2 * t3 / (2.0 * math.pi * math.sqrt(3.0))) < 1e-6

    def test_ellipse_riemann_map_oracle(self, ellipse2_solver_512):
        z = 0.5 + 0j
        _, diag, _ = ellipse2_solver_512.solve(z)
        assert abs(diag - szego_diag(Ellipse(r=2.0), INT, z)) < 1e-6

    def test_unit_vector(self, ellipse2_solver_512):
        s_z, diag, _ = ellipse2_solver_512.solve(0.3 + 0.2j)
        assert abs(s_z.norm - 1.0) < 1e-12
        assert s_z.szego_diag == diag

    def test_lambda_matches_closed_form(self, ellipse2_solver_512, ellipse2_ops_512):
        assert abs(ellipse2_solver_512.lambda_at(0j) - lambda_ellipse_0(2.0)) < 1e-8
        assert abs(kst_lambda(*ellipse2_ops_512, 0j) - lambda_ellipse_0(2.0)) < 1e-8

    def test_exterior_side(self):
        Cmat = discretize_cauchy(Ellipse(r=2.0), EXT, 256)
        _, diag = szego_via_kst(Cmat, kerzman_stein(Cmat), 3 + 1j)
        assert abs(diag - szego_diag(Ellipse(r=2.0), EXT, 3 + 1j)) < 1e-6

    def test_wrong_side(self, ellipse2_solver_512):
        with pytest.raises(SideMismatchError):
            ellipse2_solver_512.solve(5 + 0j)

    def test_conditioning_limit(self, ellipse2_ops_256):
        Cmat, Amat = ellipse2_ops_256
        gaps = np.ones(Amat.n)
        gaps[0] = 1e-9
        bad = Amat.with_entries(np.eye(Amat.n) - np.diag(gaps))
        with pytest.raises(ConditioningError) as info:
            KSTSolver(Cmat, bad)
        assert info.value.condition > 1e6

    def test_kernel_adjoint_relation(self, ellipse2_ops_512):
        """C† applied to the Szegő column returns the conjugate Cauchy row; C fixes it."""
        Cmat, _ = ellipse2_ops_512
        z = 0.3 + 0j
        rule = quadrature(Ellipse(r=2.0), 512)
        s = frame_vector(Cmat, np.conj(szego_row(Ellipse(r=2.0), INT, z, rule)))
        assert np.max(np.abs(Cmat.entries.conj().T @ s - np.conj(cauchy_row(Cmat, z)))) < 1e-5
        assert np.max(np.abs(Cmat.entries @ s - s)) < 1e-5


class TestBerezin:
    def test_circle(self, circle_ops):
        Cmat, Amat = circle_ops
        s_z, _ = szego_via_kst(Cmat, Amat, 0.4 - 0.2j)
        assert abs(berezin_A2(Amat, s_z)) < 1e-12

    def test_second_order_identity(self, ellipse2_ops_512, ellipse2_solver_512):
        _, Amat = ellipse2_ops_512
        s_z, _, _ = ellipse2_solver_512.solve(0j)
        value = berezin_A2(Amat, s_z)
        assert value <= 0.0
        assert abs((1.0 - value) - lambda_ellipse_0(2.0) ** 2) < 1e-5

    def test_first_order_vanishes(self, ellipse2_ops_512, ellipse2_solver_512):
        _, Amat = ellipse2_ops_512
        for z in (0j, 0.5 + 0j, 1 + 0.3j):
            s_z, _, _ = ellipse2_solver_512.solve(z)
            assert abs(berezin_A(Amat, s_z)) < 1e-10


@pytest.mark.slow
class TestRefinement:
    def test_scalars_stable_under_refinement(self):
        scalars = []
        for n in (512, 1024):
            Cmat = discretize_cauchy(Ellipse(r=2.0), INT, n)
            Amat = kerzman_stein(Cmat)
            scalars.append((operator_norm(Cmat), spectrum_A(Amat, 1)[0], szego_via_kst(Cmat, Amat, 0j)[1]))
        for coarse, fine in zip(*scalars):
            assert abs(coarse - fine) < 1e-6


class TestDump:
    def test_round_trip(self, tmp_path, circle_ops):
        _, Amat = circle_ops
        path = dump_matrix(Amat, tmp_path / "a.kst")
        raw = path.read_bytes()
        assert raw.startswith(b"KSTMAT 128 interior\n")
        assert len(raw) == len(b"KSTMAT 128 interior\n") + 128 * 128 * 16
        entries, side = load_matrix(path)
        assert side is INT
        assert np.array_equal(entries, Amat.entries)

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "other.bin"
        path.write_bytes(b"NOTMAT 2 interior\n" + bytes(64))
        with pytest.raises(DomainError):
            load_matrix(path)

    def test_unwritable(self, tmp_path, circle_ops):
        _, Amat = circle_ops
        with pytest.raises(OSError):
            dump_matrix(Amat, tmp_path / "missing" / "a.kst")
