"""Even/odd rows, auxiliary sigma functions, finite-stage extension, domains."""
import numpy as np
import pytest

from aglerlab.auxfun import (aux_function, builtin_domain, extend_aux_finite,
                             monomial_rows_at, psi_rows, sigma_at,
                             verify_defect_identity)
from aglerlab.kernels import (HermitianKernel, PointSample, defect_factor,
                              ones_kernel, szego_kernel)
from aglerlab.preorder import Preordering, standard_ample
from aglerlab.sampling import random_points, random_psd_kernel


class TestPsiRows:
    def test_bidisk_rows(self):
        a, b = 0.3 + 0.1j, -0.2 + 0.4j
        s = PointSample(np.array([[a, b]]))
        rows = psi_rows(s, (1, 1))
        # predecessors in ascending tuple lex: even (0,0),(1,1); odd (0,1),(1,0)
        assert np.allclose(rows.plus[0], [1, a * b])
        assert np.allclose(rows.minus[0], [b, a])

    def test_weight_one_scalars(self):
        a = 0.5 - 0.2j
        s = PointSample(np.array([[a, 0.1]]))
        rows = psi_rows(s, (1, 0))
        assert np.allclose(rows.plus[0], [1])
        assert np.allclose(rows.minus[0], [a])

    def test_defect_identity_d3(self):
        s = PointSample(np.array([[0.3, 0.4j, -0.2]], dtype=complex))
        rows = psi_rows(s, (1, 1, 1))
        assert rows.defect_identity_residual() < 1e-14

    def test_defect_identity_random_pairs(self):
        rng = np.random.default_rng(0)
        for lam in [(1, 1), (1, 0, 1), (1, 1, 1)]:
            s = random_points(rng, 4, len(lam))
            rows = psi_rows(s, lam)
            assert rows.defect_identity_residual() < 1e-13

    def test_first_plus_entry_is_one(self):
        rng = np.random.default_rng(1)
        s = random_points(rng, 3, 3)
        rows = psi_rows(s, (1, 1, 1))
        assert np.allclose(rows.plus[:, 0], 1.0)
        assert (np.linalg.norm(rows.plus, axis=1) >= 1).all()

    def test_rejects_multiplicity(self):
        s = random_points(np.random.default_rng(2), 2, 1)
        with pytest.raises(ValueError):
            psi_rows(s, (2,))


class TestAuxFunction:
    def test_weight_one_is_the_test_function(self):
        a = 0.4 + 0.3j
        s = PointSample(np.array([[a, 0.2]], dtype=complex))
        aux = aux_function(s, (1, 0))
        assert aux.sigmas[0].shape == (1, 1)
        assert aux.sigmas[0][0, 0] == pytest.approx(a)

    def test_origin_gives_zero(self):
        s = PointSample(np.array([[0.0, 0.0], [0.1, 0.2]], dtype=complex))
        aux = aux_function(s, (1, 1))
        assert np.allclose(aux.sigmas[0], 0)

    def test_closed_form_at_half_half(self):
        # oracle: sigma = psi+^* psi- / |psi+|^2 with psi+ = (1, 1/4),
        # psi- = (1/2, 1/2); norm = |psi-| / |psi+|
        s = PointSample(np.array([[0.5, 0.5], [0.1, 0.1]], dtype=complex))
        aux = aux_function(s, (1, 1))
        expected = np.outer([1, 0.25], [0.5, 0.5]) / (1 + 1 / 16)
        assert np.allclose(aux.sigmas[0], expected)
        norm = np.linalg.norm(aux.sigmas[0], 2)
        assert norm == pytest.approx(np.sqrt(0.5) / np.sqrt(1 + 1 / 16))
        assert norm < 1

    def test_interpolation_property(self):
        rng = np.random.default_rng(3)
        for lam in [(1, 1), (1, 1, 1)]:
            s = random_points(rng, 4, len(lam))
            rows = psi_rows(s, lam)
            aux = aux_function(s, lam)
            for x in range(4):
                assert np.abs(rows.plus[x] @ aux.sigmas[x] - rows.minus[x]).max() < 1e-14

    def test_strict_contractions(self):
        rng = np.random.default_rng(4)
        s = random_points(rng, 5, 2, rmax=0.95)
        aux = aux_function(s, (1, 1))
        assert (aux.norms() < 1).all()


class TestDefectIdentity:
    def test_weight_one_exact(self):
        rng = np.random.default_rng(5)
        s = random_points(rng, 4, 2)
        K = random_psd_kernel(rng, s)
        assert verify_defect_identity(s, (1, 0), K) < 1e-14

    def test_szego_kernel_bidisk(self):
        rng = np.random.default_rng(6)
        s = random_points(rng, 4, 2)
        assert verify_defect_identity(s, (1, 1), szego_kernel(s, (1, 1))) < 1e-10

    def test_ones_kernel_d3(self):
        rng = np.random.default_rng(7)
        s = random_points(rng, 3, 3)
        assert verify_defect_identity(s, (1, 1, 1), ones_kernel(s)) < 1e-10

    def test_random_psd_suite(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            d = int(rng.integers(1, 4))
            lam = tuple(rng.integers(0, 2) for _ in range(d))
            if sum(lam) == 0:
                lam = (1,) * d
            s = random_points(rng, int(rng.integers(2, 6)), d)
            K = random_psd_kernel(rng, s)
            assert verify_defect_identity(s, lam, K) < 1e-9


class TestFiniteStageExtension:
    def test_single_point_reduces_to_raw(self):
        rng = np.random.default_rng(9)
        s = random_points(rng, 1, 2)
        ext = extend_aux_finite(s, (1, 1), standard_ample(2))
        raw = aux_function(s, (1, 1))
        assert np.abs(ext.stage_operator - raw.sigmas[0]).max() < 1e-12
        assert np.abs(ext.aux.sigmas[0] - raw.sigmas[0]).max() < 1e-12

    def test_three_point_bidisk(self):
        rng = np.random.default_rng(10)
        s = random_points(rng, 3, 2)
        ext = extend_aux_finite(s, (1, 1), standard_ample(2))
        assert ext.completion_norm <= 1 + 1e-9
        assert ext.identity_residual < 1e-8
        assert ext.defect_min_eig >= -1e-8

    def test_sub_lambda_inside_larger_ample(self):
        rng = np.random.default_rng(11)
        s = random_points(rng, 3, 3)
        ext = extend_aux_finite(s, (1, 1, 0), standard_ample(3))
        assert ext.completion_norm <= 1 + 1e-9
        assert ext.identity_residual < 1e-8
        assert ext.defect_min_eig >= -1e-8

    def test_compressions_are_contractions(self):
        rng = np.random.default_rng(12)
        s = random_points(rng, 4, 2)
        ext = extend_aux_finite(s, (1, 1), standard_ample(2))
        assert (ext.aux.norms() <= 1 + 1e-10).all()
        assert ext.aux.mode == "extended"

    def test_needs_ample(self):
        rng = np.random.default_rng(13)
        s = random_points(rng, 2, 2)
        with pytest.raises(ValueError, match="ample"):
            extend_aux_finite(s, (1, 0), Preordering([(1, 0), (0, 1)]))


class TestBuiltinDomains:
    def test_annulus(self):
        embed = builtin_domain("annulus", r=0.5)
        s = embed([0.7])
        assert s.points[0, 0] == pytest.approx(0.7)
        assert s.points[0, 1] == pytest.approx(0.5 / 0.7)
        with pytest.raises(ValueError):
            embed([0.4])  # inside the hole
        with pytest.raises(ValueError):
            embed([1.1])

    def test_constrained_disk(self):
        embed = builtin_domain("constrained-disk")
        s = embed([0.5])
        assert s.points[0, 0] == pytest.approx(0.25)
        assert s.points[0, 1] == pytest.approx(0.125)

    def test_constrained_disk_relation(self):
        rng = np.random.default_rng(14)
        z = 0.8 * rng.uniform(0.1, 1, 6) * np.exp(1j * rng.uniform(0, 2 * np.pi, 6))
        s = builtin_domain("constrained-disk")(z)
        psi1, psi2 = s.points[:, 0], s.points[:, 1]
        assert np.abs(psi1 ** 3 - psi2 ** 2).max() < 1e-14

    def test_polydisk_identity(self):
        embed = builtin_domain("polydisk", d=3)
        pts = np.array([[0.1, 0.2, 0.3]], dtype=complex)
        assert np.allclose(embed(pts).points, pts)

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown domain"):
            builtin_domain("lens")


def test_sigma_at_matches_sampled():
    rng = np.random.default_rng(15)
    s = random_points(rng, 3, 2)
    aux = aux_function(s, (1, 1))
    for x in range(3):
        assert np.allclose(sigma_at(s.points[x], (1, 1)), aux.sigmas[x])


def test_extension_weight_one_recovers_test_function():
    rng = np.random.default_rng(16)
    s = random_points(rng, 3, 2)
    ext = extend_aux_finite(s, (1, 0), standard_ample(2))
    assert ext.completion_norm <= 1 + 1e-9
    # n = 1: the auxiliary function is the first test function itself and
    # the contractive extension cannot move it on the sample
    for x in range(3):
        assert ext.aux.sigmas[x].shape == (1, 1)
    assert ext.identity_residual < 1e-8
