"""Unit tests for circulant matrices and rotations."""

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from cyclic_formation.core.linalg import (
    BlockCirculant,
    CirculantSpec,
    Rotation3,
    ShiftCirculant,
    block_circulant_eigenvalues,
    build_shift_circulant,
    circulant,
    circulant_eigenpairs,
    circulant_eigenvalues,
    is_rotation,
    kron,
    plane_rotation,
    rotation_about_axis,
    rotation_about_z,
    rotation_axis,
    similarity_rotate,
)
from cyclic_formation.exceptions import ParameterError


def assert_same_spectrum(actual, expected, atol=1e-8):
    """Match two eigenvalue multisets up to ordering."""
    a = np.asarray(actual, dtype=complex).ravel()
    b = np.asarray(expected, dtype=complex).ravel()
    assert a.shape == b.shape
    rows, cols = linear_sum_assignment(np.abs(a[:, None] - b[None, :]))
    np.testing.assert_allclose(a[rows], b[cols], atol=atol)


class TestCirculant:
    """Tests for circulant construction."""

    def test_rows_shift_right(self):
        """Each row should be the previous row shifted right by one."""
        c = circulant([1.0, 2.0, 3.0, 4.0])

        for i in range(1, 4):
            np.testing.assert_array_equal(c[i], np.roll(c[i - 1], 1))
        np.testing.assert_array_equal(c[0], [1.0, 2.0, 3.0, 4.0])

    def test_spec_matrix_matches_builder(self):
        """CirculantSpec.matrix should match circulant()."""
        spec = CirculantSpec([0.5, -1.0, 2.0])

        np.testing.assert_array_equal(spec.matrix(), circulant([0.5, -1.0, 2.0]))
        assert spec.n == 3

    def test_empty_row_rejected(self):
        """An empty first row should raise ParameterError."""
        with pytest.raises(ParameterError):
            CirculantSpec([])

    def test_product_is_circulant(self):
        """Products of circulants should be regenerated by their first row."""
        rng = np.random.default_rng(0)
        a = circulant(rng.standard_normal(5))
        b = circulant(rng.standard_normal(5))

        product = a @ b

        np.testing.assert_allclose(circulant(product[0]), product, atol=1e-12)

    def test_sum_is_circulant(self):
        """Sums of circulants should be regenerated by their first row."""
        rng = np.random.default_rng(1)
        total = circulant(rng.standard_normal(6)) + circulant(rng.standard_normal(6))

        np.testing.assert_allclose(circulant(total[0]), total)


class TestShiftCirculant:
    """Tests for build_shift_circulant."""

    def test_m_zero_is_zero_matrix(self):
        """L_0 should be the zero matrix."""
        np.testing.assert_array_equal(build_shift_circulant(3, 0), np.zeros((3, 3)))

    def test_n3_m1(self):
        """L_1 for n=3 should be circ[1, -1, 0]."""
        np.testing.assert_array_equal(
            build_shift_circulant(3, 1), circulant([1.0, -1.0, 0.0])
        )

    def test_rows_sum_to_zero(self):
        """Every row should hold one +1 and one -1 and sum to zero."""
        lm = build_shift_circulant(5, 2)

        np.testing.assert_array_equal(lm.sum(axis=1), np.zeros(5))
        assert np.all((lm == 1.0).sum(axis=1) == 1)
        assert np.all((lm == -1.0).sum(axis=1) == 1)

    def test_action_is_forward_difference(self):
        """(L_m x)_i should equal x_i - x_{i+m}."""
        x = np.arange(7, dtype=float) ** 2

        result = build_shift_circulant(7, 3) @ x

        np.testing.assert_allclose(result, x - np.roll(x, -3))

    @pytest.mark.parametrize("n,m", [(2, 1), (5, 5), (5, -1)])
    def test_out_of_range_rejected(self, n, m):
        """Invalid n or m should raise ParameterError."""
        with pytest.raises(ParameterError):
            build_shift_circulant(n, m)

    def test_dataclass_spec_matches_matrix(self):
        """ShiftCirculant.spec should regenerate L_m."""
        shift = ShiftCirculant(6, 2)

        np.testing.assert_array_equal(shift.spec().matrix(), shift.matrix())


class TestCirculantEigenvalues:
    """Tests for the closed-form circulant spectrum."""

    def test_l1_n4(self):
        """L_1 for n=4 should have eigenvalues 0, 1-j, 2, 1+j in index order."""
        values = circulant_eigenvalues(CirculantSpec([1.0, -1.0, 0.0, 0.0]))

        np.testing.assert_allclose(values, [0.0, 1 - 1j, 2.0, 1 + 1j], atol=1e-12)

    def test_scaled_identity(self):
        """circ[c, 0, ..., 0] should have every eigenvalue equal to c."""
        values = circulant_eigenvalues([2.5, 0.0, 0.0, 0.0, 0.0])

        np.testing.assert_allclose(values, np.full(5, 2.5))

    def test_l1_n6_formula(self):
        """L_1 for n=6 should give 1 - exp(2 pi j k / 6)."""
        k = np.arange(6)

        values = circulant_eigenvalues([1.0, -1.0, 0.0, 0.0, 0.0, 0.0])

        np.testing.assert_allclose(values, 1 - np.exp(2j * np.pi * k / 6), atol=1e-12)

    @pytest.mark.parametrize("n", [1, 3, 4, 7, 10])
    def test_matches_numeric_eigendecomposition(self, n):
        """Closed form should match a dense eigendecomposition."""
        row = np.random.default_rng(n).standard_normal(n)

        closed = circulant_eigenvalues(row)
        numeric = np.linalg.eigvals(circulant(row))

        assert_same_spectrum(closed, numeric)

    def test_eigenpairs_are_consistent(self):
        """Each returned eigenvector should pair with its eigenvalue."""
        row = np.array([3.0, -1.0, 0.5, 0.0, 2.0])
        c = circulant(row)

        values, vectors = circulant_eigenpairs(row)

        for k in range(5):
            np.testing.assert_allclose(
                c @ vectors[:, k], values[k] * vectors[:, k], atol=1e-12
            )
        np.testing.assert_allclose(np.linalg.norm(vectors, axis=0), np.ones(5))


class TestKron:
    """Tests for Kronecker products."""

    def test_identity(self):
        """I_2 (x) I_3 should be I_6."""
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_mixed_product(self):
        """(A (x) B)(C (x) D) should equal AC (x) BD."""
        rng = np.random.default_rng(2)
        a, b, c, d = (rng.standard_normal((2, 2)) for _ in range(4))

        np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d))

    def test_eigenvalues_are_products(self):
        """eig(A (x) B) should be the pairwise products of eig(A), eig(B)."""
        rng = np.random.default_rng(3)
        a = rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3))

        expected = np.outer(np.linalg.eigvals(a), np.linalg.eigvals(b)).ravel()
        numeric = np.linalg.eigvals(kron(a, b))

        assert_same_spectrum(numeric, expected, atol=1e-7)


class TestBlockCirculant:
    """Tests for L (x) R_beta matrices."""

    def test_eigenvalues_match_numeric(self):
        """Block eigenvalues should be products of the factor eigenvalues."""
        spec = CirculantSpec([2.0, -1.0, 0.0, 0.0, -1.0])
        block = BlockCirculant(spec, Rotation3([0.0, 0.0, 1.0], 0.4))

        numeric = np.linalg.eigvals(block.matrix())

        assert_same_spectrum(block.eigenvalues(), numeric)

    def test_shape_of_eigenvalue_table(self):
        """block_circulant_eigenvalues should return one column per k."""
        table = block_circulant_eigenvalues([1.0, -1.0, 0.0, 0.0], 0.3)

        assert table.shape == (4, 3)
        np.testing.assert_allclose(table[:, 1], circulant_eigenvalues([1, -1, 0, 0]))

    def test_rejects_axis_other_than_z(self):
        """A block part not about e_z should raise ParameterError."""
        with pytest.raises(ParameterError):
            BlockCirculant(CirculantSpec([1.0, 0.0, 0.0]), Rotation3([1, 0, 0], 0.1))


class TestRotations:
    """Tests for rotation helpers."""

    def test_zero_angle_is_identity(self):
        """rotation_about_z(0) should be I_3."""
        np.testing.assert_allclose(rotation_about_z(0.0), np.eye(3))

    def test_half_turn(self):
        """rotation_about_z(pi) should be diag(-1, -1, 1)."""
        np.testing.assert_allclose(
            rotation_about_z(np.pi), np.diag([-1.0, -1.0, 1.0]), atol=1e-15
        )

    def test_group_property(self):
        """R(a) R(b) should equal R(a + b)."""
        a, b = 0.7, -2.1

        np.testing.assert_allclose(
            rotation_about_z(a) @ rotation_about_z(b), rotation_about_z(a + b)
        )

    def test_counterclockwise(self):
        """A quarter turn should map e_x to e_y."""
        np.testing.assert_allclose(
            rotation_about_z(np.pi / 2) @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15
        )

    def test_axis_rotation_matches_z(self):
        """rotation_about_axis(e_z, a) should equal rotation_about_z(a)."""
        np.testing.assert_allclose(
            rotation_about_axis([0, 0, 2.0], 1.1), rotation_about_z(1.1), atol=1e-12
        )

    def test_rotation3_normalises_axis(self):
        """Rotation3 should store a unit axis."""
        rot = Rotation3([0.0, 3.0, 4.0], 0.5)

        assert np.isclose(np.linalg.norm(rot.axis), 1.0)
        assert is_rotation(rot.matrix())

    def test_rotation3_zero_axis_rejected(self):
        """A zero axis should raise ParameterError."""
        with pytest.raises(ParameterError):
            Rotation3([0.0, 0.0, 0.0], 1.0)


class TestSimilarityRotate:
    """Tests for similarity_rotate."""

    def test_identity_leaves_rotation(self):
        """With R_eta = I the rotation should be unchanged."""
        r = rotation_about_z(0.8)

        np.testing.assert_allclose(similarity_rotate(np.eye(3), r), r)

    def test_trace_preserved(self):
        """The trace should be preserved for random inputs."""
        rng = np.random.default_rng(4)
        r_eta = rotation_about_axis(rng.standard_normal(3), 1.3)
        r = rotation_about_axis(rng.standard_normal(3), 0.6)

        assert np.isclose(np.trace(similarity_rotate(r_eta, r)), np.trace(r))

    def test_axis_is_rotated(self):
        """The new axis should be R_eta^T times the old axis."""
        r_eta = rotation_about_axis([1.0, 1.0, 0.0], 0.9)
        r = rotation_about_z(0.5)

        axis = rotation_axis(similarity_rotate(r_eta, r))

        np.testing.assert_allclose(axis, r_eta.T @ [0.0, 0.0, 1.0], atol=1e-10)

    def test_rotation_axis_of_identity(self):
        """rotation_axis(I) should fall back to e_z."""
        np.testing.assert_array_equal(rotation_axis(np.eye(3)), [0.0, 0.0, 1.0])


class TestPlaneRotation:
    """Tests for plane_rotation."""

    @pytest.mark.parametrize(
        "normal",
        [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0.3, -0.2, 0.9), (0, 0.669, 0.743)],
    )
    def test_maps_normal_to_ez(self, normal):
        """R_eta^T e_z should equal the unit normal."""
        unit = np.asarray(normal, dtype=float) / np.linalg.norm(normal)

        r_eta = plane_rotation(normal)

        assert is_rotation(r_eta)
        np.testing.assert_allclose(r_eta.T @ [0.0, 0.0, 1.0], unit, atol=1e-12)

    def test_ez_gives_identity(self):
        """The horizontal plane should give R_eta = I."""
        np.testing.assert_array_equal(plane_rotation([0, 0, 1]), np.eye(3))

    def test_zero_normal_rejected(self):
        """A zero normal should raise ParameterError."""
        with pytest.raises(ParameterError):
            plane_rotation([0.0, 0.0, 0.0])
