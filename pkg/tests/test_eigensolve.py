from types import SimpleNamespace

import numpy as np
import pytest

from diracgap.assembly import append_vectors, assemble
from diracgap.basis import (
    BasisSet,
    dual_kinetic_balance_basis,
    kinetic_balance_basis,
    mixed_trap_vector,
    upper_lower_basis,
)
from diracgap.eigensolve import gap_eigenvalues, solve_pencil
from diracgap.errors import DegenerateBasisError, SolverAccuracyError


def _pencil(h, s):
    return SimpleNamespace(h=np.asarray(h, dtype=float), s=np.asarray(s, dtype=float))


class TestSolvePencil:
    def test_diagonal(self):
        result = solve_pencil(_pencil(np.diag([3.0, -1.0, 0.5]), np.eye(3)))
        np.testing.assert_allclose(result.eigenvalues, [-1.0, 0.5, 3.0])
        assert result.n_discarded == 0

    def test_generalized(self, rng):
        a = rng.normal(size=(5, 5))
        s = a @ a.T + 5 * np.eye(5)
        h = rng.normal(size=(5, 5))
        h = h + h.T
        result = solve_pencil(_pencil(h, s))
        x = result.eigenvectors
        np.testing.assert_allclose(x.T @ s @ x, np.eye(5), atol=1e-10)
        np.testing.assert_allclose(h @ x, s @ x * result.eigenvalues, atol=1e-9)
        assert np.all(np.diff(result.eigenvalues) >= 0)

    def test_drops_dependent_direction(self):
        s = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        h = np.array([[2.0, 2.0, 0.0], [2.0, 2.0, 0.0], [0.0, 0.0, -3.0]])
        result = solve_pencil(_pencil(h, s))
        assert result.n_discarded == 1
        np.testing.assert_allclose(result.eigenvalues, [-3.0, 2.0], atol=1e-12)

    def test_sign_convention(self, rng):
        a = rng.normal(size=(4, 4))
        result = solve_pencil(_pencil(a + a.T, np.eye(4)))
        for k in range(4):
            col = result.eigenvectors[:, k]
            first = col[np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]]
            assert first > 0

    def test_empty(self):
        with pytest.raises(DegenerateBasisError):
            solve_pencil(_pencil(np.zeros((0, 0)), np.zeros((0, 0))))

    def test_shape_mismatch(self):
        with pytest.raises(DegenerateBasisError):
            solve_pencil(_pencil(np.eye(2), np.eye(3)))

    def test_zero_overlap(self):
        with pytest.raises(DegenerateBasisError):
            solve_pencil(_pencil(np.eye(2), np.zeros((2, 2))))

    def test_residual_tolerance_enforced(self):
        with pytest.raises(SolverAccuracyError):
            solve_pencil(_pencil(np.diag([1.0, 2.0]), np.eye(2)), residual_tolerance=-1.0)

    def test_residuals_reported(self, small_exps, params, coulomb):
        pencil = assemble(kinetic_balance_basis(small_exps, params), coulomb)
        result = solve_pencil(pencil)
        assert result.residual_max <= 1e-8 * pencil.h_max
        assert len(result) == 2 * len(small_exps)
        assert result.s_condition >= 1.0


class TestGapEigenvalues:
    def test_open_gap(self):
        result = solve_pencil(_pencil(np.diag([-1.0, -0.5, 0.99, 1.0, 2.0]), np.eye(5)))
        assert [e for _, e in gap_eigenvalues(result)] == [-0.5, 0.99]
        assert [e for _, e in gap_eigenvalues(result, margin=0.02)] == [-0.5]
        assert [i for i, _ in gap_eigenvalues(result)] == [1, 2]

    def test_free_operator_has_no_gap_states(self, small_exps, params, zero):
        result = solve_pencil(assemble(kinetic_balance_basis(small_exps, params), zero))
        assert gap_eigenvalues(result, margin=1e-9) == []


class TestPencilProperties:
    def test_dual_balance_free_symmetry(self, small_exps, params, zero):
        # with eps = 1 the free spectrum is symmetric about zero
        result = solve_pencil(assemble(dual_kinetic_balance_basis(small_exps, params, 1.0), zero))
        values = result.eigenvalues
        np.testing.assert_allclose(values, -values[::-1], rtol=1e-6, atol=1e-8)

    def test_interlacing_under_deletion(self, small_exps, params, coulomb, rng):
        pencil = assemble(kinetic_balance_basis(small_exps, params), coulomb)
        full = solve_pencil(pencil).eigenvalues
        n = pencil.dim
        for _ in range(50):
            k = int(rng.integers(n))
            keep = np.delete(np.arange(n), k)
            reduced = solve_pencil(_pencil(pencil.h[np.ix_(keep, keep)], pencil.s[np.ix_(keep, keep)])).eigenvalues
            slack = 1e-9 * max(1.0, np.abs(full).max())
            assert np.all(full[:-1] <= reduced + slack)
            assert np.all(reduced <= full[1:] + slack)

    def test_appended_vector_lowers_bottom_of_spectrum(self, zn, params, coulomb):
        pencil = assemble(upper_lower_basis(zn, params), coulomb)
        base = solve_pencil(pencil).eigenvalues
        grown = solve_pencil(append_vectors(pencil, coulomb, [mixed_trap_vector(0.0, 1e6 * params.alpha**2)]))
        # an added vector can only lower eigenvalues
        assert grown.eigenvalues[0] <= base[0] + 1e-9


class TestInvariances:
    def test_common_scale_of_both_blocks(self, rng):
        a = rng.normal(size=(6, 6))
        s = a @ a.T + 6 * np.eye(6)
        h = rng.normal(size=(6, 6))
        h = h + h.T
        plain = solve_pencil(_pencil(h, s))
        for c in (1e-3, 2.5, 1e4):
            scaled = solve_pencil(_pencil(c * h, c * s))
            np.testing.assert_allclose(scaled.eigenvalues, plain.eigenvalues, rtol=1e-10, atol=1e-12)
            np.testing.assert_allclose(scaled.eigenvectors * np.sqrt(c), plain.eigenvectors, rtol=1e-8, atol=1e-10)

    def test_rescaling_one_basis_vector(self, small_exps, params, coulomb):
        base = kinetic_balance_basis(small_exps, params)
        vectors = list(base.vectors)
        vectors[3] = vectors[3].scaled(7.0)
        rescaled = BasisSet(tuple(vectors), base.scheme, base.params)
        plain = solve_pencil(assemble(base, coulomb))
        other = solve_pencil(assemble(rescaled, coulomb))
        np.testing.assert_allclose(other.eigenvalues, plain.eigenvalues, rtol=1e-9, atol=1e-11)
        # the coefficient of the stretched vector shrinks by the same factor
        expected = plain.eigenvectors.copy()
        expected[3] /= 7.0
        np.testing.assert_allclose(other.eigenvectors, expected, rtol=1e-6, atol=1e-9)

    def test_upper_lower_free_spectrum_is_symmetric(self, small_exps, params, zero):
        values = solve_pencil(assemble(upper_lower_basis(small_exps, params), zero)).eigenvalues
        np.testing.assert_allclose(values, -values[::-1], rtol=1e-8, atol=1e-10)
        assert np.all(np.abs(values) >= 1.0 - 1e-12)


class TestResiduals:
    def test_reconstruct_from_eigenpairs(self, small_exps, params, coulomb):
        pencil = assemble(kinetic_balance_basis(small_exps, params), coulomb)
        result = solve_pencil(pencil)
        x, lam = result.eigenvectors, result.eigenvalues
        assert result.n_discarded == 0
        np.testing.assert_allclose(x.T @ pencil.s @ x, np.eye(len(lam)), atol=1e-9)
        direct = np.linalg.norm(pencil.h @ x - pencil.s @ x * lam, axis=0)
        np.testing.assert_allclose(result.residuals, direct, atol=1e-9 * pencil.h_max)
        assert result.residual_max == pytest.approx(result.residuals.max())

    def test_reconstruct_on_kept_directions(self):
        s = np.array([[1.0, 1.0, 0.0], [1.0, 1.0 + 1e-14, 0.0], [0.0, 0.0, 2.0]])
        h = np.array([[3.0, 3.0, 0.0], [3.0, 3.0, 0.0], [0.0, 0.0, -1.0]])
        result = solve_pencil(_pencil(h, s))
        assert result.n_discarded == 1
        s_vals, s_vecs = np.linalg.eigh(s)
        kept = s_vecs[:, s_vals > 1e-10 * s_vals.max()]
        x, lam = result.eigenvectors, result.eigenvalues
        direct = np.linalg.norm(kept.T @ (h @ x - s @ x * lam), axis=0)
        np.testing.assert_allclose(result.residuals, direct, atol=1e-12)
        np.testing.assert_allclose(lam, [-0.5, 3.0], atol=1e-10)
