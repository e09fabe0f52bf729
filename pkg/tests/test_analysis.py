import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from clar.errors import DegenerateInputError
from clar.labels import LabeledMatrix
from clar.analysis import (manifold_report, pair_segments, pairwise_distances, pearson,
                           svd_project, top_eigenvectors)
from clar.regularizer import AffineTransform

from conftest import lab


def jacobi_eigen(a, sweeps=100):
    """Cyclic Jacobi rotations for a symmetric matrix; independent of the code under test."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    vecs = np.eye(n)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < 1e-15 * max(1.0, np.abs(a).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta ** 2 + 1)) if theta else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
                vecs = vecs @ rot
    return np.diag(a), vecs


def random_rotation(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diag(r))


def labeled(rows):
    return LabeledMatrix(tuple(lab(f"L{i}") for i in range(len(rows))), np.asarray(rows, float))


class TestProjection:
    def test_collinear_rows(self, rng):
        v = rng.normal(size=4)
        rows = np.outer(rng.normal(size=6), v)
        p = svd_project(labeled(rows))
        np.testing.assert_allclose(p.coordinates[:, 1], 0.0, atol=1e-8)
        assert abs(p.singular_values[1]) <= 1e-8

    def test_two_dims_preserve_distances(self, rng):
        rows = rng.normal(size=(7, 2))
        p = svd_project(labeled(rows), 2)
        np.testing.assert_allclose(pairwise_distances(p.coordinates), pairwise_distances(rows),
                                   atol=1e-9)

    def test_reconstruction_error_against_jacobi(self, rng):
        for _ in range(10):
            rows = rng.normal(size=(6, 4))
            centered = rows - rows.mean(axis=0)
            eig, _ = jacobi_eigen(centered.T @ centered)
            eig = np.sort(np.clip(eig, 0, None))[::-1]
            p = svd_project(labeled(rows), 2)
            basis = centered.T @ p.coordinates / p.singular_values ** 2
            recon = p.coordinates @ basis.T
            err = np.sum((centered - recon) ** 2)
            assert abs(err - eig[2:].sum()) <= 1e-8
            np.testing.assert_allclose(p.singular_values, np.sqrt(eig[:2]), atol=1e-8)

    def test_singular_values_sorted(self, rng):
        p = svd_project(labeled(rng.normal(size=(8, 5))), 3)
        assert np.all(np.diff(p.singular_values) <= 0) and np.all(p.singular_values >= 0)
        assert p.coordinates.shape == (8, 3)

    def test_sign_convention(self, rng):
        rows = rng.normal(size=(6, 4))
        p = svd_project(labeled(rows))
        q = svd_project(labeled(-rows))
        np.testing.assert_allclose(p.coordinates, -q.coordinates, atol=1e-9)

    def test_row_order_invariance(self, rng):
        rows = rng.normal(size=(7, 4))
        perm = rng.permutation(7)
        p, q = svd_project(labeled(rows)), svd_project(LabeledMatrix(
            tuple(lab(f"L{i}") for i in perm), rows[perm]))
        np.testing.assert_allclose(q.coordinates, p.coordinates[perm], atol=1e-9)

    def test_k_too_large(self, rng):
        with pytest.raises(ValueError):
            svd_project(labeled(rng.normal(size=(3, 2))), 3)

    def test_eigenvectors(self, rng):
        a = rng.normal(size=(5, 5))
        g = a @ a.T
        eig, vecs = top_eigenvectors(g, 2)
        ref, _ = jacobi_eigen(g)
        np.testing.assert_allclose(eig, np.sort(ref)[::-1][:2], rtol=1e-9)
        np.testing.assert_allclose(g @ vecs, vecs * eig, atol=1e-8)

    def test_tsv(self):
        p = svd_project(labeled([[0.0, 1.0], [1.0, 0.0]]), 1)
        assert [line.split("\t")[:2] for line in p.to_tsv().splitlines()] == [["en", "L0"], ["en", "L1"]]


class TestDistances:
    def test_three_four_five(self):
        d = pairwise_distances([[0.0, 0.0], [3.0, 4.0]])
        np.testing.assert_array_equal(d, [[0.0, 5.0], [5.0, 0.0]])

    def test_identical_rows(self):
        np.testing.assert_array_equal(pairwise_distances(np.ones((3, 2))), 0.0)

    def test_independent_recomputation(self, rng):
        rows = rng.normal(size=(6, 3))
        d = pairwise_distances(rows)
        for i in range(6):
            for j in range(6):
                assert abs(d[i, j] - np.linalg.norm(rows[i] - rows[j])) <= 1e-12


class TestManifold:
    def test_identical(self, rng):
        u = rng.normal(size=(5, 3))
        r = manifold_report(u, u)
        assert r.pearson == 1.0 and r.frobenius_sq_diff == 0.0

    def test_rigid_motion(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 6))
            u = rng.normal(size=(8, d))
            v = u @ random_rotation(rng, d).T + rng.normal(size=d)
            r = manifold_report(u, v)
            assert abs(r.pearson - 1.0) <= 1e-9 and r.frobenius_sq_diff <= 1e-9

    def test_matrices_symmetric_zero_diagonal(self, rng):
        r = manifold_report(rng.normal(size=(5, 3)), rng.normal(size=(5, 3)))
        for d in (r.dist_source, r.dist_target):
            np.testing.assert_array_equal(d, d.T)
            np.testing.assert_array_equal(np.diag(d), 0.0)
        assert -1.0 <= r.pearson <= 1.0

    def test_frobenius_is_full_matrix_sum(self, rng):
        u, v = rng.normal(size=(4, 2)), rng.normal(size=(4, 2))
        r = manifold_report(u, v)
        assert abs(r.frobenius_sq_diff - 2 * sum((r.dist_source[i, j] - r.dist_target[i, j]) ** 2
                                                 for i in range(4) for j in range(i + 1, 4))) < 1e-12

    def test_transformed_targets(self, rng):
        u = rng.normal(size=(6, 3))
        t = AffineTransform(rng.normal(size=(3, 3)), rng.normal(size=3))
        v = np.linalg.solve(t.psi, (u - t.b).T).T
        assert manifold_report(u, v, t).frobenius_sq_diff < 1e-9

    def test_degenerate(self):
        with pytest.raises(DegenerateInputError):
            manifold_report(np.zeros((2, 2)), np.zeros((2, 2)))
        with pytest.raises(DegenerateInputError):
            manifold_report(np.zeros((4, 2)), np.eye(4)[:, :2])

    def test_pearson_reference(self):
        # deviations (-1.5, -.5, .5, 1.5) and (-3, -1, 0, 4): cov 11, sxx 5, syy 26
        assert abs(pearson([1, 2, 3, 4], [2, 4, 5, 9]) - 11 / np.sqrt(130)) < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 4).flatmap(lambda d: st.tuples(
        hnp.arrays(float, (6, d), elements=st.floats(-5, 5)),
        hnp.arrays(float, (6, d), elements=st.floats(-5, 5)),
        st.integers(0, 2 ** 16))))
    def test_pearson_rigid_invariance(self, case):
        u, v, seed = case
        try:
            base = manifold_report(u, v).pearson
        except DegenerateInputError:
            return
        rng = np.random.default_rng(seed)
        d = u.shape[1]
        moved = v @ random_rotation(rng, d).T + rng.normal(size=d)
        assert abs(manifold_report(u, moved).pearson - base) <= 1e-6

    def test_zero_frobenius_iff_congruent(self, rng):
        u = rng.normal(size=(5, 3))
        v = u.copy()
        v[0] += 0.1
        assert manifold_report(u, v).frobenius_sq_diff > 0


def test_pair_segments_use_joint_projection(rng):
    U = LabeledMatrix(tuple(lab(f"S{i}", "s") for i in range(4)), rng.normal(size=(4, 3)))
    V = LabeledMatrix(tuple(lab(f"T{i}", "t") for i in range(4)), rng.normal(size=(4, 3)))
    text = pair_segments(U, V, [(U.labels[0], V.labels[2])])
    cols = text.strip().split("\t")
    assert cols[:2] == ["s:S0", "t:T2"] and len(cols) == 6
    joint = svd_project(LabeledMatrix(U.labels + V.labels, np.vstack([U.rows, V.rows])))
    np.testing.assert_allclose([float(x) for x in cols[2:]],
                               [*joint.coordinates[0], *joint.coordinates[6]], rtol=0, atol=0)
