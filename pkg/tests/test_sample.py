import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvnormtest import DataError, Sample, SingularCovarianceError, inv_sqrt_sym, load_sample, standardize
from mvnormtest.sample import pairwise_sq_dists, scaled_residuals


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadSample:
    def test_plain_numeric(self, tmp_path):
        s = load_sample(_write(tmp_path, "1,2\n3,4.5\n-1,0\n"))
        assert (s.n, s.d) == (3, 2)
        np.testing.assert_array_equal(s.values[1], [3.0, 4.5])

    def test_header_is_skipped(self, tmp_path):
        s = load_sample(_write(tmp_path, "x,y\n1,2\n3,4\n5,7\n"))
        assert s.d == 2 and s.n == 3

    def test_too_few_rows(self, tmp_path):
        with pytest.raises(DataError, match="n must exceed d"):
            load_sample(_write(tmp_path, "1,2\n3,4\n"))

    def test_ragged_row_reports_position(self, tmp_path):
        with pytest.raises(DataError, match="row 3"):
            load_sample(_write(tmp_path, "1,2\n3,4\n5\n6,7\n"))

    def test_non_numeric_cell(self, tmp_path):
        with pytest.raises(DataError, match="column 2"):
            load_sample(_write(tmp_path, "1,2\n3,abc\n5,6\n7,8\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_sample(tmp_path / "nope.csv")

    def test_blank_lines_ignored_and_source_recorded(self, tmp_path):
        path = _write(tmp_path, "1\n\n2\n4\n")
        s = load_sample(path)
        assert s.n == 3 and s.source == str(path)


def test_sample_rejects_non_finite():
    x = np.ones((5, 2))
    x[3, 1] = np.nan
    with pytest.raises(DataError, match="row 4, column 2"):
        Sample(x)


def test_sample_is_read_only():
    s = Sample(np.arange(6.0).reshape(3, 2) ** 2)
    with pytest.raises(ValueError):
        s.values[0, 0] = 1.0


class TestInvSqrtSym:
    def test_identity(self):
        for d in (1, 2, 5):
            np.testing.assert_allclose(inv_sqrt_sym(np.eye(d)), np.eye(d), atol=1e-15)

    def test_diagonal(self):
        np.testing.assert_allclose(inv_sqrt_sym(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]), atol=1e-15)

    @pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
    def test_random_spd(self, rng, d):
        a = rng.standard_normal((d, d))
        m = a.T @ a + np.eye(d)
        r = inv_sqrt_sym(m)
        np.testing.assert_allclose(r @ m @ r, np.eye(d), atol=1e-12)
        np.testing.assert_allclose(r, r.T, atol=1e-14)

    def test_singular(self):
        with pytest.raises(SingularCovarianceError):
            inv_sqrt_sym(np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            inv_sqrt_sym(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_stacked(self, rng):
        a = rng.standard_normal((4, 3, 3))
        m = np.swapaxes(a, -1, -2) @ a + np.eye(3)
        r = inv_sqrt_sym(m)
        for k in range(4):
            np.testing.assert_allclose(r[k], inv_sqrt_sym(m[k]), atol=1e-13)


def test_two_point_residuals(two_point):
    np.testing.assert_allclose(two_point.y[:, 0], [-1.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(two_point.sq_dists, [[0.0, 4.0], [4.0, 0.0]], atol=1e-14)


def test_collinear_sample_is_singular():
    t = np.linspace(0, 1, 10)
    with pytest.raises(SingularCovarianceError):
        standardize(np.column_stack([t, 2 * t + 1]))


def test_cache_is_read_only(rng):
    y = standardize(rng.standard_normal((10, 2)))
    for arr in (y.y, y.sq_norms, y.sq_dists):
        assert not arr.flags.writeable


def test_pairwise_distances_against_direct(rng):
    y = rng.standard_normal((12, 3))
    direct = ((y[:, None, :] - y[None, :, :]) ** 2).sum(-1)
    np.testing.assert_allclose(pairwise_sq_dists(y), direct, atol=1e-12)


def test_batched_residuals_match_single(rng):
    x = rng.standard_normal((3, 15, 2))
    batch = scaled_residuals(x)
    for k in range(3):
        np.testing.assert_allclose(batch[k], standardize(x[k]).y, atol=1e-13)


@settings(max_examples=60)
@given(
    seed=st.integers(0, 2**32 - 1),
    d=st.sampled_from([1, 2, 3, 5]),
    extra=st.integers(1, 60),
    scale=st.floats(1e-3, 1e3),
)
def test_standardization_invariants(seed, d, extra, scale):
    rng = np.random.default_rng(seed)
    n = d + extra
    x = scale * rng.standard_normal((n, d)) @ rng.standard_normal((d, d)) + rng.standard_normal(d)
    try:
        y = standardize(x)
    except SingularCovarianceError:
        return
    assert np.linalg.norm(y.y.mean(axis=0)) <= 1e-10
    assert np.max(np.abs(y.y.T @ y.y / n - np.eye(d))) <= 1e-9
    assert abs(y.sq_norms.sum() - n * d) <= 1e-8 * n * d


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_affine_equivariance(d):
    rng = np.random.default_rng(100 + d)
    worst = 0.0
    for _ in range(100):
        n = rng.integers(d + 2, 40)
        x = rng.standard_normal((n, d))
        a = rng.standard_normal((d, d))
        while abs(np.linalg.det(a)) < 0.1:
            a = rng.standard_normal((d, d))
        b = rng.normal(scale=5.0, size=d)
        y0, y1 = standardize(x), standardize(x @ a.T + b)
        worst = max(
            worst,
            np.max(np.abs(y0.sq_norms - y1.sq_norms)),
            np.max(np.abs(y0.sq_dists - y1.sq_dists)),
        )
    assert worst <= 1e-8


def test_residual_map_is_orthogonal(rng):
    # residuals of AX+b equal an orthogonal map applied to residuals of X
    d, n = 3, 30
    x = rng.standard_normal((n, d))
    a = rng.standard_normal((d, d))
    y0, y1 = standardize(x).y, standardize(x @ a.T).y
    q, *_ = np.linalg.lstsq(y0, y1, rcond=None)
    np.testing.assert_allclose(q.T @ q, np.eye(d), atol=1e-10)
    np.testing.assert_allclose(y0 @ q, y1, atol=1e-10)
