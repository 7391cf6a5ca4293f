import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from larsen_elm.data import (
    NOISE_PROFILES,
    DEFAULT_SPLITS,
    Dataset,
    DatasetError,
    NoiseProfile,
    blend_noise,
    gen_two_sines,
    load_boston,
    load_csv,
    manifest_json,
    split,
    stack,
    standardize,
)


def small(n=10, d=3, seed=0):
    r = np.random.default_rng(seed)
    return Dataset("toy", r.normal(size=(n, d)), r.normal(size=(n, 1)), [f"c{j}" for j in range(d)])


def test_load_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b,target\n1,2,3\n4,5,6\n7,8,9\n")
    ds = load_csv(p, "target")
    assert ds.x.shape == (3, 2) and ds.y.shape == (3, 1)
    assert ds.column_labels == ["a", "b"] and ds.noise_mask == [False, False]
    np.testing.assert_array_equal(ds.y.ravel(), [3, 6, 9])


def test_load_csv_errors(tmp_path):
    with pytest.raises(DatasetError, match="no such file"):
        load_csv(tmp_path / "missing.csv", "y")
    p = tmp_path / "bad.csv"
    p.write_text("a,y\n1,2\nx,3\n")
    with pytest.raises(DatasetError, match=r"bad.csv:3.*'x'.*'a'"):
        load_csv(p, "y")
    with pytest.raises(DatasetError, match="target column"):
        load_csv(p, "nope")


def test_csv_round_trip(tmp_path):
    ds = small()
    ds.to_csv(tmp_path / "r.csv")
    back = load_csv(tmp_path / "r.csv", "target")
    np.testing.assert_array_equal(back.x, ds.x)
    np.testing.assert_array_equal(back.y, ds.y)


def test_boston_shape():
    ds = load_boston()
    assert ds.x.shape == (506, 13)
    train, test = split(ds, DEFAULT_SPLITS["boston"], 0)
    assert (train.n_rows, test.n_rows) == (400, 106)


def test_split_sizes_and_disjoint():
    ds = Dataset("ids", np.arange(10.0)[:, None], np.arange(10.0), ["i"])
    train, test = split(ds, 7, 3)
    assert (train.n_rows, test.n_rows) == (7, 3)
    rows = np.concatenate([train.x.ravel(), test.x.ravel()])
    assert sorted(rows) == list(range(10))
    again, _ = split(ds, 7, 3)
    np.testing.assert_array_equal(again.x, train.x)


def test_red_wine_split_size():
    ds = Dataset("redwine", np.zeros((1599, 11)), np.zeros(1599), [str(j) for j in range(11)])
    assert split(ds, 1065, 0)[1].n_rows == 534


def test_split_range():
    with pytest.raises(DatasetError):
        split(small(), 10, 0)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 60), seed=st.integers(0, 1000), data=st.data())
def test_split_is_a_partition(n, seed, data):
    k = data.draw(st.integers(1, n - 1))
    ds = Dataset("ids", np.arange(float(n))[:, None], np.zeros(n), ["i"])
    a, b = split(ds, k, seed)
    ids = np.concatenate([a.x.ravel(), b.x.ravel()])
    assert len(set(ids)) == n


def test_standardize_uses_train_stats():
    r = np.random.default_rng(0)
    x = 5 + 2 * r.normal(size=(200, 1))
    train = Dataset("a", x, np.zeros(200), ["x"])
    test = Dataset("b", x[:50] + 10.0, np.zeros(50), ["x"])
    tr, te, stats = standardize(train, test)
    assert abs(tr.x.mean()) < 1e-12 and abs(tr.x.std() - 1) < 1e-12
    np.testing.assert_allclose(te.x, (x[:50] + 10.0 - x.mean()) / x.std())


def test_standardize_constant_column():
    x = np.c_[np.full(5, 3.0), np.arange(5.0)]
    ds = Dataset("c", x, np.zeros(5), ["k", "v"])
    tr, _, stats = standardize(ds, ds)
    np.testing.assert_array_equal(tr.x[:, 0], 0.0)
    assert stats.constant == [0]


def test_standardize_idempotent():
    tr, _, _ = standardize(small(50), small(5))
    again, _, _ = standardize(tr, tr)
    np.testing.assert_allclose(again.x, tr.x, atol=1e-12)


def test_blend_noise_empty_profile_is_identity():
    ds = small()
    assert blend_noise(ds, NoiseProfile(())) is ds


def test_blend_seven_on_boston():
    ds = blend_noise(load_boston(), NoiseProfile.named("seven", seed=1))
    assert ds.n_cols == 20 and sum(ds.noise_mask) == 7


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 10))
def test_blend_preserves_original_columns(seed, k):
    ds = small(20, 4)
    out = blend_noise(ds, NoiseProfile(tuple(np.linspace(0.1, 2, k)), seed))
    assert out.n_rows == 20 and sum(out.noise_mask) == k
    original = out.x[:, [j for j, m in enumerate(out.noise_mask) if not m]]
    labels = [l for l, m in zip(out.column_labels, out.noise_mask) if not m]
    np.testing.assert_array_equal(original, ds.x[:, [ds.column_labels.index(l) for l in labels]])
    np.testing.assert_array_equal(out.y, ds.y)


def test_injected_noise_scale():
    ds = Dataset("z", np.zeros((2000, 1)), np.zeros(2000), ["z"])
    out = blend_noise(ds, NoiseProfile((2.0,), seed=3))
    col = out.x[:, out.noise_mask.index(True)]
    assert 1.9 <= col.std(ddof=1) <= 2.1


def test_noise_profile_values():
    assert NOISE_PROFILES["seven"] == (2, 1, 0.5, 0.1, 0.005, 0.001, 0.0005)
    assert NOISE_PROFILES["ten"] == (2, 1, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001)
    with pytest.raises(Exception):
        NoiseProfile((1.0, 0.0))


def test_two_sines():
    ds = gen_two_sines(2001)
    assert ds.n_rows == 2001 and ds.n_cols == 1
    assert ds.y[0, 0] == 0.0
    half_pi = gen_two_sines(3, domain=(0.0, np.pi))
    assert half_pi.y[1, 0] == pytest.approx(1.0)


def test_two_sines_with_noise():
    ds = gen_two_sines(100, noise_profile=NoiseProfile((2.0,), 0))
    assert ds.n_cols == 2 and sum(ds.noise_mask) == 1


def test_stack_and_manifest():
    ds = stack([small(3), small(4, seed=1)])
    assert ds.n_rows == 7
    text = manifest_json(ds, seed=4)
    assert '"seed": 4' in text and '"noise_mask"' in text
