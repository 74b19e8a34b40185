import numpy as np
import pytest
from hypothesis import given, strategies as st

from cdforest.dataset import (Dataset, DataError, bootstrap_sample, encode_labels,
                              fit_standardizer, apply_standardizer, load_arff, load_csv,
                              stratified_split, stratified_train_counts, write_csv)


def test_load_csv_encodes_first_appearance(write_text):
    d = load_csv(write_text("d.csv", "a,b,y\n1,2,cat\n3,4,dog\n5,6,cat\n"), "y")
    assert (d.n, d.p, d.n_classes) == (3, 2, 2)
    assert d.labels.tolist() == [0, 1, 0]
    assert d.label_names == ("cat", "dog")
    assert d.feature_names == ("a", "b")
    assert d.features.tolist() == [[1, 2], [3, 4], [5, 6]]


def test_load_csv_minimal(write_text):
    d = load_csv(write_text("d.csv", "x,y\n0.5,only\n"), "y")
    assert (d.n, d.p, d.n_classes) == (1, 1, 1)


def test_load_csv_label_by_index(write_text):
    d = load_csv(write_text("d.csv", "y,a\nu,1\nv,2\n"), 0)
    assert d.feature_names == ("a",) and d.label_names == ("u", "v")


def test_missing_policies(write_text):
    path = write_text("d.csv", "a,b,y\n1,,cat\n3,4,dog\n5,6,cat\n")
    with pytest.raises(DataError, match="missing"):
        load_csv(path, "y", "reject")
    d = load_csv(path, "y", "drop_rows")
    assert d.n == 2 and d.features.tolist() == [[3, 4], [5, 6]]
    assert d.label_names == ("dog", "cat")


@pytest.mark.parametrize("text, match", [
    ("a,y\n1,u\nzz,v\n", "non-numeric"),
    ("a,y\n1,u\ninf,v\n", "non-finite"),
    ("a,b\n1,2\n", "not found"),
    ("a,y\n", "no usable rows"),
])
def test_load_csv_errors(write_text, text, match):
    with pytest.raises(DataError, match=match):
        load_csv(write_text("d.csv", text), "y")


def test_load_csv_unreadable(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        load_csv(tmp_path / "nope.csv", "y")


ARFF = """% comment
@relation toy
@attribute f1 numeric
@attribute 'f two' REAL
@attribute class {neg,pos}
@data
1.0,2.0,pos
3.0,?,neg
-1,0.5,neg
"""


def test_load_arff(write_text):
    d = load_arff(write_text("t.arff", ARFF))
    assert (d.n, d.p, d.n_classes) == (2, 2, 2)  # '?' row dropped
    assert d.label_names == ("neg", "pos")  # declaration order
    assert d.labels.tolist() == [1, 0]
    assert d.feature_names == ("f1", "f two")


def test_load_arff_single_feature(write_text):
    text = "@relation r\n@attribute f1 numeric\n@attribute class {neg,pos}\n@data\n1,neg\n2,pos\n"
    d = load_arff(write_text("t.arff", text))
    assert d.p == 1 and d.n_classes == 2


@pytest.mark.parametrize("text, match", [
    ("@relation r\n@attribute s string\n@attribute c {a,b}\n@data\nx,a\n", "unsupported attribute type"),
    ("@relation r\n@attribute f numeric\n@attribute c {a,b}\n", "missing @data"),
    ("@relation r\n@attribute f numeric\n@attribute c {a,b}\n@data\n{0 1, 1 a}\n", "sparse"),
    ("@relation r\n@attribute f numeric\n@attribute c {a,b}\n@data\n1,a,3\n", "expected 2 values"),
    ("@relation r\n@attribute f\n@data\n", "malformed|without type"),
    ("@relation r\n@attribute f numeric\n@data\n1\n", "no nominal"),
])
def test_load_arff_errors(write_text, text, match):
    with pytest.raises(DataError, match=match):
        load_arff(write_text("t.arff", text))


def test_csv_round_trip(tmp_path, rng):
    d = Dataset(rng.normal(size=(7, 3)), [0, 1, 2, 1, 0, 2, 2], ("x", "y", "z"), ("p", "q", "r"))
    write_csv(d, tmp_path / "d.csv")
    back = load_csv(tmp_path / "d.csv", "class")
    np.testing.assert_array_equal(back.features, d.features)
    assert back.decoded_labels() == d.decoded_labels()


@given(st.lists(st.sampled_from(["a", "b", "c", "dd", "é"]), min_size=1, max_size=30))
def test_label_round_trip(raw):
    codes, names = encode_labels(raw)
    assert [names[c] for c in codes] == raw


def test_dataset_rejects_nan():
    with pytest.raises(DataError):
        Dataset(np.array([[np.nan]]), [0], ("a",))


def test_stratified_counts_seven_three():
    # total round(0.7*10)=7; floors 3,3; the leftover row goes to class 0
    assert stratified_train_counts([5, 5], 0.7).tolist() == [4, 3]
    d = Dataset(np.arange(10.0)[:, None], [0] * 5 + [1] * 5, ("a", "b"))
    for seed in range(5):
        s = stratified_split(d, 0.7, seed)
        assert (s.train.n, s.test.n) == (7, 3)
        assert s.train.class_counts().tolist() == [4, 3]


def test_stratified_minimum_one_in_train_empties_test():
    d = Dataset(np.array([[0.0], [1.0]]), [0, 1], ("a", "b"))
    assert stratified_train_counts([1, 1], 0.5).tolist() == [1, 1]
    with pytest.raises(DataError, match="test set empty"):
        stratified_split(d, 0.5, 0)


def test_singleton_class_goes_to_train():
    d = Dataset(np.arange(11.0)[:, None], [0] * 10 + [1], ("a", "b"))
    s = stratified_split(d, 0.7, 3)
    assert s.train.class_counts()[1] == 1 and s.test.class_counts()[1] == 0


def test_split_determinism_and_unstratified():
    d = Dataset(np.arange(20.0)[:, None], [0] * 12 + [1] * 8, ("a", "b"))
    a, b = stratified_split(d, 0.7, 9), stratified_split(d, 0.7, 9)
    np.testing.assert_array_equal(a.train_index, b.train_index)
    u = stratified_split(d, 0.7, 9, stratify=False)
    assert (u.train.n, u.test.n) == (14, 6)
    with pytest.raises(ValueError):
        stratified_split(d, 1.0, 0)


@given(st.lists(st.integers(0, 3), min_size=4, max_size=40), st.floats(0.1, 0.9),
       st.integers(0, 2**32))
def test_split_partitions_rows(labels, frac, seed):
    K = max(labels) + 1
    d = Dataset(np.arange(len(labels), dtype=float)[:, None], labels, tuple("abcd"[:K]))
    try:
        s = stratified_split(d, frac, seed)
    except DataError:
        return
    tr, te = set(s.train_index.tolist()), set(s.test_index.tolist())
    assert not tr & te and tr | te == set(range(d.n))
    assert s.train.n + s.test.n == d.n
    # present classes always keep a training row
    assert np.all(s.train.class_counts()[d.class_counts() > 0] >= 1)


def test_bootstrap_single_row():
    d = Dataset([[4.0, 2.0]], [0], ("a",))
    b = bootstrap_sample(d, 5)
    assert b.features.tolist() == [[4.0, 2.0]]


def test_bootstrap_distinct_fraction():
    # expected distinct rows: 1000 * (1 - (1 - 1/1000)^1000) = 632.3
    d = Dataset(np.arange(1000.0)[:, None], np.zeros(1000, dtype=int), ("a",))
    distinct = [np.unique(bootstrap_sample(d, s).features).size for s in range(20)]
    assert all(abs(k - 632) <= 30 for k in distinct)
    assert abs(np.mean(distinct) - 632.3) < 10


@given(st.integers(1, 50), st.integers(0, 2**32))
def test_bootstrap_shape_and_support(n, seed):
    d = Dataset(np.arange(n, dtype=float)[:, None], np.arange(n) % 2, ("a", "b"))
    b = bootstrap_sample(d, seed)
    assert b.n == n and set(b.features[:, 0]) <= set(d.features[:, 0])
    assert b.label_names == d.label_names
    np.testing.assert_array_equal(b.features, bootstrap_sample(d, seed).features)


def test_standardizer_uses_given_stats(rng):
    X = rng.normal(3, 2, size=(50, 4))
    X[:, 2] = 7.0
    mean, scale = fit_standardizer(X)
    Z = apply_standardizer(X, mean, scale)
    np.testing.assert_allclose(Z.mean(axis=0), 0, atol=1e-12)
    assert scale[2] == 1.0
