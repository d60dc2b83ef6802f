"""Synthetic-minority oversampling: geometry, counts, determinism."""

import numpy as np
import pytest

from chdml.errors import ConfigError, SingleClass, TooFewMinority
from chdml.preprocess import Dataset
from chdml.resample import SmoteParams, minority_neighbors, smote


def toy(n_major=12, n_minor=4, d=3, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([
        rng.normal(0.0, 1.0, (n_major, d)),
        rng.normal(4.0, 1.0, (n_minor, d)),
    ])
    y = np.array([0] * n_major + [1] * n_minor)
    return Dataset(X, y)


class TestParams:
    def test_defaults(self):
        params = SmoteParams()
        assert params.k_neighbors == 5
        assert params.target_ratio == 1.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            SmoteParams(k_neighbors=0)
        with pytest.raises(ConfigError):
            SmoteParams(target_ratio=-1.0)


class TestMinorityNeighbors:
    def test_one_dimensional_line(self):
        # Points 0, 1, 10: nearest of 0 is 1, of 1 is 0, of 10 is 1.
        X = np.array([[0.0], [1.0], [10.0]])
        nn = minority_neighbors(X, k=1)
        assert nn[:, 0].tolist() == [1, 0, 1]

    def test_self_excluded(self):
        X = np.array([[0.0], [0.0], [5.0]])
        nn = minority_neighbors(X, k=2)
        for i in range(3):
            assert i not in nn[i].tolist()

    def test_k_clamped_to_population(self):
        X = np.array([[0.0], [1.0]])
        nn = minority_neighbors(X, k=5)
        assert nn.shape == (2, 1)

    def test_too_few_rejected(self):
        with pytest.raises(TooFewMinority):
            minority_neighbors(np.array([[1.0]]), k=1)

    def test_tie_goes_to_lower_index(self):
        # Rows 1 and 2 are equidistant from row 0.
        X = np.array([[0.0], [2.0], [-2.0]])
        nn = minority_neighbors(X, k=1)
        assert nn[0, 0] == 1


class TestSmote:
    def test_reaches_parity(self):
        data = toy()
        out = smote(data, SmoteParams(k_neighbors=3, seed=1))
        assert out.class_counts() == (12, 12)

    def test_originals_preserved_and_first(self):
        data = toy()
        out = smote(data, SmoteParams(k_neighbors=3, seed=1))
        assert np.array_equal(out.features[:16], data.features)
        assert np.array_equal(out.labels[:16], data.labels)

    def test_synthetic_rows_on_segments(self):
        data = toy(n_major=20, n_minor=6)
        out = smote(data, SmoteParams(k_neighbors=3, seed=9))
        X_min = data.features[data.labels == 1]
        for row in out.features[26:]:
            # must lie between some pair of minority rows, coordinate-wise
            ok = False
            for a in X_min:
                for b in X_min:
                    lo = np.minimum(a, b)
                    hi = np.maximum(a, b)
                    if ((row >= lo - 1e-12) & (row <= hi + 1e-12)).all():
                        ok = True
            assert ok

    def test_same_seed_identical(self):
        data = toy()
        a = smote(data, SmoteParams(seed=42))
        b = smote(data, SmoteParams(seed=42))
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_different_seed_differs(self):
        data = toy()
        a = smote(data, SmoteParams(seed=1))
        b = smote(data, SmoteParams(seed=2))
        assert not np.array_equal(a.features, b.features)

    def test_ratio_below_parity(self):
        data = toy(n_major=10, n_minor=4)
        out = smote(data, SmoteParams(k_neighbors=3, target_ratio=0.5, seed=0))
        # round(0.5 * 10) = 5 wanted, 4 present -> one synthetic row.
        assert out.class_counts() == (10, 5)

    def test_already_balanced_unchanged(self):
        data = toy(n_major=5, n_minor=5)
        out = smote(data, SmoteParams(k_neighbors=3, seed=0))
        assert out.n_rows == data.n_rows
        assert np.array_equal(out.features, data.features)

    def test_single_class_rejected(self):
        X = np.random.default_rng(0).normal(size=(6, 2))
        with pytest.raises(SingleClass):
            smote(Dataset(X, np.zeros(6, dtype=int)), SmoteParams())

    def test_minority_of_one_rejected(self):
        X = np.random.default_rng(0).normal(size=(6, 2))
        y = np.array([0, 0, 0, 0, 0, 1])
        with pytest.raises(TooFewMinority):
            smote(Dataset(X, y), SmoteParams())

    def test_round_nominal(self):
        X = np.array([[0.0], [0.0], [1.0], [1.0], [3.0], [3.0], [3.0], [3.0]])
        y = np.array([1, 1, 1, 1, 0, 0, 0, 0])
        data = Dataset(X, y)
        params = SmoteParams(
            k_neighbors=2, seed=3, round_nominal=True, nominal_columns=(0,)
        )
        out = smote(data, params)
        synth = out.features[8:]
        assert np.array_equal(synth, np.rint(synth))


def test_fixture_smote_counts(fixture_dataset):
    out = smote(fixture_dataset, SmoteParams(k_neighbors=5, seed=0))
    assert out.class_counts() == (37, 37)
    assert out.n_rows == 74
