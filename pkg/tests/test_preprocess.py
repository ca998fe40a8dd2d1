import numpy as np
import pytest

from qsvm_lab import preprocess as pp
from qsvm_lab.errors import DegenerateSplitError, ParseError, PreconditionError, SchemaError

from _util import blob_rows, write_csv


def make(X, y, names=("a", "b", "c", "d")):
    X = np.asarray(X, dtype=float)
    return pp.Dataset(X, y, names[: X.shape[1]])


# loading -----------------------------------------------------------------------------


def test_load_with_header_and_comments(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("# comment\nvariance,skewness,kurtosis,entropy,class\n"
                 "1,2,3,4,0\n\n# mid comment\n-1.5,2e-3,0,4,1\n")
    d = pp.load_dataset(p)
    assert len(d) == 2 and d.class_counts() == (1, 1)
    assert d.feature_names == ("variance", "skewness", "kurtosis", "entropy")
    np.testing.assert_allclose(d.X[1], [-1.5, 0.002, 0, 4])


def test_load_without_header_uses_default_names(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1,2,3,4,0\n")
    assert pp.load_dataset(p).feature_names == pp.BANKNOTE_FEATURES
    p.write_text("1,2,0\n")
    assert pp.load_dataset(p, n_features=2).feature_names == ("x0", "x1")


def test_three_feature_file_is_schema_error(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1,2,3,0\n")
    with pytest.raises(SchemaError):
        pp.load_dataset(p)


def test_malformed_row_reports_line(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("a,b,c,d,class\n1,2,3,4,0\n1,x,3,4,1\n")
    with pytest.raises(ParseError, match="line 3"):
        pp.load_dataset(p)


@pytest.mark.parametrize("body", ["1,2,3,4,2\n", "1,2,3,4,0.5\n"])
def test_bad_label_is_schema_error(tmp_path, body):
    p = tmp_path / "d.csv"
    p.write_text(body)
    with pytest.raises(SchemaError):
        pp.load_dataset(p)


def test_missing_and_empty_files(tmp_path):
    with pytest.raises(ParseError):
        pp.load_dataset(tmp_path / "nope.csv")
    p = tmp_path / "empty.csv"
    p.write_text("a,b,c,d,class\n")
    with pytest.raises(ParseError):
        pp.load_dataset(p)


def test_load_synthetic_banknote_tallies(synthetic_banknote):
    d = pp.load_dataset(synthetic_banknote)
    assert len(d) == 1372 and d.class_counts() == (762, 610)


# splitting ---------------------------------------------------------------------------


def test_known_tallies_reproduced(synthetic_banknote):
    d = pp.load_dataset(synthetic_banknote)
    s = pp.split(d, 28, seed=7)
    assert s.train.class_counts() == (745, 599)
    assert s.test.class_counts() == (17, 11)


def test_split_is_a_partition_for_many_seeds(rng):
    X, y = blob_rows(rng, 40, 25)
    d = make(X, y)
    for seed in range(100):
        s = pp.split(d, 13, seed)
        tr, te = set(s.train.row_ids), set(s.test.row_ids)
        assert not tr & te and tr | te == set(range(len(d)))
        assert s.test.class_counts() == (8, 5)


def test_split_determinism_and_variation(rng):
    d = make(*blob_rows(rng, 30, 30))
    a, b, c = pp.split(d, 10, 1), pp.split(d, 10, 1), pp.split(d, 10, 2)
    np.testing.assert_array_equal(a.test.row_ids, b.test.row_ids)
    assert set(a.test.row_ids) != set(c.test.row_ids)


def test_largest_remainder_allocation():
    assert pp._proportional_counts((762, 610), 28) == (16, 12)
    assert pp._proportional_counts((1, 1), 3) == (2, 1)
    # equal remainders: the lower class index gets the extra row
    assert pp._proportional_counts((9, 1), 5) == (5, 0)
    assert pp._proportional_counts((9, 1), 10) == (9, 1)


def test_split_preconditions(rng):
    d = make(*blob_rows(rng, 5, 5))
    for n in (0, 10, -1):
        with pytest.raises(PreconditionError):
            pp.split(d, n, 0)
    with pytest.raises(PreconditionError):
        pp.split(d, 4, 0, test_counts=(3, 2))
    with pytest.raises(PreconditionError):
        pp.split(d, 7, 0, test_counts=(7, 0))


# class averages ----------------------------------------------------------------------


def test_class_averages_symmetric_example():
    d = make([[1, 1, 1, 1], [1, 1, 1, 1], [-1, -1, -1, -1], [-1, -1, -1, -1]], [0, 0, 1, 1])
    c0, c1 = pp.class_averages(d)
    np.testing.assert_array_equal(c0.features, [1, 1, 1, 1])
    np.testing.assert_array_equal(c1.features, [-1, -1, -1, -1])


def test_single_row_class_and_missing_class():
    d = make([[1, 2, 3, 4], [5, 6, 7, 8], [0, 0, 0, 1]], [0, 0, 1])
    np.testing.assert_array_equal(pp.class_averages(d)[1].features, [0, 0, 0, 1])
    with pytest.raises(DegenerateSplitError):
        pp.class_averages(make([[1, 2, 3, 4]], [0]))


def test_class_averages_match_two_pass_means(synthetic_banknote):
    train = pp.split(pp.load_dataset(synthetic_banknote), 28, 7).train
    c0, c1 = pp.class_averages(train)
    for cls, c in ((0, c0), (1, c1)):
        rows = [r.features for r in train.rows if r.label == cls]
        expect = [sum(r[j] for r in rows) / len(rows) for j in range(4)]
        np.testing.assert_allclose(c.features, expect, atol=1e-9)


def test_averages_idempotent():
    d = make([[2, 0, 0, 0]] * 3 + [[0, 3, 0, 0]] * 2, [0, 0, 0, 1, 1])
    c0, c1 = pp.class_averages(d)
    np.testing.assert_array_equal(c0.features, [2, 0, 0, 0])
    np.testing.assert_array_equal(c1.features, [0, 3, 0, 0])


# k-means -----------------------------------------------------------------------------


def test_kmeans_two_blobs():
    eps = 1e-3
    X = [[eps, 0, 0, 0], [-eps, 0, 0, 0], [10 + eps, 10, 10, 10], [10 - eps, 10, 10, 10]]
    km = pp.kmeans(make(X, [0, 0, 1, 1]))
    np.testing.assert_allclose(km.centers, [[0, 0, 0, 0], [10, 10, 10, 10]], atol=1e-12)
    assert km.converged and km.label_map == {0: 0, 1: 1}


def _check_kmeans_invariants(train, km):
    hist = np.array(km.sse_history)
    assert np.all(np.diff(hist) <= 1e-9 * max(1.0, hist[0]))
    assert km.sse == pytest.approx(hist[-1])
    # fixed point: reassignment to the final centers changes nothing
    d = ((train.X[:, None, :] - km.centers[None]) ** 2).sum(-1)
    np.testing.assert_array_equal(d.argmin(1), km.assignments)


@pytest.mark.parametrize("init", pp.KMEANS_INITS)
def test_kmeans_invariants(rng, init):
    train = make(*blob_rows(rng, 120, 90, sep=1.0))
    km = pp.kmeans(train, init=init, seed=3)
    assert km.converged and km.iterations <= 300
    _check_kmeans_invariants(train, km)


def test_kmeans_beats_fixed_class_means(rng):
    train = make(*blob_rows(rng, 150, 100, sep=0.8))
    km = pp.kmeans(train)
    c0, c1 = pp.class_averages(train)
    assert km.sse <= pp.fixed_center_sse(train.X, np.vstack([c0.features, c1.features])) + 1e-9


def test_kmeans_determinism(rng):
    train = make(*blob_rows(rng, 50, 50, sep=0.5))
    a = pp.kmeans(train, init="kmeans++", seed=9)
    b = pp.kmeans(train, init="kmeans++", seed=9)
    np.testing.assert_array_equal(a.centers, b.centers)
    np.testing.assert_array_equal(a.assignments, b.assignments)


def test_kmeans_reseeds_empty_cluster():
    # both class means coincide, so every row ties to cluster 0 and cluster 1 empties
    X = [[0, 0, 0, 0], [10, 10, 10, 10], [4.9, 4.9, 4.9, 4.9], [5.1, 5.1, 5.1, 5.1]]
    km = pp.kmeans(make(X, [0, 0, 1, 1]))
    assert len(set(km.assignments.tolist())) == 2
    _check_kmeans_invariants(make(X, [0, 0, 1, 1]), km)


def test_kmeans_max_iter_marker(rng):
    train = make(*blob_rows(rng, 100, 100, sep=0.2))
    km = pp.kmeans(train, init="kmeans++", seed=1, max_iter=1)
    assert km.iterations == 1 and not km.converged


def test_kmeans_preconditions():
    with pytest.raises(PreconditionError):
        pp.kmeans(make([[1, 2, 3, 4]], [0]))
    with pytest.raises(PreconditionError):
        pp.kmeans(make([[1, 2, 3, 4], [0, 1, 0, 1]], [0, 1]), init="random")


def test_center_for_class_when_both_clusters_vote_same():
    km = pp.KMeansResult(np.array([[0.0], [1.0]]), np.array([0, 1]), 0.0, 1, True,
                         {0: 0, 1: 0}, (0.0,))
    with pytest.raises(DegenerateSplitError):
        km.center_for_class(1)
    km = pp.KMeansResult(np.array([[0.0], [1.0]]), np.array([0, 1]), 0.0, 1, True,
                         {0: 1, 1: 0}, (0.0,))
    assert km.center_for_class(0)[0] == 1.0


# summary statistics ------------------------------------------------------------------


def test_summary_conventions():
    d = make([[1, 5], [2, 5], [3, 5], [4, 5]], [0, 1, 1, 1], names=("a", "b"))
    s = pp.summarize(d)
    assert s["features"]["a"]["50%"] == 2.5
    assert s["features"]["b"]["std"] == 0.0
    assert s["features"]["b"]["min"] == s["features"]["b"]["max"] == s["features"]["b"]["mean"] == 5
    assert s["class_counts"] == {0: 1, 1: 3}
    assert "class counts" in pp.format_summary(s)


def test_summary_matches_pandas_describe(synthetic_banknote):
    pd = pytest.importorskip("pandas")
    d = pp.load_dataset(synthetic_banknote)
    ref = pd.DataFrame(d.X, columns=d.feature_names).describe()
    s = pp.summarize(d)
    for name in d.feature_names:
        for stat in ("count", "mean", "std", "min", "25%", "50%", "75%", "max"):
            assert s["features"][name][stat] == pytest.approx(ref.loc[stat, name], rel=1e-12)


def test_summary_rejects_empty():
    with pytest.raises(PreconditionError):
        pp.summarize(make(np.zeros((0, 4)), []))


def test_dataset_invariants():
    with pytest.raises(SchemaError):
        make([[1, 2, 3, 4]], [0, 1])
    with pytest.raises(SchemaError):
        make([[1, 2, 3, 4]], [3])
    d = make([[1, 2, 3, 4]], [1])
    assert d.rows[0].label == 1


def test_written_dataset_round_trips(tmp_path, rng):
    X, y = blob_rows(rng, 5, 5)
    d = pp.load_dataset(write_csv(tmp_path / "r.csv", X, y))
    np.testing.assert_array_equal(d.X, X)
    np.testing.assert_array_equal(d.y, y)
