"""
Tests for the evaluation harness.

Covers datasets, preprocessing, the split protocol, metrics, studies and
result files.
"""

import numpy as np
import pandas as pd
import pytest

from evaluation import (
    MetricsReport,
    Score,
    fitting_class_count,
    load_dataset,
    make_open_set_blobs,
    micro_f,
    nearest_centroid_predict,
    open_dataset,
    openness,
    pca_fit_transform,
    prepare_features,
    render_subclass_report,
    run_batch_size_study,
    run_epsilon_study,
    run_openness_sweep,
    select_hyperparameters,
    split_count,
    split_protocol,
    standardize,
    subclass_rows,
    subsample,
    write_metrics_csv,
    write_text,
)
from evaluation.studies import StudyConfig
from osr_project.exceptions import (
    ArtifactWriteError,
    ConfigurationError,
    DatasetError,
    EmptyGroupError,
    InvalidInputError,
)
from recognition import HyperConfig, LabeledDataset, OSRPrediction, SubclassTable


@pytest.fixture
def tiny_study():
    """Two repeats of very short chains."""
    return StudyConfig(hyper=HyperConfig(T=2, init_components=3), omega=3, repeats=2)


class TestOpenness:
    """Test the openness measure."""

    @pytest.mark.parametrize(
        "counts, expected",
        [((10, 10, 20), 0.1835), ((5, 5, 8), 0.1229), ((5, 5, 5), 0.0)],
    )
    def test_values(self, counts, expected):
        """Test reference openness values."""
        assert openness(*counts) == pytest.approx(expected, abs=5e-5)

    def test_increases_with_unknown_classes(self):
        """Test monotonicity in the number of testing classes."""
        values = [openness(5, 5, 5 + u) for u in range(10)]

        assert values == sorted(values)
        assert len(set(values)) == len(values)

    @pytest.mark.parametrize("counts", [(10, 10, 5), (0, 5, 5)])
    def test_malformed_setting_rejected(self, counts):
        """Test counts giving a ratio above one or a zero count."""
        with pytest.raises(ConfigurationError):
            openness(*counts)


class TestMicroF:
    """Test the micro-averaged F-measure over known classes."""

    def test_hand_arithmetic(self):
        """Test TP=2, FP=1, FN=1."""
        score = micro_f([0, 1, 1, 5], [0, 1, -1, 0], known_classes=[0, 1])

        assert score.precision == pytest.approx(2 / 3)
        assert score.recall == pytest.approx(2 / 3)
        assert score.f == pytest.approx(2 / 3)

    def test_perfect(self):
        """Test known instances labeled and unknown ones rejected."""
        assert micro_f([0, 1, 7, 8], [0, 1, -1, -1], [0, 1]).f == 1.0

    def test_everything_rejected(self):
        """Test that rejecting every known instance gives F=0."""
        score = micro_f([0, 1, 1], [-1, -1, -1], [0, 1])

        assert (score.recall, score.f) == (0.0, 0.0)

    def test_empty_rejected(self):
        """Test empty label lists."""
        with pytest.raises(InvalidInputError):
            micro_f([], [], [0])

    def test_matches_confusion_oracle(self):
        """Test 1000 random label pairs against direct TP/FP/FN counting."""
        rng = np.random.default_rng(0)
        known = [0, 1, 2]
        for _ in range(1000):
            n = int(rng.integers(1, 30))
            y_true = rng.integers(0, 5, n)
            y_pred = rng.choice([-1, 0, 1, 2, 3], n)

            in_known = np.isin(y_pred, known)
            tp = int(np.sum((y_true == y_pred) & in_known))
            fp = int(np.sum(in_known)) - tp
            fn = int(np.sum(np.isin(y_true, known))) - tp
            precision = tp / (tp + fp) if tp + fp else 0.0
            recall = tp / (tp + fn) if tp + fn else 0.0
            f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0

            score = micro_f(y_true, y_pred, known)
            assert score.precision == pytest.approx(precision, abs=1e-12)
            assert score.recall == pytest.approx(recall, abs=1e-12)
            assert score.f == pytest.approx(f, abs=1e-12)


class TestMetricsReport:
    """Test aggregation across repeats."""

    def test_aggregates(self):
        """Test mean and population standard deviation."""
        report = MetricsReport(
            axis="openness",
            value=0.1,
            scenario="open",
            n_unknown=1,
            openness=0.1,
            seed=3,
            scores=(Score(0.5, 0.5, 0.5), Score(1.0, 1.0, 1.0)),
        )

        assert report.repeats == 2
        assert report.mean_f == pytest.approx(0.75)
        assert report.std_f == pytest.approx(0.25)
        assert report.as_row()["openness"] == 0.1


class TestSplitProtocol:
    """Test the randomized partitioning."""

    @pytest.mark.parametrize("omega, expected", [(10, 5), (5, 3), (3, 2), (1, 1)])
    def test_fitting_class_count(self, omega, expected):
        """Test floor(omega / 2 + 0.5)."""
        assert fitting_class_count(omega) == expected

    def test_split_count(self):
        """Test the 60/40 cut rounded half up."""
        assert split_count(100) == 60
        assert split_count(5) == 3
        assert split_count(7) == 4

    def test_partition(self, blobs):
        """Test sizes and disjointness of the parts."""
        plan = split_protocol(blobs, omega=3, seed=0)

        assert plan.omega == 3
        assert len(plan.unknown_classes) == 2
        assert not set(plan.known_classes) & set(plan.unknown_classes)
        assert len(plan.train) == 3 * 60
        assert len(plan.test_known) == 3 * 40
        assert len(plan.test) == 3 * 40 + 2 * 100
        assert not set(plan.train) & set(plan.test)
        assert set(blobs.labels[plan.train]) == set(plan.known_classes)

    def test_fitting_simulations(self, blobs):
        """Test the closed-set and open-set simulations inside the training set."""
        plan = split_protocol(blobs, omega=3, seed=0)
        train = set(plan.train)

        assert len(plan.fit_known_classes) == 2
        assert set(plan.fitting) <= train
        assert not set(plan.fitting) & set(plan.closed_sim)
        assert set(blobs.labels[plan.fitting]) == set(plan.fit_known_classes)
        assert set(plan.closed_sim) < set(plan.open_sim) <= train
        assert set(blobs.labels[plan.open_sim]) == set(plan.known_classes)
        assert len(plan.fitting) == 2 * split_count(60)

    def test_reproducible(self, blobs):
        """Test that a seed fixes the partition."""
        first = split_protocol(blobs, 3, seed=5)
        second = split_protocol(blobs, 3, seed=5)
        other = split_protocol(blobs, 3, seed=6)

        np.testing.assert_array_equal(first.train, second.train)
        assert first.unknown_classes == second.unknown_classes
        assert not np.array_equal(first.train, other.train)

    def test_test_with_unknown(self, blobs):
        """Test adding unknown classes to the known test instances."""
        plan = split_protocol(blobs, 3, seed=0)

        np.testing.assert_array_equal(plan.test_with_unknown(blobs, 0), plan.test_known)
        rows = plan.test_with_unknown(blobs, 1)
        assert len(rows) == 3 * 40 + 100
        assert set(blobs.labels[rows]) == set(plan.known_classes) | {plan.unknown_classes[0]}

        with pytest.raises(ConfigurationError):
            plan.test_with_unknown(blobs, 3)

    def test_too_few_classes_rejected(self, blobs):
        """Test omega not smaller than the number of classes."""
        with pytest.raises(ConfigurationError):
            split_protocol(blobs, omega=5, seed=0)

    def test_small_known_class_rejected(self):
        """Test a known class with fewer than 5 instances."""
        labels = np.array([0] * 3 + [1] * 3 + [2] * 20)
        dataset = LabeledDataset(np.random.default_rng(0).normal(size=(26, 2)), labels)

        with pytest.raises(EmptyGroupError):
            split_protocol(dataset, omega=2, seed=0)


class TestPreprocessing:
    """Test scaling and PCA fitted on training rows."""

    def test_isotropic_keeps_all_components(self, rng):
        """Test that isotropic 2-d data keeps both components at 95%."""
        train = rng.normal(size=(500, 2))

        projected, _, projection = pca_fit_transform(train, retain=0.95)

        assert projection.k == 2
        assert projected.shape == (500, 2)

    def test_collinear_keeps_one_component(self, rng):
        """Test that rank-one data keeps a single component."""
        x = rng.normal(size=(100, 1))
        train = np.hstack([x, 2 * x])
        test = np.array([[1.0, 2.0], [0.0, 0.0]])

        projected, (applied,), projection = pca_fit_transform(train, [test], retain=0.95)

        assert projection.k == 1
        assert projection.retained == pytest.approx(1.0)
        assert applied.shape == (2, 1)
        assert projected.shape == (100, 1)

    def test_zero_variance(self, caplog):
        """Test constant training data."""
        with caplog.at_level("WARNING", logger="evaluation.preprocessing"):
            _, _, projection = pca_fit_transform(np.ones((10, 3)))

        assert projection.k == 1
        assert "zero variance" in caplog.text

    def test_invalid_retain_rejected(self, rng):
        """Test retain outside (0, 1]."""
        with pytest.raises(InvalidInputError):
            pca_fit_transform(rng.normal(size=(10, 2)), retain=1.5)

    def test_standardize_uses_training_statistics(self, rng):
        """Test that test rows are scaled with the training mean and deviation."""
        train = rng.normal(5.0, 2.0, size=(200, 2))

        scaled_train, scaled_test, empty = standardize(train, train[:3], np.empty((0, 2)))

        np.testing.assert_allclose(scaled_train.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(scaled_train.std(axis=0), 1.0)
        np.testing.assert_allclose(scaled_test, scaled_train[:3])
        assert empty.shape == (0, 2)

    def test_prepare_features(self, rng):
        """Test scaling followed by PCA."""
        x = rng.normal(size=(50, 1))
        train = np.hstack([x, -x, rng.normal(0, 1e-3, size=(50, 1))])

        train_p, (test_p,) = prepare_features(train, [train[:5]], scale=False, retain=0.9)

        assert train_p.shape == (50, 1)
        assert test_p.shape == (5, 1)


class TestDatasets:
    """Test dataset loading and synthetic data."""

    def test_dense_file(self, dataset_file, blobs):
        """Test a comma-separated file with the label first."""
        dataset = load_dataset(dataset_file)

        assert (dataset.n, dataset.d) == (500, 2)
        np.testing.assert_array_equal(dataset.labels, blobs.labels)
        np.testing.assert_allclose(dataset.features, blobs.features, atol=1e-7)

    def test_dense_with_header_and_whitespace(self, tmp_path):
        """Test a whitespace-separated file with a header row."""
        path = tmp_path / "data.txt"
        path.write_text("label f1 f2\n1 0.5 1.5\n2 2.5 3.5\n")

        dataset = load_dataset(path, "dense")

        np.testing.assert_array_equal(dataset.labels, [1, 2])
        np.testing.assert_allclose(dataset.features, [[0.5, 1.5], [2.5, 3.5]])

    def test_sparse_file(self, tmp_path):
        """Test label index:value rows."""
        path = tmp_path / "data.svm"
        path.write_text("3 1:0.5 3:2.0\n4 2:1.0\n")

        dataset = load_dataset(path)

        np.testing.assert_array_equal(dataset.labels, [3, 4])
        np.testing.assert_allclose(dataset.features, [[0.5, 0.0, 2.0], [0.0, 1.0, 0.0]])

    def test_non_integer_labels_rejected(self, tmp_path):
        """Test fractional class labels."""
        path = tmp_path / "data.csv"
        path.write_text("0.5,1.0\n1,2.0\n")

        with pytest.raises(DatasetError):
            load_dataset(path)

    def test_missing_values_rejected(self, tmp_path):
        """Test a non-numeric cell in the data rows."""
        path = tmp_path / "data.csv"
        path.write_text("0,1.0\n1,abc\n0,2.0\n")

        with pytest.raises(DatasetError):
            load_dataset(path)

    def test_missing_file_rejected(self, tmp_path):
        """Test a path that does not exist."""
        with pytest.raises(DatasetError):
            load_dataset(tmp_path / "absent.csv")

    def test_unknown_format_rejected(self, dataset_file):
        """Test an unsupported format name."""
        with pytest.raises(DatasetError):
            load_dataset(dataset_file, "parquet")

    def test_synthetic_blobs(self):
        """Test shape and labels of the ring of blobs."""
        dataset = make_open_set_blobs(4, n_per_class=30, d=3, seed=1)

        assert (dataset.n, dataset.d) == (120, 3)
        np.testing.assert_array_equal(np.bincount(dataset.labels), [30, 30, 30, 30])

    def test_synthetic_source(self):
        """Test the synthetic:<classes> source and a malformed one."""
        assert len(open_dataset("synthetic:6").classes) == 6

        with pytest.raises(DatasetError):
            open_dataset("synthetic:many")

    def test_subsample_is_stratified(self, blobs):
        """Test class balance of a subsample."""
        small = subsample(blobs, 100, seed=0)

        assert small.n == 100
        np.testing.assert_array_equal(np.bincount(small.labels), [20] * 5)
        assert subsample(blobs, None) is blobs
        assert subsample(blobs, 10_000) is blobs


class TestBaseline:
    """Test the closed-set reference classifier."""

    def test_never_rejects(self, open_set_split):
        """Test that every prediction is a training class."""
        train, test = open_set_split

        predicted = nearest_centroid_predict(train, test.features)

        assert set(predicted) <= {0, 1, 2}
        known = np.isin(test.labels, [0, 1, 2])
        assert np.mean(predicted[known] == test.labels[known]) > 0.95


class TestStudies:
    """Test the experiment drivers at a tiny scale."""

    def test_openness_sweep(self, blobs, tiny_study):
        """Test one report per unknown count with matching openness."""
        reports = run_openness_sweep(blobs, tiny_study, [0, 2])

        assert [r.n_unknown for r in reports] == [0, 2]
        assert [r.scenario for r in reports] == ["closed", "open"]
        assert reports[0].value == 0.0
        assert reports[1].value == pytest.approx(openness(3, 3, 5))
        assert all(r.repeats == 2 for r in reports)
        assert all(0.0 <= r.mean_f <= 1.0 for r in reports)

    def test_sweep_with_baseline(self, blobs, tiny_study):
        """Test baseline rows next to the recognizer rows."""
        study = StudyConfig(
            hyper=tiny_study.hyper, omega=3, repeats=1, baseline=True
        )

        reports = run_openness_sweep(blobs, study, [1])

        assert [r.method for r in reports] == ["cdosr", "nearest_centroid"]

    def test_sweep_reproducible(self, blobs, tiny_study):
        """Test equal results for equal root seeds."""
        first = run_openness_sweep(blobs, tiny_study, [1])
        second = run_openness_sweep(blobs, tiny_study, [1])

        assert first[0].scores == second[0].scores

    def test_empty_counts_rejected(self, blobs, tiny_study):
        """Test an empty list of unknown counts."""
        with pytest.raises(ConfigurationError):
            run_openness_sweep(blobs, tiny_study, [])

    def test_batch_size_study(self, blobs, tiny_study):
        """Test one report per batch fraction."""
        reports = run_batch_size_study(blobs, tiny_study, [0.5, 1.0])

        assert [r.value for r in reports] == [0.5, 1.0]
        assert all(r.n_unknown == 2 for r in reports)

    def test_invalid_fraction_rejected(self, blobs, tiny_study):
        """Test a zero batch fraction."""
        with pytest.raises(ConfigurationError):
            run_batch_size_study(blobs, tiny_study, [0.0])

    def test_epsilon_study(self, blobs, tiny_study):
        """Test closed-set and open-set reports per threshold."""
        reports = run_epsilon_study(blobs, tiny_study, [0.0, 0.01], n_unknown=1)

        assert [(r.scenario, r.value) for r in reports] == [
            ("closed", 0.0),
            ("closed", 0.01),
            ("open", 0.0),
            ("open", 0.01),
        ]
        assert reports[0].openness == 0.0

    def test_select_hyperparameters(self, blobs, tiny_study):
        """Test the grid rows and the selected point."""
        result = select_hyperparameters(blobs, tiny_study, nu_span=1, varsigma_grid=[0.5, 1.0])

        assert len(result.rows) == 4
        assert [row["nu"] for row in result.rows] == [2, 2, 3, 3]
        assert result.score == max(row["score"] for row in result.rows)
        assert result.nu == 2 + result.nu_offset
        assert result.varsigma in (0.5, 1.0)

    def test_invalid_repeats_rejected(self):
        """Test zero repeats."""
        with pytest.raises(ConfigurationError):
            StudyConfig(repeats=0)


class TestReports:
    """Test result files."""

    def _prediction(self):
        tables = [
            SubclassTable(group=0, label=0, size=10, counts={0: 9, 1: 1}, kept=(0,)),
            SubclassTable(
                group=1, label=None, size=10, counts={0: 6, 3: 2, 4: 2}, kept=(0, 3, 4)
            ),
        ]
        return OSRPrediction(outcomes=(), tables=tables, delta=2)

    def _reports(self):
        return [
            MetricsReport(
                axis="openness",
                value=0.0,
                scenario="closed",
                n_unknown=0,
                openness=0.0,
                seed=0,
                scores=(Score(1.0, 0.9, 0.947),),
            )
        ]

    def test_metrics_csv(self, tmp_path):
        """Test the config header and the columns."""
        path = write_metrics_csv(self._reports(), tmp_path / "out" / "sweep.csv", {"seed": 0})

        lines = path.read_text().splitlines()
        assert lines[0] == '# config={"seed": 0}'
        frame = pd.read_csv(path, comment="#")
        assert list(frame.columns[:3]) == ["openness", "scenario", "method"]
        assert frame["mean_f"].iloc[0] == pytest.approx(0.947)

    def test_metrics_csv_deterministic(self, tmp_path):
        """Test byte-identical files for identical inputs."""
        first = write_metrics_csv(self._reports(), tmp_path / "a.csv", {"seed": 1})
        second = write_metrics_csv(self._reports(), tmp_path / "b.csv", {"seed": 1})

        assert first.read_bytes() == second.read_bytes()

    def test_subclass_rows(self):
        """Test raw and pruned proportions per subclass."""
        rows = subclass_rows(self._prediction())

        assert rows[0] == {
            "group": 0,
            "label": 0,
            "subclass": 0,
            "count": 9,
            "proportion": 0.9,
            "pruned_proportion": 0.9,
        }
        assert rows[1]["pruned_proportion"] is None
        assert len(rows) == 5

    def test_subclass_report(self):
        """Test the per-class block, the test summary and the estimate."""
        text = render_subclass_report(self._prediction(), {"seed": 0})

        assert text.startswith("# config=")
        assert "Class 0 (n=10)" in text
        assert "Test batch: 3 subclasses; known 1 (60.00%); new 2 (40.00%)" in text
        assert text.rstrip().endswith("estimated unknown classes: 2")

    def test_write_failure(self, tmp_path):
        """Test writing below a regular file."""
        blocker = tmp_path / "file"
        blocker.write_text("")

        with pytest.raises(ArtifactWriteError):
            write_text(blocker / "out.csv", "x")
