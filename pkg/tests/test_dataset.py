from __future__ import annotations

import numpy as np
import pytest

from caliblab import Dataset, PredictionRecord, concat_datasets


def test_binary_construction_and_views():
    d = Dataset.from_binary([0.9, 0.2], [1, 0])
    assert len(d) == 2
    assert d.num_classes == 2
    assert d.is_binary
    conf, outcome = d.calibration_pairs()
    assert conf.tolist() == [0.9, 0.2]
    assert outcome.tolist() == [1.0, 0.0]
    np.testing.assert_allclose(d.full_probs(), [[0.1, 0.9], [0.8, 0.2]])


def test_multiclass_top_label_reduction():
    d = Dataset([[0.2, 0.5, 0.3], [0.6, 0.1, 0.3]], [1, 2])
    conf, correct = d.calibration_pairs()
    assert conf.tolist() == [0.5, 0.6]
    assert correct.tolist() == [1.0, 0.0]
    assert d.predicted_labels().tolist() == [1, 0]


def test_binary_tie_predicts_class_zero():
    d = Dataset.from_binary([0.5, 0.51], [1, 1])
    assert d.predicted_labels().tolist() == [0, 1]


def test_probability_validation():
    with pytest.raises(ValueError):
        Dataset.from_binary([1.2], [1])
    with pytest.raises(ValueError):
        Dataset.from_binary([-0.1], [0])
    with pytest.raises(ValueError):
        Dataset([[0.7, 0.7]], [0])  # rows must sum to 1
    with pytest.raises(ValueError):
        Dataset.from_binary([float("nan")], [0])
    # a 1e-10 deviation is inside the documented tolerance
    Dataset([[0.5 + 5e-11, 0.5]], [0])


def test_label_validation():
    with pytest.raises(ValueError):
        Dataset.from_binary([0.5], [2])
    with pytest.raises(ValueError):
        Dataset([[0.3, 0.3, 0.4]], [3])
    with pytest.raises(ValueError):
        Dataset.from_binary([0.5], [-1])


def test_steps_and_splits_validation():
    d = Dataset.from_binary([0.5, 0.6], [0, 1], steps=[0, 0], splits=["train", "test"])
    assert d.steps.tolist() == [0, 0]
    assert list(d.splits) == ["train", "test"]
    with pytest.raises(ValueError):
        Dataset.from_binary([0.5], [0], splits=["validation"])
    with pytest.raises(ValueError):
        Dataset.from_binary([0.5], [0], steps=[-1])
    with pytest.raises(ValueError):
        Dataset.from_binary([0.5, 0.6], [0, 1], steps=[1])


def test_records_round_trip():
    d = Dataset([[0.2, 0.5, 0.3], [0.6, 0.1, 0.3]], [1, 2],
                steps=[5, 5], splits=["train", "train"])
    records = d.records()
    assert records[0] == PredictionRecord(label=1, probs=(0.2, 0.5, 0.3), step=5, split="train")
    assert Dataset.from_records(records) == d


def test_from_records_rejects_mixed_widths():
    with pytest.raises(ValueError):
        Dataset.from_records([
            PredictionRecord(label=0, probs=(0.5,)),
            PredictionRecord(label=1, probs=(0.5, 0.5)),
        ])
    with pytest.raises(ValueError):
        Dataset.from_records([])


def test_arrays_are_immutable():
    d = Dataset.from_binary([0.5], [0])
    with pytest.raises(ValueError):
        d.probs[0, 0] = 0.9
    with pytest.raises(ValueError):
        d.labels[0] = 1


def test_order_is_preserved():
    conf = [0.1, 0.9, 0.4]
    d = Dataset.from_binary(conf, [0, 1, 0])
    assert d.probs[:, 0].tolist() == conf


def test_concat():
    a = Dataset.from_binary([0.1], [0])
    b = Dataset.from_binary([0.9], [1])
    both = concat_datasets([a, b])
    assert len(both) == 2
    assert both.probs[:, 0].tolist() == [0.1, 0.9]
    with pytest.raises(ValueError):
        concat_datasets([a, Dataset([[0.2, 0.3, 0.5]], [2])])
    with pytest.raises(ValueError):
        concat_datasets([])


def test_empty_dataset_is_constructible_but_metrics_reject_it():
    d = Dataset(np.zeros((0, 3)), [])
    assert len(d) == 0
    assert d.num_classes == 3
