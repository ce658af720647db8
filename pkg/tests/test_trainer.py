from __future__ import annotations

import numpy as np
import pytest

from caliblab.trainer import (
    FIXED_SUBSAMPLE,
    FRESH_SAMPLES,
    TrainConfig,
    over_config,
    run_experiment,
    under_config,
)


def _tiny_over(**overrides):
    base = dict(regime=FIXED_SUBSAMPLE, train_size=80, test_size=60, epochs=4,
                batch_size=20, eval_every=3, learning_rate=1e-3, seed=0)
    base.update(overrides)
    return TrainConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(regime="bogus")
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(optimizer="rmsprop")


def test_trajectory_length_formula(default_task):
    # 4 epochs x 4 batches = 16 total batches
    cfg = _tiny_over(eval_every=3)  # 16 % 3 != 0 -> one extra final checkpoint
    res = run_experiment(default_task, (4,), cfg, collect_predictions=False)
    assert len(res.trajectory) == 16 // 3 + 1
    assert res.checkpoint_steps == [3, 6, 9, 12, 15, 16]

    cfg = _tiny_over(eval_every=4)  # 16 % 4 == 0 -> no extra checkpoint
    res = run_experiment(default_task, (4,), cfg, collect_predictions=False)
    assert len(res.trajectory) == 4
    assert res.checkpoint_steps == [4, 8, 12, 16]


def test_run_is_bitwise_deterministic(default_task):
    cfg = _tiny_over()
    a = run_experiment(default_task, (8,), cfg)
    b = run_experiment(default_task, (8,), cfg)
    assert a.trajectory == b.trajectory
    for wa, wb in zip(a.model.weights, b.model.weights):
        np.testing.assert_array_equal(wa, wb)
    assert a.predictions == b.predictions


def test_fixed_subsample_evaluates_exactly_the_train_records(default_task):
    cfg = _tiny_over()
    res = run_experiment(default_task, (8,), cfg)
    log = res.predictions
    train_labels_per_step = {}
    for step in res.checkpoint_steps:
        sel = (log.splits == "train") & (log.steps == step)
        train_labels_per_step[step] = log.labels[sel]
        assert int(sel.sum()) == cfg.train_size
    first = train_labels_per_step[res.checkpoint_steps[0]]
    for labels in train_labels_per_step.values():
        np.testing.assert_array_equal(labels, first)


def test_fresh_samples_change_every_epoch(default_task):
    cfg = TrainConfig(regime=FRESH_SAMPLES, samples_per_epoch=40, test_size=30,
                      epochs=3, batch_size=20, eval_every=2, learning_rate=1e-3, seed=0)
    res = run_experiment(default_task, (4,), cfg)
    log = res.predictions
    # checkpoints 2 and 4 fall in different epochs -> different fresh samples
    first = log.labels[(log.splits == "train") & (log.steps == 2)]
    second = log.labels[(log.splits == "train") & (log.steps == 4)]
    assert len(first) == len(second) == 40
    assert not np.array_equal(first, second)


def test_fresh_samples_splits_agree_within_sampling_noise(default_task):
    res = run_experiment(default_task, (8,), under_config(seed=0), collect_predictions=False)
    for p in res.trajectory:
        assert abs(p.test_error - p.train_error) <= 0.03
        assert abs(p.test_ece - p.train_ece) <= 0.03


def test_parameter_count_reported(default_task):
    res = run_experiment(default_task, (8,), _tiny_over(), collect_predictions=False)
    assert res.parameter_count == 20 * 8 + 8 + 8 * 2 + 2


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergent_run_preserves_partial_trajectory(default_task):
    cfg = _tiny_over(optimizer="sgd", learning_rate=1e100, eval_every=1)
    res = run_experiment(default_task, (8,), cfg, collect_predictions=False)
    assert res.diverged
    assert res.diverged_step is not None
    assert len(res.trajectory) < 16
    for p in res.trajectory:
        assert 0.0 <= p.train_ece <= 1.0


def test_wide_model_interpolates_the_fixed_subsample(default_task):
    # hidden 512x2, train size 1000, 400 epochs on the default task
    cfg = over_config(seed=0, epochs=400, learning_rate=1e-3, eval_every=500)
    res = run_experiment(default_task, (512, 512), cfg, collect_predictions=False)
    assert res.trajectory[-1].train_error <= 0.005


def test_cosine_schedule_endpoints():
    from caliblab.trainer import cosine_learning_rate

    assert cosine_learning_rate(0.1, 0, 100) == 0.1
    assert cosine_learning_rate(0.1, 50, 100) == pytest.approx(0.05, abs=1e-15)
    assert cosine_learning_rate(0.1, 100, 100) == pytest.approx(0.0, abs=1e-15)


def test_cosine_lr_changes_the_trajectory(default_task):
    constant = run_experiment(default_task, (8,), _tiny_over(), collect_predictions=False)
    annealed = run_experiment(default_task, (8,), _tiny_over(cosine_lr=True), collect_predictions=False)
    assert constant.trajectory != annealed.trajectory
    assert not annealed.diverged


def test_multiclass_task_trains_and_logs(default_task):
    from caliblab import make_task

    task10 = make_task(num_classes=10, seed=1)
    cfg = _tiny_over(train_size=120, test_size=60, epochs=3, eval_every=6)
    res = run_experiment(task10, (16,), cfg)
    assert not res.diverged
    assert res.predictions.num_classes == 10
    assert res.predictions.probs.shape[1] == 10
    for p in res.trajectory:
        assert 0.0 <= p.train_ece <= 1.0
        assert p.identity_holds()


def test_checkpoint_logs_group_train_and_test(default_task):
    cfg = _tiny_over(eval_every=8)
    res = run_experiment(default_task, (4,), cfg)
    log = res.predictions
    assert set(np.unique(log.splits)) == {"train", "test"}
    assert sorted(set(log.steps.tolist())) == res.checkpoint_steps
    test_count = int((log.splits == "test").sum())
    assert test_count == cfg.test_size * len(res.checkpoint_steps)
