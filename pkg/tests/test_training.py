import csv
import math

import numpy as np
import pytest

import fewgest as fg
from fewgest import training as tr
from fewgest.checkpoint import load_checkpoint, save_checkpoint
from fewgest.data import partition_by_class
from fewgest.errors import InvalidInputError, TrainingDivergedError
from fewgest.training import EvalReport, TrainConfig, evaluate, meta_train, sweep


def _datasets(n_classes=12, samples=8, sigma=0.0, seed=5, split=(6, 6)):
    ds = fg.gen_synthetic(n_classes, samples, noise_sigma=sigma, seed=seed)
    return partition_by_class(ds, split, seed=seed)


def _small_config(episodes, seed=5, **kw):
    defaults = dict(
        spec=fg.EpisodeSpec(5, 1, 2, seed=seed),
        episodes=episodes,
        eval_every=0,
        val_episodes=20,
        seed=seed,
        hidden_size=32,
        relation_sizes=(64, 32),
    )
    defaults.update(kw)
    return TrainConfig(**defaults)


def test_zero_episodes_rejected():
    with pytest.raises(InvalidInputError):
        _small_config(episodes=0)


def test_history_length_equals_episodes():
    train_set, val_set = _datasets()
    cfg = _small_config(episodes=12, eval_every=5)
    res = meta_train(train_set, val_set, cfg)
    assert len(res.history) == 12
    assert [h.episode for h in res.history] == list(range(12))
    for h in res.history:
        assert math.isclose(h.loss_rmse, math.sqrt(h.loss_mse))


def test_noiseless_classes_converge_quickly():
    # Separable sigma=0 classes: training loss must fall below 0.01 well
    # inside the documented 2,000-episode budget.
    train_set, val_set = _datasets(sigma=0.0)
    cfg = _small_config(episodes=500)
    res = meta_train(train_set, val_set, cfg)
    assert min(h.loss_mse for h in res.history) < 0.01


def test_validation_entries_and_best_retention():
    train_set, val_set = _datasets()
    cfg = _small_config(episodes=20, eval_every=5, val_episodes=10)
    res = meta_train(train_set, val_set, cfg)
    val_points = [h.val_accuracy for h in res.history if h.val_accuracy is not None]
    assert len(val_points) == 4
    # retained checkpoint is at least as good as every observed validation
    assert res.best_val_accuracy >= max(val_points)
    assert res.best_val_accuracy >= val_points[-1]


def test_diverged_loss_carries_episode_index(monkeypatch):
    train_set, val_set = _datasets()
    calls = []

    def fake_loss(episode, params):
        calls.append(1)
        if len(calls) >= 3:
            return float("nan"), None, None
        n = episode.n_way
        scores = np.full((len(episode.query), n), 0.5, dtype=np.float32)
        grads = [np.zeros_like(p) for p in params.param_list()]
        return 0.25, scores, grads

    monkeypatch.setattr(tr, "episode_loss_and_grads", fake_loss)
    cfg = _small_config(episodes=10)
    with pytest.raises(TrainingDivergedError) as exc:
        meta_train(train_set, val_set, cfg)
    assert exc.value.episode == 2


def test_evaluate_chance_level_with_zero_params():
    from conftest import tiny_relation_params

    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32)
    for p in params.param_list():
        p[...] = 0
    ds = fg.gen_synthetic(8, 4, noise_sigma=0.02, seed=3)
    report = evaluate(params, ds, fg.EpisodeSpec(5, 1, 5, seed=1),
                      n_episodes=1000, seed=1)
    assert 0.16 <= report.accuracy <= 0.24
    assert report.episodes == 1000
    # all scores are 0.5, so every episode's RMSE is sqrt(mse(0.5, onehot))
    assert abs(report.mean_rmse - 0.5) < 1e-6


def test_evaluate_deterministic_and_json_roundtrip():
    train_set, val_set = _datasets(sigma=0.02)
    cfg = _small_config(episodes=30)
    res = meta_train(train_set, val_set, cfg)
    r1 = evaluate(res.params, val_set, cfg.spec, n_episodes=50, seed=9)
    r2 = evaluate(res.params, val_set, cfg.spec, n_episodes=50, seed=9)
    assert r1 == r2
    assert EvalReport.from_json(r1.to_json()) == r1
    r3 = evaluate(res.params, val_set, cfg.spec, n_episodes=50, seed=10)
    assert r3 != r1


def test_evaluate_per_class_accuracy_covers_eligible_classes():
    train_set, val_set = _datasets(sigma=0.02)
    cfg = _small_config(episodes=30)
    res = meta_train(train_set, val_set, cfg)
    report = evaluate(res.params, val_set, cfg.spec, n_episodes=200, seed=2)
    assert set(report.per_class_accuracy) == set(val_set.classes)
    for acc in report.per_class_accuracy.values():
        assert 0.0 <= acc <= 1.0
    # overall accuracy is the sample-weighted mean of the per-class table
    assert abs(report.ci95_halfwidth
               - 1.96 * math.sqrt(report.accuracy * (1 - report.accuracy) / 200)) < 1e-12


def test_checkpoint_roundtrip_evaluation_is_bit_identical(tmp_path):
    train_set, val_set = _datasets(sigma=0.02)
    cfg = _small_config(episodes=40)
    res = meta_train(train_set, val_set, cfg)
    before = evaluate(res.params, val_set, cfg.spec, n_episodes=60, seed=4)
    path = tmp_path / "m.rnck"
    save_checkpoint(res.params, path, episode_seed=cfg.seed)
    loaded, _ = load_checkpoint(path)
    after = evaluate(loaded, val_set, cfg.spec, n_episodes=60, seed=4)
    assert before == after


def test_meta_train_deterministic_checkpoint_bytes(tmp_path):
    train_set, val_set = _datasets(sigma=0.02)
    cfg = _small_config(episodes=25, eval_every=10, val_episodes=10)
    p1, p2 = tmp_path / "a.rnck", tmp_path / "b.rnck"
    save_checkpoint(meta_train(train_set, val_set, cfg).params, p1)
    save_checkpoint(meta_train(train_set, val_set, cfg).params, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_sweep_single_config_ranks_first():
    train_set, val_set = _datasets()
    cfg = _small_config(episodes=10)
    ranked = sweep([cfg], train_set, val_set)
    assert len(ranked) == 1 and ranked[0].config is cfg


def test_sweep_tie_breaks_by_param_count(monkeypatch):
    train_set, val_set = _datasets()
    big = _small_config(episodes=5, hidden_size=32, relation_sizes=(64, 32))
    small = _small_config(episodes=5, hidden_size=16, relation_sizes=(32,))

    from fewgest.relation import init_relation_net

    def fake_train(train, val, config):
        params = init_relation_net(hidden_size=config.hidden_size,
                                   relation_sizes=config.relation_sizes)
        report = EvalReport(5, 1, 10, 0.5, 0.0, {}, mean_rmse=0.25, seed=0)
        return tr.TrainResult(params=params, history=[], val_report=report)

    monkeypatch.setattr(tr, "meta_train", fake_train)
    ranked = sweep([big, small], train_set, val_set)
    assert ranked[0].config is small and ranked[1].config is big
    assert ranked[0].param_count < ranked[1].param_count


def test_sweep_requires_configs():
    with pytest.raises(InvalidInputError):
        sweep([], None, None)


def test_sweep_ranking_deterministic():
    train_set, val_set = _datasets()
    configs = [_small_config(episodes=5, seed=s) for s in (3, 4)]
    first = sweep(configs, train_set, val_set)
    second = sweep(configs, train_set, val_set)
    assert [e.config.seed for e in first] == [e.config.seed for e in second]
    assert [e.val_rmse for e in first] == [e.val_rmse for e in second]


def test_history_csv_format(tmp_path):
    history = [
        tr.HistoryEntry(0, 0.25, 0.5, None),
        tr.HistoryEntry(1, 0.16, 0.4, 0.75),
    ]
    path = tmp_path / "h.csv"
    tr.write_history_csv(history, path)
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[0] == ["episode", "loss_mse", "loss_rmse", "val_accuracy"]
    assert rows[1] == ["0", "0.25", "0.5", ""]
    assert rows[2] == ["1", "0.16", "0.4", "0.75"]
