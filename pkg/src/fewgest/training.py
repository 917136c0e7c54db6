"""Episodic meta-training, the fixed evaluation protocol and a small
configuration sweep."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import nn
from .episodes import EpisodeSpec, sample_episode
from .errors import InvalidInputError, TrainingDivergedError
from .relation import (
    DEFAULT_HIDDEN,
    DEFAULT_RELATION,
    embed,
    episode_loss_and_grads,
    init_relation_net,
    pool_support,
    predict,
    scores_from_features,
)


@dataclass
class TrainConfig:
    """Meta-training settings; defaults are sized for desk-scale runs."""

    spec: EpisodeSpec
    episodes: int = 20000
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    eval_every: int = 500
    val_episodes: int = 100
    seed: int = 0
    hidden_size: int = DEFAULT_HIDDEN
    relation_sizes: tuple = DEFAULT_RELATION
    pool: str = "sum"
    clip_norm: float = 5.0

    def __post_init__(self):
        if self.episodes < 1:
            raise InvalidInputError(f"episodes must be >= 1, got {self.episodes}")
        if self.learning_rate <= 0:
            raise InvalidInputError("learning_rate must be positive")


@dataclass
class HistoryEntry:
    episode: int
    loss_mse: float
    loss_rmse: float
    val_accuracy: float | None = None


@dataclass
class EvalReport:
    """Accuracy over a fixed stream of evaluation episodes."""

    n_way: int
    k_shot: int
    episodes: int
    accuracy: float
    ci95_halfwidth: float
    per_class_accuracy: dict
    mean_rmse: float
    seed: int

    def to_json(self):
        return json.dumps({
            "n_way": self.n_way,
            "k_shot": self.k_shot,
            "episodes": self.episodes,
            "accuracy": self.accuracy,
            "ci95_halfwidth": self.ci95_halfwidth,
            "per_class_accuracy": {k: self.per_class_accuracy[k]
                                   for k in sorted(self.per_class_accuracy)},
            "mean_rmse": self.mean_rmse,
            "seed": self.seed,
        }, indent=2)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(
            n_way=obj["n_way"], k_shot=obj["k_shot"], episodes=obj["episodes"],
            accuracy=obj["accuracy"], ci95_halfwidth=obj["ci95_halfwidth"],
            per_class_accuracy=dict(obj["per_class_accuracy"]),
            mean_rmse=obj["mean_rmse"], seed=obj["seed"],
        )


@dataclass
class TrainResult:
    params: object
    history: list
    val_report: EvalReport

    @property
    def best_val_accuracy(self):
        return self.val_report.accuracy


def evaluate(params, test_set, spec, n_episodes=1000, seed=0):
    """Accuracy, 95% CI and per-class accuracy over n_episodes episodes.

    Evaluation episodes use one query per class. Embeddings are computed
    once per sample on the isolated scoring path, so the report is fully
    determined by (params, test_set, spec, n_episodes, seed).
    """
    if n_episodes < 1:
        raise InvalidInputError("n_episodes must be >= 1")
    eval_spec = spec.with_queries(1).with_seed(seed)
    feat = {s.sample_id: embed(s, params) for s in test_set.samples}

    correct = 0
    total = 0
    per_class = {}
    rmse_sum = 0.0
    for ep in range(n_episodes):
        episode = sample_episode(test_set, eval_spec, ep)
        pooled = [
            pool_support(np.stack([feat[s.sample_id] for s in shots]), params.pool)
            for shots in episode.support
        ]
        qfeats = [feat[s.sample_id] for s in episode.query]
        scores = scores_from_features(pooled, qfeats, params)
        pred = predict(scores)
        targets = nn.one_hot(episode.query_labels, episode.n_way, dtype=scores.dtype)
        rmse_sum += math.sqrt(nn.mse_loss(scores, targets))
        for qi, label_idx in enumerate(episode.query_labels):
            label = episode.class_order[int(label_idx)]
            hit = int(pred[qi]) == int(label_idx)
            correct += hit
            total += 1
            c = per_class.setdefault(label, [0, 0])
            c[0] += hit
            c[1] += 1

    accuracy = correct / total
    ci95 = 1.96 * math.sqrt(accuracy * (1.0 - accuracy) / n_episodes)
    return EvalReport(
        n_way=spec.n_way,
        k_shot=spec.k_shot,
        episodes=n_episodes,
        accuracy=accuracy,
        ci95_halfwidth=ci95,
        per_class_accuracy={k: v[0] / v[1] for k, v in per_class.items()},
        mean_rmse=rmse_sum / n_episodes,
        seed=seed,
    )


def meta_train(train_set, val_set, config):
    """Episodic meta-training with best-validation checkpoint retention.

    Per episode: sample, forward, MSE loss, backprop, clipped Adam step.
    Every eval_every episodes (and once after the last episode) the
    current weights are evaluated on val_set; the best-scoring copy is
    returned together with the full loss history.
    """
    params = init_relation_net(
        hidden_size=config.hidden_size,
        relation_sizes=tuple(config.relation_sizes),
        pool=config.pool,
        seed=config.seed,
    )
    plist = params.param_list()
    adam = nn.init_adam(plist, alpha=config.learning_rate, beta1=config.beta1,
                        beta2=config.beta2, eps=config.eps)
    history = []
    best_params = None
    best_report = None

    def run_validation():
        nonlocal best_params, best_report
        report = evaluate(params, val_set, config.spec,
                          n_episodes=config.val_episodes, seed=config.seed)
        if best_report is None or report.accuracy > best_report.accuracy:
            best_params = params.copy()
            best_report = report
        return report

    for ep in range(config.episodes):
        episode = sample_episode(train_set, config.spec, ep)
        loss, _, grads = episode_loss_and_grads(episode, params)
        if not math.isfinite(loss):
            raise TrainingDivergedError(f"non-finite loss at episode {ep}", episode=ep)
        nn.clip_global_norm(grads, config.clip_norm)
        try:
            nn.adam_update(plist, grads, adam)
        except TrainingDivergedError as exc:
            raise TrainingDivergedError(
                f"non-finite gradient at episode {ep}", episode=ep
            ) from exc
        val_acc = None
        if config.eval_every and (ep + 1) % config.eval_every == 0:
            val_acc = run_validation().accuracy
        history.append(HistoryEntry(ep, loss, math.sqrt(loss), val_acc))

    if history[-1].val_accuracy is None:
        # Make sure the final weights are also considered for retention.
        run_validation()
    return TrainResult(params=best_params, history=history, val_report=best_report)


@dataclass
class RankedResult:
    config: TrainConfig
    result: TrainResult
    val_rmse: float
    param_count: int


def sweep(configs, train_set, val_set):
    """Train every config and rank by validation RMSE, then model size.

    Ties on RMSE go to the smaller parameter count.
    """
    if not configs:
        raise InvalidInputError("sweep needs at least one config")
    entries = []
    for cfg in configs:
        res = meta_train(train_set, val_set, cfg)
        entries.append(RankedResult(
            config=cfg,
            result=res,
            val_rmse=res.val_report.mean_rmse,
            param_count=res.params.param_count(),
        ))
    entries.sort(key=lambda e: (e.val_rmse, e.param_count))
    return entries


def write_history_csv(history, path):
    """Training history as CSV: episode,loss_mse,loss_rmse,val_accuracy."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("episode,loss_mse,loss_rmse,val_accuracy\n")
        for h in history:
            val = "" if h.val_accuracy is None else repr(h.val_accuracy)
            fh.write(f"{h.episode},{h.loss_mse!r},{h.loss_rmse!r},{val}\n")
