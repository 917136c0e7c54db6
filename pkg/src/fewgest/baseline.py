"""Fixed-architecture reference classifier, the powers-of-two sample
sweep against a few-shot evaluation report, and the savings arithmetic.

The reference model mirrors the few-shot backbone on purpose: one LSTM
cell of size 64, one feed-forward layer of size 256 with ReLU, and a
softmax head over the task's classes. It is trained conventionally with
cross-entropy on an increasing number of samples per class to find the
first training-set size whose accuracy beats the few-shot model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import nn
from .data import FRAME_DIM, make_rng
from .errors import CapacityError, InvalidInputError
from .relation import _TAG_INIT

SML_HIDDEN = 64
SML_FF = 256

# Samples per class tried by the sweep, in order.
SWEEP_POINTS = (1, 2, 4, 8, 16, 32, 64, 128, 256, 512)

_TAG_SML_POOLS = 7
_TAG_SML_SHUFFLE = 8


class SmlParams:
    """Reference classifier weights; layer sizes are fixed by design."""

    __slots__ = ("lstm", "dense1", "out")

    def __init__(self, lstm, dense1, out):
        if lstm.hidden_size != SML_HIDDEN or dense1.out_size != SML_FF:
            raise InvalidInputError(
                f"reference architecture is fixed at LSTM {SML_HIDDEN} + FF {SML_FF}"
            )
        if dense1.in_size != lstm.hidden_size or out.in_size != dense1.out_size:
            raise InvalidInputError("reference layer sizes are inconsistent")
        if out.activation != "softmax":
            raise InvalidInputError("output layer must be softmax")
        self.lstm = lstm
        self.dense1 = dense1
        self.out = out

    @property
    def n_classes(self):
        return self.out.out_size

    def param_list(self):
        return [*self.lstm.param_list(), *self.dense1.param_list(),
                *self.out.param_list()]

    def param_count(self):
        return nn.param_count(self.param_list())

    def copy(self):
        lstm = nn.LstmParams(self.lstm.input_size, self.lstm.hidden_size,
                             self.lstm.W.copy(), self.lstm.U.copy(), self.lstm.b.copy())
        d1 = nn.DenseParams(self.dense1.in_size, self.dense1.out_size,
                            self.dense1.W.copy(), self.dense1.b.copy(),
                            self.dense1.activation)
        out = nn.DenseParams(self.out.in_size, self.out.out_size,
                             self.out.W.copy(), self.out.b.copy(), self.out.activation)
        return SmlParams(lstm, d1, out)


def init_sml(n_classes, seed=0, dtype=np.float32):
    if n_classes < 2:
        raise InvalidInputError("reference classifier needs >= 2 classes")
    rng = make_rng(seed, _TAG_INIT, 1)
    lstm = nn.init_lstm(FRAME_DIM, SML_HIDDEN, rng, dtype)
    dense1 = nn.init_dense(SML_HIDDEN, SML_FF, "relu", rng, dtype)
    out = nn.init_dense(SML_FF, n_classes, "softmax", rng, dtype)
    return SmlParams(lstm, dense1, out)


def sml_forward(X, params):
    """Class probabilities for a batch X (B, 72, 63); returns (probs, cache)."""
    h, lstm_cache = nn.lstm_forward_seqbatch(X, params.lstm)
    a1 = nn.dense_forward(h, params.dense1)
    logits = a1 @ params.out.W.T + params.out.b
    probs = nn.softmax(logits, axis=-1)
    return probs, (lstm_cache, h, a1)


def sml_backward(dlogits, cache, params):
    """Gradients in param_list() order given dLoss/dlogits."""
    lstm_cache, h, a1 = cache
    dWo = dlogits.T @ a1
    dbo = dlogits.sum(axis=0)
    da1 = dlogits @ params.out.W
    dW1, db1, dh = nn.dense_backward(da1, h, a1, params.dense1)
    dW, dU, db = nn.lstm_backward_seqbatch(dh, lstm_cache, params.lstm)
    return [dW, dU, db, dW1, db1, dWo, dbo]


@dataclass
class SmlConfig:
    epochs: int = 100
    learning_rate: float = 1e-3
    batch_size: int = 32
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float = 5.0
    test_per_class: int = 50
    seed: int = 0


def _class_pools(dataset, config):
    """Per-class (train_pool, test_pool) index split, fixed across sweep sizes.

    The held-out pool is drawn first from a seeded permutation, so every
    sweep point's training pool is a prefix of the same remainder and
    stays disjoint from the test pool.
    """
    pools = {}
    for ci, label in enumerate(dataset.classes):
        idx = dataset.class_index[label]
        perm = make_rng(config.seed, _TAG_SML_POOLS, ci).permutation(len(idx))
        test = [idx[int(i)] for i in perm[: config.test_per_class]]
        train = [idx[int(i)] for i in perm[config.test_per_class:]]
        pools[label] = (train, test)
    return pools


def _batch_array(dataset, indices):
    X = np.stack([dataset.samples[i].frames for i in indices]).astype(np.float32)
    return X


def train_sml(dataset, samples_per_class, config=None):
    """Train the reference classifier on samples_per_class per class.

    The model sees exactly samples_per_class training samples for each of
    the dataset's classes and is scored once, at the end, on the held-out
    pool. The returned weights are the epoch checkpoint with the lowest
    mean training loss, so the held-out pool never influences selection.
    """
    config = config or SmlConfig()
    classes = dataset.classes
    if len(classes) < 2:
        raise InvalidInputError("train_sml needs >= 2 classes")
    if samples_per_class < 1:
        raise InvalidInputError("samples_per_class must be >= 1")
    pools = _class_pools(dataset, config)
    for label in classes:
        train_pool, test_pool = pools[label]
        if len(test_pool) < config.test_per_class or len(train_pool) < samples_per_class:
            raise CapacityError(
                f"class {label!r} has {dataset.class_count(label)} samples; "
                f"needs {samples_per_class} train + {config.test_per_class} test"
            )

    train_idx = []
    train_y = []
    test_idx = []
    test_y = []
    for ci, label in enumerate(classes):
        train_pool, test_pool = pools[label]
        train_idx.extend(train_pool[:samples_per_class])
        train_y.extend([ci] * samples_per_class)
        test_idx.extend(test_pool)
        test_y.extend([ci] * len(test_pool))
    Xtr = _batch_array(dataset, train_idx)
    ytr = np.array(train_y, dtype=np.int64)
    Xte = _batch_array(dataset, test_idx)
    yte = np.array(test_y, dtype=np.int64)

    params = init_sml(len(classes), seed=config.seed)
    plist = params.param_list()
    adam = nn.init_adam(plist, alpha=config.learning_rate, beta1=config.beta1,
                        beta2=config.beta2, eps=config.eps)
    shuffle_rng = make_rng(config.seed, _TAG_SML_SHUFFLE)
    batch = min(config.batch_size, len(Xtr))

    best_loss = np.inf
    best_params = params.copy()
    for _ in range(config.epochs):
        order = shuffle_rng.permutation(len(Xtr))
        losses = []
        for s in range(0, len(order), batch):
            sel = order[s: s + batch]
            probs, cache = sml_forward(Xtr[sel], params)
            losses.append(nn.cross_entropy_loss(probs, ytr[sel]))
            dlogits = nn.softmax_cross_entropy_backward(probs, ytr[sel])
            grads = sml_backward(dlogits, cache, params)
            nn.clip_global_norm(grads, config.clip_norm)
            nn.adam_update(plist, grads, adam)
        mean_loss = float(np.mean(losses))
        if mean_loss < best_loss:
            best_loss = mean_loss
            best_params = params.copy()

    probs, _ = sml_forward(Xte, best_params)
    accuracy = float(np.mean(np.argmax(probs, axis=1) == yte))
    return best_params, accuracy


def select_reference_classes(fsl_report, candidates, n):
    """The n classes whose few-shot accuracy sits closest to the overall one."""
    scored = [
        (abs(fsl_report.per_class_accuracy[c] - fsl_report.accuracy), c)
        for c in candidates if c in fsl_report.per_class_accuracy
    ]
    if len(scored) < n:
        raise CapacityError(
            f"only {len(scored)} classes appear in both the report and the dataset, "
            f"need {n}"
        )
    scored.sort()
    return [c for _, c in scored[:n]]


@dataclass
class SweepResult:
    samples_per_class: int
    test_accuracy: float


@dataclass
class SweepOutcome:
    results: list
    crossing: int | None
    classes: list
    fsl_accuracy: float

    def to_json(self):
        return json.dumps({
            "classes": self.classes,
            "fsl_accuracy": self.fsl_accuracy,
            "results": [
                {"samples_per_class": r.samples_per_class,
                 "test_accuracy": r.test_accuracy}
                for r in self.results
            ],
            "crossing": self.crossing,
        }, indent=2)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(
            results=[SweepResult(r["samples_per_class"], r["test_accuracy"])
                     for r in obj["results"]],
            crossing=obj["crossing"],
            classes=list(obj["classes"]),
            fsl_accuracy=obj["fsl_accuracy"],
        )


def sweep_sml(dataset, n, fsl_report, config=None):
    """Train reference models at 1, 2, 4, ... 512 samples per class.

    Classes are the n whose few-shot per-class accuracy is closest to the
    report's overall accuracy. The sweep stops at the first size whose
    held-out accuracy strictly exceeds the few-shot accuracy; if none does
    by 512 the outcome reports no crossing.
    """
    config = config or SmlConfig()
    labels = select_reference_classes(fsl_report, dataset.classes, n)
    sub = dataset.subset(labels)
    results = []
    crossing = None
    for spc in SWEEP_POINTS:
        _, acc = train_sml(sub, spc, config)
        results.append(SweepResult(spc, acc))
        if acc > fsl_report.accuracy:
            crossing = spc
            break
    return SweepOutcome(results=results, crossing=crossing, classes=labels,
                        fsl_accuracy=fsl_report.accuracy)


def compute_savings(sml_samples, k_shot, n_way):
    """Labelled samples avoided by the few-shot model for one task.

    The first reference-model size to beat the few-shot model needed
    sml_samples per class; the few-shot model needed k_shot. The saving is
    the difference summed over the task's n_way classes.
    """
    if sml_samples < k_shot:
        raise InvalidInputError(
            f"sml_samples ({sml_samples}) must be >= k_shot ({k_shot})"
        )
    return (sml_samples - k_shot) * n_way


@dataclass
class SavingsReport:
    n_way: int
    k_shot: int
    fsl_accuracy: float
    sml_samples: int
    sml_accuracy: float
    savings: int

    def __post_init__(self):
        if self.sml_accuracy <= self.fsl_accuracy:
            raise InvalidInputError(
                "savings are only defined once the reference model wins: "
                f"{self.sml_accuracy} <= {self.fsl_accuracy}"
            )
        expected = compute_savings(self.sml_samples, self.k_shot, self.n_way)
        if self.savings != expected:
            raise InvalidInputError(
                f"savings {self.savings} != ({self.sml_samples} - {self.k_shot}) "
                f"x {self.n_way} = {expected}"
            )

    def to_json(self):
        return json.dumps({
            "n_way": self.n_way, "k_shot": self.k_shot,
            "fsl_accuracy": self.fsl_accuracy,
            "sml_samples": self.sml_samples,
            "sml_accuracy": self.sml_accuracy,
            "savings": self.savings,
        })

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(**obj)


def make_savings_report(fsl_report, outcome):
    """Pair a few-shot report with the first winning sweep point."""
    if outcome.crossing is None:
        raise InvalidInputError("no sweep point exceeded the few-shot accuracy")
    winner = next(r for r in outcome.results
                  if r.samples_per_class == outcome.crossing)
    return SavingsReport(
        n_way=fsl_report.n_way,
        k_shot=fsl_report.k_shot,
        fsl_accuracy=fsl_report.accuracy,
        sml_samples=outcome.crossing,
        sml_accuracy=winner.test_accuracy,
        savings=compute_savings(outcome.crossing, fsl_report.k_shot, fsl_report.n_way),
    )
