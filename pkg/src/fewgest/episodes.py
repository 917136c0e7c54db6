"""Episodic N-way K-shot task sampling with leakage-free guarantees."""

from __future__ import annotations

import numpy as np

from .data import _TAG_EPISODE, make_rng
from .errors import CapacityError, InvalidInputError


class EpisodeSpec:
    """Task shape: n_way classes, k_shot support and q_queries per class."""

    __slots__ = ("n_way", "k_shot", "q_queries", "seed")

    def __init__(self, n_way, k_shot, q_queries=5, seed=0):
        if n_way < 2:
            raise InvalidInputError(f"n_way must be >= 2, got {n_way}")
        if k_shot < 1:
            raise InvalidInputError(f"k_shot must be >= 1, got {k_shot}")
        if q_queries < 1:
            raise InvalidInputError(f"q_queries must be >= 1, got {q_queries}")
        self.n_way = int(n_way)
        self.k_shot = int(k_shot)
        self.q_queries = int(q_queries)
        self.seed = int(seed)

    def with_queries(self, q_queries):
        return EpisodeSpec(self.n_way, self.k_shot, q_queries, self.seed)

    def with_seed(self, seed):
        return EpisodeSpec(self.n_way, self.k_shot, self.q_queries, seed)


class Episode:
    """One sampled task: support set (N x K) plus a labelled query set."""

    __slots__ = ("class_order", "support", "query", "query_labels")

    def __init__(self, class_order, support, query, query_labels):
        class_order = list(class_order)
        if len(set(class_order)) != len(class_order):
            raise InvalidInputError("episode classes must be distinct")
        if len(support) != len(class_order):
            raise InvalidInputError("support must hold one shot list per class")
        k = len(support[0])
        if any(len(shots) != k for shots in support):
            raise InvalidInputError("every class must supply the same k_shot")
        support_ids = {s.sample_id for shots in support for s in shots}
        query_ids = {s.sample_id for s in query}
        overlap = support_ids & query_ids
        if overlap:
            raise InvalidInputError(f"support/query overlap: {sorted(overlap)}")
        query_labels = np.asarray(query_labels, dtype=np.int64)
        if query_labels.shape != (len(query),):
            raise InvalidInputError("one label per query sample required")
        if len(query) and (query_labels.min() < 0 or query_labels.max() >= len(class_order)):
            raise InvalidInputError("query label out of range")
        self.class_order = class_order
        self.support = [list(shots) for shots in support]
        self.query = list(query)
        self.query_labels = query_labels

    @property
    def n_way(self):
        return len(self.class_order)

    @property
    def k_shot(self):
        return len(self.support[0])


def episode_rng(seed, episode_index):
    """Philox stream for one episode, keyed by (seed, episode_index)."""
    return make_rng(seed, _TAG_EPISODE, episode_index)


def sample_episode(dataset, spec, episode_index=0):
    """Draw one episode; fully determined by (spec.seed, episode_index).

    n_way distinct classes are drawn uniformly from the classes holding at
    least k_shot + q_queries samples, then k+q distinct samples per class,
    the first k as support and the rest as queries (grouped by class).
    """
    need = spec.k_shot + spec.q_queries
    eligible = [c for c in dataset.classes if dataset.class_count(c) >= need]
    if len(eligible) < spec.n_way:
        raise CapacityError(
            f"need {spec.n_way} classes with >= {need} samples, "
            f"only {len(eligible)} of {len(dataset.classes)} qualify"
        )
    rng = episode_rng(spec.seed, episode_index)
    picked = rng.choice(len(eligible), size=spec.n_way, replace=False)
    class_order = [eligible[int(i)] for i in picked]

    support = []
    query = []
    query_labels = []
    for ci, label in enumerate(class_order):
        pool = dataset.samples_of(label)
        idx = rng.choice(len(pool), size=need, replace=False)
        support.append([pool[int(i)] for i in idx[: spec.k_shot]])
        for i in idx[spec.k_shot:]:
            query.append(pool[int(i)])
            query_labels.append(ci)
    return Episode(class_order, support, query, query_labels)
