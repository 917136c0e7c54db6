"""Relation network over landmark sequences: LSTM embedding, support
pooling, and a feed-forward relation module producing similarity scores
in (0, 1).

Two forward paths exist on purpose. The scoring path (embed,
forward_episode) processes every sequence and every (query, class) pair
in isolation, so results are bit-identical regardless of how an episode
is ordered. The training path batches across the episode for speed; its
bits may differ from the scoring path at float32 rounding level.
"""

from __future__ import annotations

import numpy as np

from . import nn
from .data import FRAME_DIM, make_rng
from .errors import DimensionError, InvalidInputError

_TAG_INIT = 6

# Default architecture, sized to match the reference classifier scale.
DEFAULT_HIDDEN = 64
DEFAULT_RELATION = (128, 64)


class RelationNetParams:
    """Trainable weights of the embedding and relation modules."""

    __slots__ = ("embedding", "relation_layers", "pool")

    def __init__(self, embedding, relation_layers, pool="sum"):
        if pool not in ("sum", "mean"):
            raise InvalidInputError(f"pool must be 'sum' or 'mean', got {pool!r}")
        if relation_layers[0].in_size != 2 * embedding.hidden_size:
            raise DimensionError(
                f"first relation layer takes {relation_layers[0].in_size}, "
                f"expected {2 * embedding.hidden_size}"
            )
        if relation_layers[-1].out_size != 1 or relation_layers[-1].activation != "sigmoid":
            raise InvalidInputError("final relation layer must be a sigmoid scalar")
        self.embedding = embedding
        self.relation_layers = list(relation_layers)
        self.pool = pool

    @property
    def hidden_size(self):
        return self.embedding.hidden_size

    def param_list(self):
        """All weights in the fixed checkpoint order."""
        out = self.embedding.param_list()
        for layer in self.relation_layers:
            out.extend(layer.param_list())
        return out

    def param_count(self):
        return nn.param_count(self.param_list())

    def copy(self):
        emb = nn.LstmParams(
            self.embedding.input_size, self.embedding.hidden_size,
            self.embedding.W.copy(), self.embedding.U.copy(), self.embedding.b.copy(),
        )
        layers = [
            nn.DenseParams(l.in_size, l.out_size, l.W.copy(), l.b.copy(), l.activation)
            for l in self.relation_layers
        ]
        return RelationNetParams(emb, layers, self.pool)


def init_relation_net(input_size=FRAME_DIM, hidden_size=DEFAULT_HIDDEN,
                      relation_sizes=DEFAULT_RELATION, pool="sum", seed=0,
                      dtype=np.float32):
    """Fresh network: LSTM(input -> H) + ReLU stack (2H -> ... -> 1 sigmoid)."""
    rng = make_rng(seed, _TAG_INIT, 0)
    embedding = nn.init_lstm(input_size, hidden_size, rng, dtype)
    sizes = [2 * hidden_size, *relation_sizes, 1]
    layers = []
    for i in range(len(sizes) - 1):
        act = "sigmoid" if i == len(sizes) - 2 else "relu"
        layers.append(nn.init_dense(sizes[i], sizes[i + 1], act, rng, dtype))
    return RelationNetParams(embedding, layers, pool)


# ---------------------------------------------------------------------------
# Scoring path (bit-stable, layout-independent)
# ---------------------------------------------------------------------------

def embed(seq, params):
    """Final LSTM hidden state over the 72 frames of one sequence.

    Invalid frames are zero by construction and are fed as zeros.
    """
    frames = seq.frames.astype(params.embedding.W.dtype, copy=False)
    return nn.lstm_forward(frames, params.embedding)


def pool_support(features, mode="sum"):
    """Combine K per-shot features into one class feature.

    K = 1 returns the single vector unchanged. The vectors are summed in a
    canonical (lexicographically sorted) order so the result is
    bit-identical under any permutation of the shots.
    """
    feats = np.asarray(features)
    if feats.ndim != 2 or feats.shape[0] < 1:
        raise InvalidInputError("pool_support needs a non-empty (K, H) array")
    if feats.shape[0] == 1:
        return feats[0].copy()
    order = np.lexsort(feats.T[::-1])
    total = np.add.reduce(feats[order], axis=0)
    if mode == "mean":
        total = total / feats.shape[0]
    return total


def relation_score(class_feat, query_feat, params):
    """Similarity of a pooled class feature and a query feature, in (0, 1).

    The pair is concatenated support-first and pushed through the relation
    layers; the sigmoid output is clipped strictly inside (0, 1).
    """
    class_feat = np.asarray(class_feat)
    query_feat = np.asarray(query_feat)
    h = params.hidden_size
    if class_feat.shape != (h,) or query_feat.shape != (h,):
        raise DimensionError(
            f"relation_score expects two ({h},) vectors, got "
            f"{class_feat.shape} and {query_feat.shape}"
        )
    x = np.concatenate([class_feat, query_feat])
    for layer in params.relation_layers:
        x = nn.dense_forward(x, layer)
    return float(x[0])


def forward_episode(episode, params):
    """Score matrix for one episode: rows follow episode.query, columns
    follow episode.class_order.

    Every sequence and every (query, class) pair is processed in
    isolation, so the matrix is bit-identical under shot shuffling and
    permutes exactly with class_order.
    """
    pooled = []
    for shots in episode.support:
        feats = np.stack([embed(s, params) for s in shots])
        pooled.append(pool_support(feats, params.pool))
    qfeats = [embed(s, params) for s in episode.query]
    scores = np.empty((len(qfeats), episode.n_way), dtype=pooled[0].dtype)
    for qi, qf in enumerate(qfeats):
        for ci, cf in enumerate(pooled):
            scores[qi, ci] = relation_score(cf, qf, params)
    return scores


def scores_from_features(pooled, qfeats, params):
    """Score matrix from precomputed class/query features (pair-isolated)."""
    scores = np.empty((len(qfeats), len(pooled)), dtype=np.asarray(pooled[0]).dtype)
    for qi in range(len(qfeats)):
        for ci in range(len(pooled)):
            scores[qi, ci] = relation_score(pooled[ci], qfeats[qi], params)
    return scores


def episode_loss(scores, query_labels):
    """MSE between relation scores and one-hot query targets."""
    scores = np.asarray(scores)
    targets = nn.one_hot(np.asarray(query_labels), scores.shape[1], dtype=scores.dtype)
    return nn.mse_loss(scores, targets)


def predict(scores):
    """Per-query class index: argmax score, ties broken by lowest index."""
    return np.argmax(np.asarray(scores), axis=1)


# ---------------------------------------------------------------------------
# Training path (batched)
# ---------------------------------------------------------------------------

class EpisodeCache:
    """Intermediate activations of one batched episode forward pass."""

    __slots__ = ("lstm", "n", "k", "nq", "pair_x", "layer_in", "layer_out", "scores")

    def __init__(self, lstm, n, k, nq, pair_x, layer_in, layer_out, scores):
        self.lstm = lstm
        self.n = n
        self.k = k
        self.nq = nq
        self.pair_x = pair_x
        self.layer_in = layer_in
        self.layer_out = layer_out
        self.scores = scores


def _episode_batch(episode, dtype):
    rows = [s.frames for shots in episode.support for s in shots]
    rows += [s.frames for s in episode.query]
    return np.stack(rows).astype(dtype, copy=False)


def forward_episode_training(episode, params):
    """Batched forward pass; returns (scores, cache) for backprop."""
    X = _episode_batch(episode, params.embedding.W.dtype)
    return forward_batch(X, episode.n_way, episode.k_shot, params)


def forward_batch(X, n, k, params):
    """Training-path forward on a raw batch X (n*k + nq, T, input).

    Rows are support sequences in class-major shot order followed by the
    queries. Sequence length and input width only need to match the
    embedding parameters, which lets tests exercise the full architecture
    at tiny sizes.
    """
    nq = X.shape[0] - n * k
    feats, lstm_cache = nn.lstm_forward_seqbatch(X, params.embedding)
    h = params.hidden_size
    sup = feats[: n * k].reshape(n, k, h)
    pooled = np.stack([pool_support(sup[ci], params.pool) for ci in range(n)])
    qfeats = feats[n * k:]
    # Pair row q*n + c holds concat(pooled[c], qfeats[q]).
    pair_x = np.concatenate(
        [np.tile(pooled, (nq, 1)), np.repeat(qfeats, n, axis=0)], axis=1
    )
    x = pair_x
    layer_in, layer_out = [], []
    for layer in params.relation_layers:
        layer_in.append(x)
        x = nn.dense_forward(x, layer)
        layer_out.append(x)
    scores = x.reshape(nq, n)
    cache = EpisodeCache(lstm_cache, n, k, nq, pair_x, layer_in, layer_out, scores)
    return scores, cache


def backward_episode_training(dscores, cache, params):
    """Gradients for every parameter given dLoss/dscores.

    Returns arrays in param_list() order.
    """
    n, k, nq = cache.n, cache.k, cache.nq
    h = params.hidden_size
    d = dscores.reshape(nq * n, 1)
    layer_grads = []
    for li in range(len(params.relation_layers) - 1, -1, -1):
        layer = params.relation_layers[li]
        dW, db, d = nn.dense_backward(d, cache.layer_in[li], cache.layer_out[li], layer)
        layer_grads.append((dW, db))
    layer_grads.reverse()

    dpair = d  # (nq*n, 2h)
    dpooled = dpair[:, :h].reshape(nq, n, h).sum(axis=0)
    dqfeats = dpair[:, h:].reshape(nq, n, h).sum(axis=1)
    dsup = np.repeat(dpooled[:, None, :], k, axis=1)
    if params.pool == "mean":
        dsup = dsup / k
    dfeats = np.concatenate([dsup.reshape(n * k, h), dqfeats], axis=0)
    dW, dU, db = nn.lstm_backward_seqbatch(dfeats, cache.lstm, params.embedding)

    grads = [dW, dU, db]
    for gW, gb in layer_grads:
        grads.extend([gW, gb])
    return grads


def batch_loss_and_grads(X, n, k, query_labels, params):
    """forward_batch + MSE + full backward; returns (loss, scores, grads)."""
    scores, cache = forward_batch(X, n, k, params)
    targets = nn.one_hot(np.asarray(query_labels), n, dtype=scores.dtype)
    loss = nn.mse_loss(scores, targets)
    dscores = nn.mse_loss_backward(scores, targets)
    grads = backward_episode_training(dscores, cache, params)
    return loss, scores, grads


def episode_loss_and_grads(episode, params):
    """Forward + MSE + full backward in one call; returns (loss, scores, grads)."""
    X = _episode_batch(episode, params.embedding.W.dtype)
    return batch_loss_and_grads(X, episode.n_way, episode.k_shot,
                                episode.query_labels, params)
