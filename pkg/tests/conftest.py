"""Shared oracle helpers: independent reference implementations used to
compute expected values, plus tiny-model builders for gradient checks."""

import math

import numpy as np
import pytest

from fewgest import nn
from fewgest.relation import RelationNetParams


# ---------------------------------------------------------------------------
# Scalar-loop oracles (kept deliberately independent of the numpy paths)
# ---------------------------------------------------------------------------

def naive_matmul(a, b):
    m, k = len(a), len(a[0])
    n = len(b[0])
    out = [[0.0] * n for _ in range(m)]
    for i in range(m):
        for j in range(n):
            s = 0.0
            for t in range(k):
                s += float(a[i][t]) * float(b[t][j])
            out[i][j] = s
    return np.array(out)


def scalar_sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def scalar_lstm_step(x, h, c, W, U, b, hidden):
    """Python-loop LSTM cell in float64, gate order [i, f, g, o]."""
    z = [0.0] * (4 * hidden)
    for r in range(4 * hidden):
        s = float(b[r])
        for j in range(len(x)):
            s += float(W[r][j]) * float(x[j])
        for j in range(hidden):
            s += float(U[r][j]) * float(h[j])
        z[r] = s
    h_new = [0.0] * hidden
    c_new = [0.0] * hidden
    for u in range(hidden):
        i = scalar_sigmoid(z[u])
        f = scalar_sigmoid(z[hidden + u])
        g = math.tanh(z[2 * hidden + u])
        o = scalar_sigmoid(z[3 * hidden + u])
        c_new[u] = f * float(c[u]) + i * g
        h_new[u] = o * math.tanh(c_new[u])
    return np.array(h_new), np.array(c_new)


def scalar_mse(scores, targets):
    total = 0.0
    count = 0
    for row_s, row_t in zip(scores, targets):
        for s, t in zip(row_s, row_t):
            total += (float(s) - float(t)) ** 2
            count += 1
    return total / count


def scalar_cross_entropy(probs, labels):
    total = 0.0
    for row, lab in zip(probs, labels):
        total -= math.log(max(float(row[int(lab)]), 1e-12))
    return total / len(labels)


def scalar_relation_mlp(vec, layers):
    """Feed-forward scalar oracle matching DenseParams semantics."""
    x = [float(v) for v in vec]
    for layer in layers:
        out = []
        for r in range(layer.out_size):
            s = float(layer.b[r])
            for j in range(layer.in_size):
                s += float(layer.W[r][j]) * x[j]
            if layer.activation == "relu":
                s = max(s, 0.0)
            elif layer.activation == "sigmoid":
                s = min(max(scalar_sigmoid(s), nn.SIGMOID_EPS), 1.0 - nn.SIGMOID_EPS)
            out.append(s)
        x = out
    return x


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def finite_difference_check(loss_fn, params_list, analytic_grads, h=1e-3,
                            rel_tol=1e-3, min_pass=0.99, floor=1e-6):
    """Central differences on a flat parameter vector vs analytic grads.

    Returns the fraction of coordinates whose relative error is below
    rel_tol; caller asserts against min_pass.
    """
    vec0 = nn.pack_params(params_list)
    ga = nn.pack_params(analytic_grads)

    def loss_at(vec):
        for dst, src in zip(params_list, nn.unpack_params(vec, params_list)):
            dst[...] = src
        return loss_fn()

    gfd = np.zeros_like(vec0)
    for i in range(len(vec0)):
        v = vec0.copy()
        v[i] += h
        lp = loss_at(v)
        v[i] -= 2 * h
        lm = loss_at(v)
        gfd[i] = (lp - lm) / (2 * h)
    loss_at(vec0)
    rel = np.abs(ga - gfd) / np.maximum(np.maximum(np.abs(ga), np.abs(gfd)), floor)
    return float(np.mean(rel < rel_tol))


# ---------------------------------------------------------------------------
# Tiny model builders
# ---------------------------------------------------------------------------

def tiny_relation_params(input_size=6, hidden=4, relation=(8,), seed=0,
                         dtype=np.float64, scale=None):
    rng = np.random.default_rng(seed)
    emb = nn.init_lstm(input_size, hidden, rng, dtype)
    sizes = [2 * hidden, *relation, 1]
    layers = []
    for i in range(len(sizes) - 1):
        act = "sigmoid" if i == len(sizes) - 2 else "relu"
        layers.append(nn.init_dense(sizes[i], sizes[i + 1], act, rng, dtype))
    params = RelationNetParams(emb, layers)
    if scale is not None:
        for p in params.param_list():
            p *= scale
    return params


class TinySml:
    """Duck-typed small classifier for gradient checks (the production
    architecture is size-locked)."""

    def __init__(self, input_size=6, hidden=4, ff=8, n_classes=3, seed=0,
                 dtype=np.float64):
        rng = np.random.default_rng(seed)
        self.lstm = nn.init_lstm(input_size, hidden, rng, dtype)
        self.dense1 = nn.init_dense(hidden, ff, "relu", rng, dtype)
        self.out = nn.init_dense(ff, n_classes, "softmax", rng, dtype)

    def param_list(self):
        return [*self.lstm.param_list(), *self.dense1.param_list(),
                *self.out.param_list()]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
