"""Dense numerical core: activations, LSTM cell, feed-forward layers,
losses, analytic gradients and the Adam optimizer.

Tensors are plain numpy arrays in row-major order, float32 by default.
Every function follows the dtype of its inputs, so the whole stack can be
run on a float64 shadow path for high-precision gradient checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DimensionError, InvalidInputError, TrainingDivergedError

# Sigmoid outputs are clipped into [EPS, 1-EPS] so that downstream code can
# rely on scores lying strictly inside (0, 1) even when logits saturate.
SIGMOID_EPS = 1e-7

# Probabilities are clamped here before taking logs.
LOG_EPS = 1e-12

# Packed LSTM gate order along the 4H axis.
GATE_ORDER = ("input", "forget", "cell", "output")


def sigmoid(x):
    """Numerically stable logistic function, strictly inside (0, 1)."""
    x = np.asarray(x)
    return np.clip(expit(x), SIGMOID_EPS, 1.0 - SIGMOID_EPS).astype(x.dtype, copy=False)


def relu(x):
    return np.maximum(x, 0)


def softmax(x, axis=-1):
    """Max-subtracted softmax; rows sum to 1 within float tolerance."""
    x = np.asarray(x)
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def matmul(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"matmul shape mismatch: {a.shape} x {b.shape}"
        )
    return a @ b


def one_hot(labels, n_classes, dtype=np.float32):
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise InvalidInputError(
            f"label out of range [0, {n_classes}): {labels.min()}..{labels.max()}"
        )
    out = np.zeros((labels.shape[0], n_classes), dtype=dtype)
    out[np.arange(labels.shape[0]), labels] = 1
    return out


# ---------------------------------------------------------------------------
# LSTM
# ---------------------------------------------------------------------------

@dataclass
class LstmParams:
    """Packed LSTM weights; gate order along the 4H axis is [i, f, g, o]."""

    input_size: int
    hidden_size: int
    W: np.ndarray  # (4H, input_size)
    U: np.ndarray  # (4H, hidden_size)
    b: np.ndarray  # (4H,)

    def param_list(self):
        return [self.W, self.U, self.b]


def init_lstm(input_size, hidden_size, rng, dtype=np.float32):
    """Glorot-uniform weights per gate block; forget-gate bias set to 1."""
    h = hidden_size
    bw = np.sqrt(6.0 / (input_size + h))
    bu = np.sqrt(6.0 / (h + h))
    W = rng.uniform(-bw, bw, size=(4 * h, input_size)).astype(dtype)
    U = rng.uniform(-bu, bu, size=(4 * h, h)).astype(dtype)
    b = np.zeros(4 * h, dtype=dtype)
    b[h:2 * h] = 1.0
    return LstmParams(input_size, hidden_size, W, U, b)


def _split_gates(z, h):
    return z[..., :h], z[..., h:2 * h], z[..., 2 * h:3 * h], z[..., 3 * h:]


def lstm_step(x, h, c, p):
    """One LSTM cell update on 1-D state vectors; returns (h', c')."""
    x = np.asarray(x)
    h = np.asarray(h)
    c = np.asarray(c)
    if x.shape != (p.input_size,) or h.shape != (p.hidden_size,) or c.shape != (p.hidden_size,):
        raise DimensionError(
            f"lstm_step size mismatch: x{x.shape} h{h.shape} c{c.shape} "
            f"vs input={p.input_size} hidden={p.hidden_size}"
        )
    z = p.W @ x + p.U @ h + p.b
    zi, zf, zg, zo = _split_gates(z, p.hidden_size)
    i = sigmoid(zi)
    f = sigmoid(zf)
    g = np.tanh(zg)
    o = sigmoid(zo)
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new


def lstm_forward(seq, p, h0=None, c0=None):
    """Fold lstm_step over the rows of seq (T, input_size); returns h_T.

    Implemented literally as the left fold so the result is bit-identical
    to chaining lstm_step by hand.
    """
    seq = np.asarray(seq)
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise InvalidInputError(f"lstm_forward needs a (T>=1, input) sequence, got {seq.shape}")
    if seq.shape[1] != p.input_size:
        raise DimensionError(f"lstm_forward input width {seq.shape[1]} != {p.input_size}")
    h = np.zeros(p.hidden_size, seq.dtype) if h0 is None else h0
    c = np.zeros(p.hidden_size, seq.dtype) if c0 is None else c0
    for t in range(seq.shape[0]):
        h, c = lstm_step(seq[t], h, c, p)
    return h


@dataclass
class LstmCache:
    """Per-step activations recorded by the batched forward pass."""

    X: np.ndarray        # (B, T, input)
    i: np.ndarray        # (T, B, H)
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    c: np.ndarray        # cell state after step t
    tanh_c: np.ndarray
    h_prev: np.ndarray   # hidden state entering step t


def lstm_forward_seqbatch(X, p):
    """Batched LSTM over X (B, T, input); returns (h_T (B, H), cache).

    This is the training path: one gemm per time step across the whole
    batch. Per-row bits depend on batch layout, so code that promises
    layout-independent results must use embed()/lstm_forward instead.
    """
    X = np.asarray(X)
    B, T, D = X.shape
    if D != p.input_size:
        raise DimensionError(f"batch input width {D} != {p.input_size}")
    H = p.hidden_size
    dt = X.dtype
    Zx = (X.reshape(B * T, D) @ p.W.T).reshape(B, T, 4 * H)
    cache = LstmCache(
        X=X,
        i=np.empty((T, B, H), dt), f=np.empty((T, B, H), dt),
        g=np.empty((T, B, H), dt), o=np.empty((T, B, H), dt),
        c=np.empty((T, B, H), dt), tanh_c=np.empty((T, B, H), dt),
        h_prev=np.empty((T, B, H), dt),
    )
    h = np.zeros((B, H), dt)
    c = np.zeros((B, H), dt)
    Ut = p.U.T
    for t in range(T):
        cache.h_prev[t] = h
        z = Zx[:, t] + h @ Ut + p.b
        zi, zf, zg, zo = _split_gates(z, H)
        i = sigmoid(zi)
        f = sigmoid(zf)
        g = np.tanh(zg)
        o = sigmoid(zo)
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        cache.i[t] = i
        cache.f[t] = f
        cache.g[t] = g
        cache.o[t] = o
        cache.c[t] = c
        cache.tanh_c[t] = tc
    return h, cache


def lstm_backward_seqbatch(dh_last, cache, p):
    """Backprop through time from a gradient on the final hidden state.

    Returns (dW, dU, db) matching p; gradients w.r.t. the inputs are not
    needed anywhere in this package and are not computed.
    """
    T, B, H = cache.i.shape
    dt = cache.i.dtype
    dW = np.zeros_like(p.W)
    dU = np.zeros_like(p.U)
    db = np.zeros_like(p.b)
    dh = np.asarray(dh_last, dt)
    dc = np.zeros((B, H), dt)
    for t in range(T - 1, -1, -1):
        i, f, g, o = cache.i[t], cache.f[t], cache.g[t], cache.o[t]
        tc = cache.tanh_c[t]
        do = dh * tc
        dc = dc + dh * o * (1 - tc * tc)
        c_prev = cache.c[t - 1] if t > 0 else np.zeros((B, H), dt)
        df = dc * c_prev
        di = dc * g
        dg = dc * i
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), dg * (1 - g * g), do * o * (1 - o)],
            axis=1,
        )
        dW += dz.T @ cache.X[:, t]
        dU += dz.T @ cache.h_prev[t]
        db += dz.sum(axis=0)
        dh = dz @ p.U
        dc = dc * f
    return dW, dU, db


# ---------------------------------------------------------------------------
# Dense layers
# ---------------------------------------------------------------------------

ACTIVATIONS = ("relu", "sigmoid", "softmax", "none")


@dataclass
class DenseParams:
    in_size: int
    out_size: int
    W: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)
    activation: str = "none"

    def param_list(self):
        return [self.W, self.b]


def init_dense(in_size, out_size, activation, rng, dtype=np.float32):
    if activation not in ACTIVATIONS:
        raise InvalidInputError(f"unknown activation {activation!r}")
    bound = np.sqrt(6.0 / (in_size + out_size))
    W = rng.uniform(-bound, bound, size=(out_size, in_size)).astype(dtype)
    b = np.zeros(out_size, dtype=dtype)
    return DenseParams(in_size, out_size, W, b, activation)


def dense_forward(x, p):
    """activation(W x + b); accepts a vector (in,) or a batch (B, in)."""
    x = np.asarray(x)
    if x.shape[-1] != p.in_size:
        raise DimensionError(f"dense input width {x.shape[-1]} != {p.in_size}")
    z = x @ p.W.T + p.b
    if p.activation == "relu":
        return relu(z)
    if p.activation == "sigmoid":
        return sigmoid(z)
    if p.activation == "softmax":
        return softmax(z, axis=-1)
    return z


def dense_backward(dout, x, out, p):
    """Gradient of a dense layer given dLoss/d(out).

    `x` and `out` are the cached forward input/output. The softmax
    activation is intentionally unsupported; use the fused
    softmax_cross_entropy_backward instead.
    """
    if p.activation == "relu":
        dz = dout * (out > 0)
    elif p.activation == "sigmoid":
        dz = dout * out * (1 - out)
    elif p.activation == "none":
        dz = dout
    else:
        raise InvalidInputError("dense_backward does not support softmax")
    x2 = x if x.ndim == 2 else x[None, :]
    dz2 = dz if dz.ndim == 2 else dz[None, :]
    dW = dz2.T @ x2
    db = dz2.sum(axis=0)
    dx = dz @ p.W
    return dW, db, dx


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------

def mse_loss(scores, targets):
    scores = np.asarray(scores)
    targets = np.asarray(targets)
    if scores.shape != targets.shape:
        raise DimensionError(f"mse shapes differ: {scores.shape} vs {targets.shape}")
    d = scores - targets
    return float(np.mean(d * d))


def mse_loss_backward(scores, targets):
    scores = np.asarray(scores)
    targets = np.asarray(targets)
    return (2.0 / scores.size) * (scores - targets)


def cross_entropy_loss(probs, labels):
    """-mean(log p[label]); probabilities clamped to >= 1e-12 before log."""
    probs = np.asarray(probs)
    labels = np.asarray(labels)
    if probs.ndim != 2 or labels.shape != (probs.shape[0],):
        raise DimensionError(f"cross_entropy shapes: {probs.shape} vs {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= probs.shape[1]):
        raise InvalidInputError("label out of range")
    picked = probs[np.arange(probs.shape[0]), labels]
    return float(-np.mean(np.log(np.maximum(picked, LOG_EPS))))


def softmax_cross_entropy_backward(probs, labels):
    """dLoss/dlogits for softmax followed by cross-entropy: (p - y) / B."""
    probs = np.asarray(probs)
    B, n = probs.shape
    d = probs.copy()
    d[np.arange(B), labels] -= 1
    return d / B


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------

@dataclass
class AdamState:
    """First/second moment accumulators, one entry per parameter array."""

    t: int
    m: list
    v: list
    alpha: float
    beta1: float
    beta2: float
    eps: float


def init_adam(params, alpha=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
    return AdamState(
        t=0,
        m=[np.zeros_like(p) for p in params],
        v=[np.zeros_like(p) for p in params],
        alpha=alpha, beta1=beta1, beta2=beta2, eps=eps,
    )


def adam_update(params, grads, state):
    """One Adam step; mutates params and state in place and returns them.

    theta <- theta - alpha * m_hat / (sqrt(v_hat) + eps) with the standard
    bias corrections.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise DimensionError("adam_update: parameter/gradient count mismatch")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise DimensionError(f"adam_update shape mismatch: {p.shape} vs {g.shape}")
        if not np.all(np.isfinite(g)):
            raise TrainingDivergedError("non-finite gradient in adam_update")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        m_hat = m / bc1
        v_hat = v / bc2
        p -= state.alpha * m_hat / (np.sqrt(v_hat) + state.eps)
    return params, state


def clip_global_norm(grads, max_norm):
    """Scale grads in place so their global L2 norm is at most max_norm."""
    total = 0.0
    for g in grads:
        total += float(np.sum(g.astype(np.float64) ** 2))
    norm = float(np.sqrt(total))
    if norm > max_norm and norm > 0:
        scale = max_norm / norm
        for g in grads:
            g *= scale
    return norm


# ---------------------------------------------------------------------------
# Parameter vector helpers (used by checkpoints and gradient checks)
# ---------------------------------------------------------------------------

def param_count(params):
    return int(sum(p.size for p in params))


def pack_params(params):
    """Concatenate parameter arrays into one flat vector (row-major)."""
    return np.concatenate([np.asarray(p).ravel() for p in params])


def unpack_params(vec, like):
    """Inverse of pack_params: reshape vec into arrays shaped like `like`."""
    out = []
    pos = 0
    for p in like:
        n = p.size
        out.append(np.asarray(vec[pos:pos + n], dtype=p.dtype).reshape(p.shape))
        pos += n
    if pos != len(vec):
        raise DimensionError(f"unpack_params: vector length {len(vec)} != {pos}")
    return out
