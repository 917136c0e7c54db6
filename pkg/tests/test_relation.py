import numpy as np
import pytest

import fewgest as fg
from conftest import (
    finite_difference_check,
    scalar_lstm_step,
    scalar_mse,
    scalar_relation_mlp,
    tiny_relation_params,
)
from fewgest import nn
from fewgest.checkpoint import load_checkpoint, save_checkpoint
from fewgest.episodes import Episode
from fewgest.errors import CheckpointError, DimensionError, InvalidInputError
from fewgest.relation import (
    RelationNetParams,
    embed,
    episode_loss,
    episode_loss_and_grads,
    forward_episode,
    init_relation_net,
    pool_support,
    predict,
    relation_score,
)


def _zero_params(hidden=4, relation=(8,)):
    params = tiny_relation_params(input_size=63, hidden=hidden, relation=relation,
                                  dtype=np.float32)
    for p in params.param_list():
        p[...] = 0
    return params


def _episode(n=2, k=2, q=2, seed=0, sigma=0.03):
    ds = fg.gen_synthetic(n + 2, k + q + 2, noise_sigma=sigma, seed=seed)
    return fg.sample_episode(ds, fg.EpisodeSpec(n, k, q, seed=seed), 0)


# ---------------------------------------------------------------------------
# embed
# ---------------------------------------------------------------------------

def test_embed_zero_weights_gives_zero_vector():
    params = _zero_params()
    ds = fg.gen_synthetic(2, 1, seed=1)
    assert np.array_equal(embed(ds.samples[0], params), np.zeros(4, np.float32))


def test_embed_deterministic():
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32)
    ds = fg.gen_synthetic(2, 1, seed=1)
    a = embed(ds.samples[0], params)
    b = embed(ds.samples[0], params)
    assert np.array_equal(a, b)


def test_embed_matches_chained_step_oracle():
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32, seed=3)
    ds = fg.gen_synthetic(2, 1, noise_sigma=0.02, seed=5)
    seq = ds.samples[0]
    p = params.embedding
    h = np.zeros(4)
    c = np.zeros(4)
    for t in range(72):
        h, c = scalar_lstm_step(seq.frames[t], h, c, p.W, p.U, p.b, 4)
    assert np.allclose(embed(seq, params), h, atol=1e-5)


# ---------------------------------------------------------------------------
# pool_support
# ---------------------------------------------------------------------------

def test_pool_k1_identity_bitexact(rng):
    v = rng.standard_normal((1, 8)).astype(np.float32)
    assert np.array_equal(pool_support(v), v[0])
    assert np.array_equal(pool_support(v, mode="mean"), v[0])


def test_pool_opposite_vectors_cancel():
    v = np.array([[1.0, -2.0, 3.0], [-1.0, 2.0, -3.0]], dtype=np.float32)
    assert np.array_equal(pool_support(v), np.zeros(3, np.float32))


def test_pool_permutation_bit_invariant(rng):
    feats = rng.standard_normal((5, 16)).astype(np.float32)
    base = pool_support(feats)
    for _ in range(10):
        perm = rng.permutation(5)
        assert np.array_equal(pool_support(feats[perm]), base)


def test_pool_mean_mode(rng):
    feats = rng.standard_normal((4, 8)).astype(np.float32)
    assert np.allclose(pool_support(feats, mode="mean"),
                       pool_support(feats) / 4, atol=1e-7)


def test_pool_empty_rejected():
    with pytest.raises(InvalidInputError):
        pool_support(np.zeros((0, 4), np.float32))


# ---------------------------------------------------------------------------
# relation_score
# ---------------------------------------------------------------------------

def test_relation_score_zero_weights_is_half(rng):
    params = _zero_params()
    a = rng.standard_normal(4).astype(np.float32)
    b = rng.standard_normal(4).astype(np.float32)
    assert relation_score(a, b, params) == 0.5


def test_relation_score_strictly_inside_unit_interval(rng):
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32, scale=50.0)
    for _ in range(50):
        a = rng.standard_normal(4).astype(np.float32) * 10
        b = rng.standard_normal(4).astype(np.float32) * 10
        s = relation_score(a, b, params)
        assert 0.0 < s < 1.0


def test_relation_score_matches_scalar_oracle(rng):
    params = tiny_relation_params(input_size=63, hidden=3, relation=(5,),
                                  dtype=np.float32, seed=9)
    a = rng.standard_normal(3).astype(np.float32)
    b = rng.standard_normal(3).astype(np.float32)
    expected = scalar_relation_mlp(np.concatenate([a, b]), params.relation_layers)[0]
    assert abs(relation_score(a, b, params) - expected) < 1e-6


def test_relation_score_size_mismatch():
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32)
    with pytest.raises(DimensionError):
        relation_score(np.zeros(3, np.float32), np.zeros(4, np.float32), params)


# ---------------------------------------------------------------------------
# forward_episode
# ---------------------------------------------------------------------------

def test_forward_episode_identical_classes_give_equal_rows():
    ds = fg.gen_synthetic(2, 4, noise_sigma=0.0, seed=3)
    a, b = ds.classes
    sa, sb = ds.samples_of(a), ds.samples_of(b)
    # both classes use byte-identical support frames (sigma=0 clones), so
    # pooled features coincide and every row has two equal entries
    ep = Episode([a, b], [[sa[0]], [sa[1]]], [sb[0], sb[1]], [1, 1])
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32, seed=1)
    scores = forward_episode(ep, params)
    assert np.array_equal(scores[:, 0], scores[:, 1])


def test_forward_episode_column_permutation_equivariance():
    ep = _episode(n=3, k=2, q=2, seed=4)
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32, seed=2)
    scores = forward_episode(ep, params)
    perm = [2, 0, 1]
    ep2 = Episode(
        [ep.class_order[i] for i in perm],
        [ep.support[i] for i in perm],
        ep.query,
        [perm.index(int(l)) for l in ep.query_labels],
    )
    scores2 = forward_episode(ep2, params)
    assert np.array_equal(scores2, scores[:, perm])
    labels1 = [ep.class_order[i] for i in predict(scores)]
    labels2 = [ep2.class_order[i] for i in predict(scores2)]
    assert labels1 == labels2


def test_forward_episode_support_order_bit_invariant(rng):
    ep = _episode(n=2, k=5, q=2, seed=6)
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32, seed=3)
    base = forward_episode(ep, params)
    for _ in range(5):
        shuffled = [list(shots) for shots in ep.support]
        for shots in shuffled:
            rng.shuffle(shots)
        ep2 = Episode(ep.class_order, shuffled, ep.query, ep.query_labels)
        assert np.array_equal(forward_episode(ep2, params), base)


def test_forward_episode_compositional_oracle():
    ep = _episode(n=2, k=2, q=2, seed=8)
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32, seed=4)
    scores = forward_episode(ep, params)
    for ci, shots in enumerate(ep.support):
        pooled = pool_support(np.stack([embed(s, params) for s in shots]), params.pool)
        for qi, qseq in enumerate(ep.query):
            expected = relation_score(pooled, embed(qseq, params), params)
            assert scores[qi, ci] == np.float32(expected)


def test_forward_episode_scores_strictly_in_unit_interval():
    ep = _episode(n=3, k=1, q=2, seed=10)
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  dtype=np.float32, seed=5, scale=30.0)
    scores = forward_episode(ep, params)
    assert np.all(scores > 0.0) and np.all(scores < 1.0)


def test_training_path_matches_scoring_path():
    from fewgest.relation import forward_episode_training

    ep = _episode(n=3, k=2, q=2, seed=12)
    params = tiny_relation_params(input_size=63, hidden=8, relation=(16,),
                                  dtype=np.float32, seed=6)
    scores_fast, _ = forward_episode_training(ep, params)
    scores_ref = forward_episode(ep, params)
    assert np.allclose(scores_fast, scores_ref, atol=1e-5)


# ---------------------------------------------------------------------------
# episode_loss / predict
# ---------------------------------------------------------------------------

def test_episode_loss_perfect_scores():
    scores = nn.one_hot(np.array([0, 1]), 2, dtype=np.float32)
    assert episode_loss(scores, np.array([0, 1])) == 0.0


def test_episode_loss_uniform_half():
    scores = np.full((3, 5), 0.5, dtype=np.float32)
    assert abs(episode_loss(scores, np.array([0, 2, 4])) - 0.25) < 1e-7


def test_episode_loss_matches_scalar_oracle(rng):
    scores = rng.uniform(0, 1, (4, 3))
    labels = rng.integers(0, 3, 4)
    expected = scalar_mse(scores, nn.one_hot(labels, 3, dtype=np.float64))
    assert abs(episode_loss(scores, labels) - expected) < 1e-12


def test_predict_rules():
    assert predict(np.array([[0.1, 0.9, 0.3]]))[0] == 1
    assert predict(np.array([[0.5, 0.5]]))[0] == 0
    row = np.array([[0.2, 0.7, 0.4]])
    assert predict(row)[0] == predict(np.sqrt(row))[0] == 1


# ---------------------------------------------------------------------------
# architecture validation + end-to-end gradient
# ---------------------------------------------------------------------------

def test_relation_params_validation():
    emb = nn.init_lstm(63, 4, np.random.default_rng(0))
    bad_first = [nn.init_dense(7, 8, "relu", np.random.default_rng(1)),
                 nn.init_dense(8, 1, "sigmoid", np.random.default_rng(2))]
    with pytest.raises(DimensionError):
        RelationNetParams(emb, bad_first)
    bad_last = [nn.init_dense(8, 8, "relu", np.random.default_rng(1)),
                nn.init_dense(8, 1, "relu", np.random.default_rng(2))]
    with pytest.raises(InvalidInputError):
        RelationNetParams(emb, bad_last)


def test_default_architecture_sizes():
    params = init_relation_net()
    assert params.embedding.input_size == 63
    assert params.embedding.hidden_size == 64
    assert [l.out_size for l in params.relation_layers] == [128, 64, 1]
    assert params.relation_layers[0].in_size == 128
    assert params.relation_layers[-1].activation == "sigmoid"


def test_end_to_end_gradient_tiny():
    ep = _episode(n=2, k=2, q=2, seed=14)
    params = tiny_relation_params(input_size=63, hidden=4, relation=(8,),
                                  seed=7, dtype=np.float64)

    def loss_fn():
        loss, _, _ = episode_loss_and_grads(ep, params)
        return loss

    _, _, grads = episode_loss_and_grads(ep, params)
    # Across 72 recurrence steps a 1e-3 perturbation leaves the linear
    # regime on recurrent weights whose gradients are ~1e-6, so use a
    # tighter h and check those near-zero coordinates absolutely.
    frac = finite_difference_check(loss_fn, params.param_list(), grads,
                                   h=1e-4, floor=1e-4)
    assert frac >= 0.99


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

def test_checkpoint_roundtrip_bits(tmp_path):
    params = init_relation_net(hidden_size=8, relation_sizes=(16, 8), seed=5)
    path = tmp_path / "m.rnck"
    save_checkpoint(params, path, config_digest="abc", episode_seed=42)
    loaded, header = load_checkpoint(path)
    assert header["model"] == "relation"
    assert header["hidden_size"] == 8
    assert header["relation_sizes"] == [16, 8]
    assert header["config_digest"] == "abc"
    assert header["episode_seed"] == 42
    for a, b in zip(params.param_list(), loaded.param_list()):
        assert np.array_equal(a, b)


def test_checkpoint_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.rnck"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_rejects_truncated_blob(tmp_path):
    params = init_relation_net(hidden_size=8, relation_sizes=(16,), seed=5)
    path = tmp_path / "m.rnck"
    save_checkpoint(params, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(CheckpointError):
        load_checkpoint(path)
