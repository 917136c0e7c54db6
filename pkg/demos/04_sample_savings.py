"""Quantify how many labelled samples few-shot adaptation saves over
training a conventional classifier from scratch.

A relation network is meta-trained briefly on noisy synthetic gestures
and evaluated one-shot on unseen classes. The fixed reference classifier
(LSTM 64 + FF 256 + softmax) is then trained on those same classes with
1, 2, 4, ... samples per class until it beats the few-shot accuracy; the
saving is (crossing - K) x N.

Runs in a few minutes. Run: python3 demos/04_sample_savings.py
"""

import fewgest as fg
from fewgest.baseline import SmlConfig, compute_savings, make_savings_report, sweep_sml
from fewgest.data import partition_by_class
from fewgest.training import TrainConfig, evaluate, meta_train

sigma, seed = 0.25, 21
ds = fg.gen_synthetic(40, 24, noise_sigma=sigma, seed=seed)
train_set, val_set, test_set = partition_by_class(ds, (24, 6, 10), seed=seed)

spec = fg.EpisodeSpec(n_way=5, k_shot=1, q_queries=5, seed=seed)
config = TrainConfig(spec=spec, episodes=80, eval_every=0, val_episodes=50,
                     seed=seed, pool="mean")
result = meta_train(train_set, val_set, config)
fsl = evaluate(result.params, test_set, spec, n_episodes=500, seed=seed + 1)
print(f"few-shot 5-way 1-shot accuracy on unseen classes: {fsl.accuracy:.4f}")

# Reference pool: plenty of samples for the sweep plus a held-out test set.
pool = fg.gen_synthetic(40, 120, noise_sigma=sigma, seed=seed).subset(test_set.classes)
outcome = sweep_sml(pool, 5, fsl, SmlConfig(seed=seed))
print(f"reference classes: {outcome.classes}")
for r in outcome.results:
    mark = " <- first to beat the few-shot model" \
        if r.samples_per_class == outcome.crossing else ""
    print(f"  {r.samples_per_class:3d} samples/class -> accuracy {r.test_accuracy:.4f}{mark}")

if outcome.crossing is None:
    print("no crossing up to 512 samples/class")
else:
    savings = make_savings_report(fsl, outcome)
    print(f"\nsavings: ({savings.sml_samples} - {savings.k_shot}) x {savings.n_way} "
          f"= {savings.savings} labelled samples avoided")
    assert savings.savings == compute_savings(savings.sml_samples, 1, 5)
