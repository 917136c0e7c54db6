"""Meta-train a small relation network on synthetic gestures and evaluate
it on classes it has never seen.

Runs in about a minute on a laptop CPU.
Run: python3 demos/03_meta_training.py
"""

import time

import fewgest as fg
from fewgest.data import partition_by_class
from fewgest.training import TrainConfig, evaluate, meta_train

ds = fg.gen_synthetic(n_classes=24, samples_per_class=12, noise_sigma=0.02, seed=5)
train_set, val_set, test_set = partition_by_class(ds, (12, 6, 6), seed=5)
print(f"classes: {len(train_set.classes)} train / {len(val_set.classes)} val / "
      f"{len(test_set.classes)} test (disjoint)")

spec = fg.EpisodeSpec(n_way=5, k_shot=1, q_queries=5, seed=5)
config = TrainConfig(
    spec=spec,
    episodes=400,
    eval_every=100,
    val_episodes=50,
    seed=5,
    hidden_size=48,
    relation_sizes=(96, 48),
)

t0 = time.time()
result = meta_train(train_set, val_set, config)
print(f"\ntrained {config.episodes} episodes in {time.time() - t0:.0f}s")
for h in result.history:
    if h.val_accuracy is not None:
        print(f"  episode {h.episode + 1:4d}: loss={h.loss_mse:.4f} "
              f"val_acc={h.val_accuracy:.3f}")

report = evaluate(result.params, test_set, spec, n_episodes=400, seed=123)
print(f"\nunseen-class evaluation: accuracy={report.accuracy:.4f} "
      f"+/- {report.ci95_halfwidth:.4f} (400 episodes)")
print("per-class accuracy:")
for label in sorted(report.per_class_accuracy):
    print(f"  {label}: {report.per_class_accuracy[label]:.3f}")
