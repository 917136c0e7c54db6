"""Generate synthetic hand-gesture data, inspect it, and build combined
two-gesture classes with the jump-adjusted concatenation.

Run: python3 demos/01_synthetic_gestures.py
"""

import numpy as np

import fewgest as fg

# Six trajectory families are cycled across classes; every sample is a
# 72-step sequence of 21 hand landmarks (63 floats per step) plus a
# validity flag per step.
ds = fg.gen_synthetic(n_classes=8, samples_per_class=5, noise_sigma=0.02, seed=7)
print(f"dataset: {len(ds)} samples across {len(ds.classes)} classes")
print("classes:", ", ".join(ds.classes))

seq = ds.samples[0]
print(f"\none sample: {seq.sample_id} ({seq.class_label})")
print(f"  frames {seq.frames.shape}, valid steps {int(seq.valid.sum())}/72")
wrist = seq.frames[seq.valid][:, :3]
print(f"  wrist x range [{wrist[:, 0].min():.3f}, {wrist[:, 0].max():.3f}], "
      f"y range [{wrist[:, 1].min():.3f}, {wrist[:, 1].max():.3f}]")

# Appending one gesture to another: the second gesture is rigidly
# translated so its wrist starts where the first one ended.
a = ds.samples_of(ds.classes[0])[0]
b = ds.samples_of(ds.classes[1])[0]
combo = fg.concat_gestures(a, b)
print(f"\nconcat: {a.class_label} + {b.class_label} -> {combo.class_label}")
raw_jump = np.abs(a.frames[a.last_valid, :3] - b.frames[b.first_valid, :3]).max()
va = np.flatnonzero(combo.valid)
steps = [np.abs(combo.frames[j, :3] - combo.frames[i, :3]).max()
         for i, j in zip(va[:-1], va[1:])]
print(f"  hand jump the raw append would create: {raw_jump:.4f}")
print(f"  largest wrist step in the adjusted result: {max(steps):.4f} "
      "(normal motion only; the junction itself is seamless)")

# Whole-dataset combination + GSJL round trip
combined = fg.build_combined_dataset(ds, samples_per_class=4, n_pairs=10, seed=3)
print(f"\ncombined dataset: {len(combined.classes)} classes, {len(combined)} samples")
fg.save_gsjl(combined, "/tmp/combined_demo.gsjl")
back = fg.load_gsjl("/tmp/combined_demo.gsjl")
print(f"GSJL round trip identical: {back == combined}")
