"""Sample N-way K-shot episodes and verify their guarantees by hand.

Run: python3 demos/02_episode_sampling.py
"""

import fewgest as fg

ds = fg.gen_synthetic(n_classes=12, samples_per_class=8, noise_sigma=0.02, seed=1)
spec = fg.EpisodeSpec(n_way=5, k_shot=2, q_queries=3, seed=99)

ep = fg.sample_episode(ds, spec, episode_index=0)
print("episode 0")
print("  classes:", ep.class_order)
for ci, shots in enumerate(ep.support):
    print(f"  support[{ep.class_order[ci]}]:", [s.sample_id for s in shots])
print("  queries:", [s.sample_id for s in ep.query])
print("  query labels:", list(map(int, ep.query_labels)))

# Episodes are pure functions of (seed, index): the same index replays the
# same task, a different index gives an independent one.
again = fg.sample_episode(ds, spec, episode_index=0)
other = fg.sample_episode(ds, spec, episode_index=1)
print("\nreplay identical:",
      [s.sample_id for s in again.query] == [s.sample_id for s in ep.query])
print("next index differs:",
      [s.sample_id for s in other.query] != [s.sample_id for s in ep.query])

# Support and query never share a sample.
support_ids = {s.sample_id for shots in ep.support for s in shots}
query_ids = {s.sample_id for s in ep.query}
print("support/query overlap:", support_ids & query_ids or "none")
