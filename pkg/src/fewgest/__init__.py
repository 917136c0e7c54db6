"""Few-shot dynamic hand-gesture recognition on 3-D hand-landmark sequences."""

from .data import (
    GestureDataset,
    GestureSequence,
    SplitSpec,
    build_combined_dataset,
    concat_gestures,
    gen_synthetic,
    load_gsjl,
    partition_by_class,
    save_gsjl,
    split_by_original_class,
)
from .episodes import Episode, EpisodeSpec, sample_episode
from .relation import (
    RelationNetParams,
    embed,
    episode_loss,
    forward_episode,
    init_relation_net,
    pool_support,
    predict,
    relation_score,
)
from .training import EvalReport, TrainConfig, evaluate, meta_train, sweep
from .baseline import (
    SavingsReport,
    SmlConfig,
    SmlParams,
    SweepResult,
    compute_savings,
    init_sml,
    sweep_sml,
    train_sml,
)

__version__ = "0.1.0"
