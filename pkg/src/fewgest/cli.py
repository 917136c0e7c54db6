"""Command-line surface: dataset synthesis, combination, splitting,
meta-training, evaluation, the reference-model sweep and savings reports.

Exit codes: 0 success, 1 usage or bad arguments, 2 I/O problems,
3 infeasible data, 4 checkpoint/config mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from .baseline import (
    SmlConfig,
    compute_savings,
    make_savings_report,
    sweep_sml,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .data import (
    SplitSpec,
    build_combined_dataset,
    gen_synthetic,
    load_gsjl,
    save_gsjl,
    split_by_original_class,
)
from .episodes import EpisodeSpec
from .errors import (
    CapacityError,
    CheckpointError,
    ConfigError,
    FewgestError,
    InfeasibleSplitError,
    InvalidInputError,
    ParseError,
    SchemaError,
)
from .training import EvalReport, TrainConfig, evaluate, meta_train, write_history_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DATA = 3
EXIT_MISMATCH = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that raises instead of calling sys.exit(2)."""

    def error(self, message):
        raise _UsageError(message)


# Keys accepted in a --config JSON document (strict: anything else is
# rejected so stale experiment files fail loudly).
_CONFIG_KEYS = {
    "n_way": int, "k_shot": int, "q_queries": int,
    "episodes": int, "learning_rate": float,
    "beta1": float, "beta2": float, "eps": float,
    "eval_every": int, "val_episodes": int, "seed": int,
    "hidden_size": int, "relation_sizes": list, "pool": str,
    "clip_norm": float,
}

_CONFIG_DEFAULTS = {
    "n_way": 5, "k_shot": 1, "q_queries": 5,
    "episodes": 20000, "learning_rate": 1e-3,
    "beta1": 0.9, "beta2": 0.999, "eps": 1e-8,
    "eval_every": 500, "val_episodes": 100, "seed": 0,
    "hidden_size": 64, "relation_sizes": [128, 64], "pool": "sum",
    "clip_norm": 5.0,
}


def _load_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(obj) - set(_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    return obj


def _effective_config(args):
    """Merge defaults, config file and flag overrides (flags win)."""
    cfg = dict(_CONFIG_DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(_load_config_file(args.config))
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    if isinstance(cfg["relation_sizes"], str):
        cfg["relation_sizes"] = [int(v) for v in cfg["relation_sizes"].split(",") if v]
    cfg["relation_sizes"] = [int(v) for v in cfg["relation_sizes"]]
    if cfg["pool"] not in ("sum", "mean"):
        raise ConfigError(f"pool must be 'sum' or 'mean', got {cfg['pool']!r}")
    return cfg


def _config_digest(cfg):
    text = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _limit_threads(n):
    if n is None:
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=int(n))
    except Exception:
        print(f"warning: could not cap worker threads at {n}", file=sys.stderr)


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS worker threads (default: all cores)")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_gen_synthetic(args):
    ds = gen_synthetic(args.classes, args.samples, noise_sigma=args.noise,
                       seed=args.seed or 0)
    save_gsjl(ds, args.out)
    print(f"wrote {len(ds)} samples / {len(ds.classes)} classes to {args.out}")
    return EXIT_OK


def _cmd_build_dataset(args):
    base = load_gsjl(args.infile)
    combined = build_combined_dataset(
        base,
        samples_per_class=args.samples_per_class,
        n_pairs=args.pairs,
        seed=args.seed or 0,
        ordered=not args.unordered,
        self_pairs=args.self_pairs,
    )
    save_gsjl(combined, args.out)
    print(f"wrote {len(combined)} samples / {len(combined.classes)} combined "
          f"classes to {args.out}")
    return EXIT_OK


def _cmd_split(args):
    ds = load_gsjl(args.infile)
    spec = SplitSpec(args.train, args.val, args.test, seed=args.seed or 0)
    train, val, test = split_by_original_class(ds, spec)
    overlap = set()
    for a in (train, val, test):
        for b in (train, val, test):
            if a is not b:
                oa = set().union(*(s.original_classes() for s in a))
                ob = set().union(*(s.original_classes() for s in b))
                overlap |= oa & ob
    for name, part in (("train", train), ("val", val), ("test", test)):
        path = f"{args.out_prefix}.{name}.gsjl"
        save_gsjl(part, path)
        print(f"{name}: {len(part.classes)} classes / {len(part)} samples -> {path}")
    print(f"original-class overlap across splits: {len(overlap)} (must be 0)")
    return EXIT_OK


def _train_config_from(cfg):
    spec = EpisodeSpec(cfg["n_way"], cfg["k_shot"], cfg["q_queries"], seed=cfg["seed"])
    return TrainConfig(
        spec=spec,
        episodes=cfg["episodes"],
        learning_rate=cfg["learning_rate"],
        beta1=cfg["beta1"], beta2=cfg["beta2"], eps=cfg["eps"],
        eval_every=cfg["eval_every"],
        val_episodes=cfg["val_episodes"],
        seed=cfg["seed"],
        hidden_size=cfg["hidden_size"],
        relation_sizes=tuple(cfg["relation_sizes"]),
        pool=cfg["pool"],
        clip_norm=cfg["clip_norm"],
    )


def _cmd_train(args):
    cfg = _effective_config(args)
    print("config:", json.dumps(cfg, sort_keys=True))
    train_set = load_gsjl(args.train_data)
    val_set = load_gsjl(args.val_data)
    result = meta_train(train_set, val_set, _train_config_from(cfg))
    save_checkpoint(result.params, args.out, config_digest=_config_digest(cfg),
                    episode_seed=cfg["seed"])
    if args.history:
        write_history_csv(result.history, args.history)
    print(f"best val accuracy={result.best_val_accuracy:.4f} -> {args.out}")
    return EXIT_OK


def _cmd_eval(args):
    params, header = load_checkpoint(args.model)
    if header.get("model") != "relation":
        raise CheckpointError(
            f"{args.model} holds a {header.get('model')!r} model, expected 'relation'"
        )
    if args.hidden_size is not None and args.hidden_size != header["hidden_size"]:
        raise CheckpointError(
            f"--hidden-size {args.hidden_size} != checkpoint hidden_size "
            f"{header['hidden_size']}"
        )
    ds = load_gsjl(args.data)
    spec = EpisodeSpec(args.n_way, args.k_shot, 1, seed=args.seed or 0)
    report = evaluate(params, ds, spec, n_episodes=args.episodes, seed=args.seed or 0)
    print(f"accuracy={report.accuracy:.4f} ci95={report.ci95_halfwidth:.4f} "
          f"episodes={report.episodes}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    return EXIT_OK


def _cmd_train_sml(args):
    ds = load_gsjl(args.data)
    with open(args.fsl_report, "r", encoding="utf-8") as fh:
        report = EvalReport.from_json(fh.read())
    config = SmlConfig(epochs=args.epochs, learning_rate=args.lr,
                       batch_size=args.batch_size, seed=args.seed or 0)
    outcome = sweep_sml(ds, args.n, report, config)
    for r in outcome.results:
        print(f"samples_per_class={r.samples_per_class} accuracy={r.test_accuracy:.4f}")
    if outcome.crossing is None:
        print("no crossing: no sweep point exceeded the few-shot accuracy")
    else:
        print(f"crossing at samples_per_class={outcome.crossing}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(outcome.to_json())
            fh.write("\n")
    return EXIT_OK


def _cmd_savings(args):
    direct = args.sml_samples is not None
    if direct:
        if args.k_shot is None or args.n_way is None:
            raise _UsageError("--sml-samples needs --k-shot and --n-way")
        print(compute_savings(args.sml_samples, args.k_shot, args.n_way))
        return EXIT_OK
    if not args.fsl_report or not args.sweep:
        raise _UsageError("need either --sml-samples/--k-shot/--n-way or "
                          "--fsl-report and --sweep")
    from .baseline import SweepOutcome

    with open(args.fsl_report, "r", encoding="utf-8") as fh:
        report = EvalReport.from_json(fh.read())
    with open(args.sweep, "r", encoding="utf-8") as fh:
        outcome = SweepOutcome.from_json(fh.read())
    savings = make_savings_report(report, outcome)
    print(savings.savings)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(savings.to_json())
            fh.write("\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="fewgest",
                     description="few-shot hand-gesture recognition toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synthetic", help="write a synthetic GSJL dataset")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--samples", type=int, required=True, help="samples per class")
    p.add_argument("--noise", type=float, default=0.01, help="coordinate noise sigma")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_gen_synthetic)

    p = sub.add_parser("build-dataset", help="combine class pairs into new classes")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--samples-per-class", type=int, default=250)
    p.add_argument("--pairs", type=int, default=None,
                   help="number of class pairs (default: all ordered pairs)")
    p.add_argument("--self-pairs", action="store_true")
    p.add_argument("--unordered", action="store_true")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_build_dataset)

    p = sub.add_parser("split", help="split combined classes without original leakage")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--train", type=int, required=True, help="original classes in train")
    p.add_argument("--val", type=int, required=True)
    p.add_argument("--test", type=int, required=True)
    p.add_argument("--out-prefix", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("train", help="episodic meta-training")
    p.add_argument("--train", dest="train_data", required=True, help="train GSJL")
    p.add_argument("--val", dest="val_data", required=True, help="validation GSJL")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--n-way", dest="n_way", type=int, default=None)
    p.add_argument("--k-shot", dest="k_shot", type=int, default=None)
    p.add_argument("--queries", dest="q_queries", type=int, default=None)
    p.add_argument("--episodes", type=int, default=None)
    p.add_argument("--lr", dest="learning_rate", type=float, default=None)
    p.add_argument("--eval-every", dest="eval_every", type=int, default=None)
    p.add_argument("--val-episodes", dest="val_episodes", type=int, default=None)
    p.add_argument("--hidden", dest="hidden_size", type=int, default=None)
    p.add_argument("--relation-sizes", dest="relation_sizes", default=None,
                   help="comma separated, e.g. 128,64")
    p.add_argument("--pool", choices=("sum", "mean"), default=None)
    p.add_argument("--out", required=True, help="checkpoint path (.rnck)")
    p.add_argument("--history", default=None, help="training history CSV path")
    _add_common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint over many episodes")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--n-way", dest="n_way", type=int, default=5)
    p.add_argument("--k-shot", dest="k_shot", type=int, default=1)
    p.add_argument("--episodes", type=int, default=1000)
    p.add_argument("--hidden-size", dest="hidden_size", type=int, default=None,
                   help="assert the checkpoint was built at this size")
    p.add_argument("--report", default=None, help="write EvalReport JSON here")
    _add_common(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("train-sml", help="reference-classifier sweep vs an FSL report")
    p.add_argument("--data", required=True, help="GSJL pool for the reference classes")
    p.add_argument("--fsl-report", required=True, help="EvalReport JSON")
    p.add_argument("--n", type=int, default=5, help="number of reference classes")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--out", default=None, help="write sweep JSON here")
    _add_common(p)
    p.set_defaults(func=_cmd_train_sml)

    p = sub.add_parser("savings", help="samples saved by the few-shot approach")
    p.add_argument("--sml-samples", type=int, default=None)
    p.add_argument("--k-shot", dest="k_shot", type=int, default=None)
    p.add_argument("--n-way", dest="n_way", type=int, default=None)
    p.add_argument("--fsl-report", default=None)
    p.add_argument("--sweep", default=None)
    p.add_argument("--out", default=None, help="write SavingsReport JSON here")
    _add_common(p)
    p.set_defaults(func=_cmd_savings)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _limit_threads(getattr(args, "threads", None))
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, InfeasibleSplitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (ParseError, SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FewgestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
