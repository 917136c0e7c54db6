"""Gesture sequence data model, GSJL file format, concatenation
augmentation, class-disjoint splitting and a synthetic gesture generator.

A gesture sample is a fixed-length sequence of 72 landmark frames. Each
frame holds 21 hand landmarks (wrist first) as x, y, z triples, 63 values
total, plus a validity flag; frames where no hand was detected are flagged
invalid and zero-filled. Coordinates are float32: x, y are normalized
image coordinates and z is a small wrist-relative depth.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import (
    CapacityError,
    InfeasibleSplitError,
    InvalidInputError,
    ParseError,
    SchemaError,
)

SEQ_LEN = 72
NUM_LANDMARKS = 21
FRAME_DIM = NUM_LANDMARKS * 3

# Stream-derivation tags so the different consumers of one user seed get
# independent Philox streams.
_TAG_CLASS = 1
_TAG_SAMPLE = 2
_TAG_PAIRING = 3
_TAG_SPLIT = 4
_TAG_EPISODE = 5


def make_rng(*key_parts):
    """Philox4x32 generator keyed by SeedSequence over the integer parts.

    Counter-based and stable across platforms, so every stream in this
    package is reproducible from the documented (seed, tag, index) key.
    """
    parts = [int(p) for p in key_parts]
    if any(p < 0 for p in parts):
        raise InvalidInputError(f"seed parts must be non-negative, got {parts}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(parts)))


class GestureSequence:
    """One gesture sample: 72 frames of 63 float32 coords + validity flags.

    Invalid frames are all-zero; at least one frame must be valid. Arrays
    are copied on construction and frozen (read-only views) afterwards.
    """

    __slots__ = ("frames", "valid", "class_label", "original_pair", "sample_id")

    def __init__(self, frames, valid, class_label, original_pair, sample_id):
        frames = np.array(frames, dtype=np.float32)
        valid = np.array(valid, dtype=bool)
        if frames.shape != (SEQ_LEN, FRAME_DIM):
            raise SchemaError(
                f"frames must be ({SEQ_LEN}, {FRAME_DIM}), got {frames.shape}"
            )
        if valid.shape != (SEQ_LEN,):
            raise SchemaError(f"valid must have length {SEQ_LEN}, got {valid.shape}")
        if not np.all(np.isfinite(frames)):
            raise SchemaError("frames contain non-finite values")
        if not valid.any():
            raise SchemaError("no valid frame")
        if np.any(frames[~valid] != 0.0):
            raise SchemaError("invalid frames must be all-zero")
        frames.setflags(write=False)
        valid.setflags(write=False)
        self.frames = frames
        self.valid = valid
        self.class_label = str(class_label)
        self.original_pair = (str(original_pair[0]), str(original_pair[1]))
        self.sample_id = str(sample_id)

    @property
    def first_valid(self):
        return int(np.argmax(self.valid))

    @property
    def last_valid(self):
        return SEQ_LEN - 1 - int(np.argmax(self.valid[::-1]))

    def original_classes(self):
        """Source class names this sample descends from.

        Un-combined samples (pair tagged "synthetic") count as their own
        original class.
        """
        if self.original_pair[0] == "synthetic":
            return frozenset([self.class_label])
        return frozenset(self.original_pair)

    def __eq__(self, other):
        if not isinstance(other, GestureSequence):
            return NotImplemented
        return (
            self.class_label == other.class_label
            and self.original_pair == other.original_pair
            and self.sample_id == other.sample_id
            and np.array_equal(self.valid, other.valid)
            and np.array_equal(self.frames, other.frames)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"GestureSequence({self.class_label!r}, id={self.sample_id!r}, "
            f"valid={int(self.valid.sum())}/{SEQ_LEN})"
        )


class GestureDataset:
    """Immutable collection of gesture samples with a per-class index."""

    __slots__ = ("samples", "class_index")

    def __init__(self, samples):
        samples = tuple(samples)
        index = {}
        seen_ids = {}
        for pos, s in enumerate(samples):
            if not isinstance(s, GestureSequence):
                raise InvalidInputError(f"sample {pos} is not a GestureSequence")
            if s.sample_id in seen_ids:
                raise InvalidInputError(
                    f"duplicate sample_id {s.sample_id!r} (samples "
                    f"{seen_ids[s.sample_id]} and {pos})"
                )
            seen_ids[s.sample_id] = pos
            index.setdefault(s.class_label, []).append(pos)
        self.samples = samples
        self.class_index = {k: tuple(v) for k, v in index.items()}

    @property
    def classes(self):
        return sorted(self.class_index)

    def samples_of(self, label):
        if label not in self.class_index:
            raise InvalidInputError(f"unknown class {label!r}")
        return [self.samples[i] for i in self.class_index[label]]

    def class_count(self, label):
        return len(self.class_index.get(label, ()))

    def subset(self, labels):
        keep = set(labels)
        missing = keep - set(self.class_index)
        if missing:
            raise InvalidInputError(f"unknown classes: {sorted(missing)}")
        return GestureDataset(s for s in self.samples if s.class_label in keep)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __eq__(self, other):
        if not isinstance(other, GestureDataset):
            return NotImplemented
        return len(self.samples) == len(other.samples) and all(
            a == b for a, b in zip(self.samples, other.samples)
        )

    __hash__ = None


# ---------------------------------------------------------------------------
# GSJL: Gesture Sequence JSON Lines
# ---------------------------------------------------------------------------

_GSJL_KEYS = ("class", "pair", "sample_id", "valid", "frames")


def _record_for(seq):
    return {
        "class": seq.class_label,
        "pair": [seq.original_pair[0], seq.original_pair[1]],
        "sample_id": seq.sample_id,
        "valid": [bool(v) for v in seq.valid],
        # float() of a float32 is exact, and json renders the shortest
        # decimal that parses back to the same value, so save -> load is
        # an identity.
        "frames": [[float(v) for v in row] for row in seq.frames],
    }


def save_gsjl(dataset, path):
    """Write a dataset in canonical GSJL form (byte-deterministic)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for seq in dataset.samples:
            fh.write(json.dumps(_record_for(seq), separators=(",", ":")))
            fh.write("\n")


def _reject_json_constant(name):
    raise ValueError(f"non-finite constant {name!r} not allowed")


def load_gsjl(path):
    """Read a GSJL file; '#'-prefixed comment lines are skipped.

    Schema violations raise SchemaError and malformed JSON raises
    ParseError, both with the offending line number.
    """
    samples = []
    id_lines = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line.startswith("#"):
                continue
            try:
                obj = json.loads(line, parse_constant=_reject_json_constant)
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
            samples.append(_sequence_from_record(obj, lineno))
            sid = samples[-1].sample_id
            if sid in id_lines:
                raise SchemaError(
                    f"line {lineno}: duplicate sample_id {sid!r} "
                    f"(first seen on line {id_lines[sid]})"
                )
            id_lines[sid] = lineno
    return GestureDataset(samples)


def _sequence_from_record(obj, lineno):
    if not isinstance(obj, dict):
        raise SchemaError(f"line {lineno}: expected a JSON object")
    extra = set(obj) - set(_GSJL_KEYS)
    missing = set(_GSJL_KEYS) - set(obj)
    if extra or missing:
        raise SchemaError(
            f"line {lineno}: bad keys (missing={sorted(missing)}, extra={sorted(extra)})"
        )
    if not isinstance(obj["class"], str) or not isinstance(obj["sample_id"], str):
        raise SchemaError(f"line {lineno}: 'class' and 'sample_id' must be strings")
    pair = obj["pair"]
    if (
        not isinstance(pair, list)
        or len(pair) != 2
        or not all(isinstance(p, str) for p in pair)
    ):
        raise SchemaError(f"line {lineno}: 'pair' must be a list of two strings")
    valid = obj["valid"]
    if not isinstance(valid, list) or len(valid) != SEQ_LEN or not all(
        isinstance(v, bool) for v in valid
    ):
        raise SchemaError(f"line {lineno}: 'valid' must be {SEQ_LEN} booleans")
    frames = obj["frames"]
    if not isinstance(frames, list) or len(frames) != SEQ_LEN:
        raise SchemaError(
            f"line {lineno}: 'frames' must hold {SEQ_LEN} rows, got "
            f"{len(frames) if isinstance(frames, list) else type(frames).__name__}"
        )
    for r, row in enumerate(frames):
        if (
            not isinstance(row, list)
            or len(row) != FRAME_DIM
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row)
        ):
            raise SchemaError(f"line {lineno}: frame {r} must hold {FRAME_DIM} numbers")
    try:
        return GestureSequence(frames, valid, obj["class"], pair, obj["sample_id"])
    except SchemaError as exc:
        raise SchemaError(f"line {lineno}: {exc}") from None


# ---------------------------------------------------------------------------
# Concatenation augmentation
# ---------------------------------------------------------------------------

def _subsample_indices(n, target, anchor):
    """Uniformly spaced frame indices from range(n), endpoints preserved.

    With target == 1 the anchor ('first' or 'last') decides which endpoint
    survives so the concatenation junction is never dropped.
    """
    if target >= n:
        return np.arange(n)
    if target == 1:
        return np.array([0 if anchor == "first" else n - 1])
    return np.round(np.linspace(0, n - 1, target)).astype(int)


def concat_gestures(a, b):
    """Append gesture b to gesture a with the hand jump adjusted away.

    The trailing segment of a (everything through its last valid frame)
    is kept as-is. b's span from first to last valid frame is rigidly
    translated so its first wrist position coincides with a's final wrist
    position, then the two segments are concatenated and fitted to 72
    frames: padded with invalid frames, or, on overflow, the longer
    segment is uniformly subsampled in time (junction frames always kept).
    """
    if not a.valid.any() or not b.valid.any():
        raise InvalidInputError("concat_gestures needs at least one valid frame per input")

    a_end = a.last_valid
    seg_a = a.frames[: a_end + 1]
    val_a = a.valid[: a_end + 1]

    b_start, b_end = b.first_valid, b.last_valid
    seg_b = b.frames[b_start: b_end + 1]
    val_b = b.valid[b_start: b_end + 1]

    # Wrist delta computed in float64: b_wrist + (a_wrist - b_wrist) is then
    # exact, so the junction discontinuity is exactly zero after rounding.
    delta3 = a.frames[a_end, :3].astype(np.float64) - b.frames[b_start, :3].astype(np.float64)
    if np.all(delta3 == 0.0):
        seg_b_shifted = seg_b.copy()
    else:
        shifted = seg_b.astype(np.float64)
        shifted[val_b] += np.tile(delta3, NUM_LANDMARKS)
        seg_b_shifted = shifted.astype(np.float32)
        seg_b_shifted[~val_b] = 0.0

    total = len(seg_a) + len(seg_b)
    if total > SEQ_LEN:
        overflow = total - SEQ_LEN
        if len(seg_a) >= len(seg_b):
            target = max(1, len(seg_a) - overflow)
            idx = _subsample_indices(len(seg_a), target, anchor="last")
            seg_a, val_a = seg_a[idx], val_a[idx]
        else:
            target = max(1, len(seg_b) - overflow)
            idx = _subsample_indices(len(seg_b), target, anchor="first")
            seg_b_shifted, val_b = seg_b_shifted[idx], val_b[idx]
        if len(seg_a) + len(seg_b_shifted) > SEQ_LEN:
            # Only reachable when one segment already spans all 72 frames.
            target = SEQ_LEN - len(seg_b_shifted)
            idx = _subsample_indices(len(seg_a), target, anchor="last")
            seg_a, val_a = seg_a[idx], val_a[idx]

    frames = np.zeros((SEQ_LEN, FRAME_DIM), dtype=np.float32)
    valid = np.zeros(SEQ_LEN, dtype=bool)
    n_a = len(seg_a)
    n_b = len(seg_b_shifted)
    frames[:n_a] = seg_a
    valid[:n_a] = val_a
    frames[n_a:n_a + n_b] = seg_b_shifted
    valid[n_a:n_a + n_b] = val_b

    return GestureSequence(
        frames,
        valid,
        class_label=f"{a.class_label}+{b.class_label}",
        original_pair=(a.class_label, b.class_label),
        sample_id=f"{a.sample_id}+{b.sample_id}",
    )


def _distinct_integers(rng, n, k):
    """k distinct integers from range(n), deterministic for a given rng."""
    if k > n:
        raise CapacityError(f"cannot draw {k} distinct values from {n}")
    if n <= 4 * k:
        return rng.permutation(n)[:k]
    chosen = []
    seen = set()
    while len(chosen) < k:
        for v in rng.integers(0, n, size=k):
            v = int(v)
            if v not in seen:
                seen.add(v)
                chosen.append(v)
                if len(chosen) == k:
                    break
    return np.array(chosen)


def enumerate_pairs(classes, ordered=True, self_pairs=False):
    """Class-pair plan in deterministic enumeration order."""
    pairs = []
    for i, c1 in enumerate(classes):
        for j, c2 in enumerate(classes):
            if i == j and not self_pairs:
                continue
            if not ordered and j < i:
                continue
            pairs.append((c1, c2))
    return pairs


def build_combined_dataset(base, samples_per_class=250, n_pairs=None, seed=0,
                           ordered=True, self_pairs=False):
    """Create combined two-gesture classes from every selected class pair.

    Each selected (c1, c2) pair becomes one combined class holding
    samples_per_class concatenations of a c1 sample with a c2 sample,
    drawn as distinct source-index pairs. Deterministic for a fixed seed.
    """
    classes = base.classes
    if len(classes) < 2:
        raise InvalidInputError("build_combined_dataset needs at least 2 base classes")
    all_pairs = enumerate_pairs(classes, ordered=ordered, self_pairs=self_pairs)
    if n_pairs is None:
        chosen = list(enumerate(all_pairs))
    else:
        if n_pairs < 1 or n_pairs > len(all_pairs):
            raise CapacityError(
                f"n_pairs={n_pairs} outside 1..{len(all_pairs)} available pairs"
            )
        order = make_rng(seed, _TAG_PAIRING).permutation(len(all_pairs))
        chosen = sorted((int(i), all_pairs[int(i)]) for i in order[:n_pairs])

    out = []
    for pair_idx, (c1, c2) in chosen:
        src_a = base.samples_of(c1)
        src_b = base.samples_of(c2)
        n_combos = len(src_a) * len(src_b)
        if n_combos < samples_per_class:
            short = c1 if len(src_a) <= len(src_b) else c2
            raise CapacityError(
                f"class {short!r} has too few samples: {len(src_a)}x{len(src_b)} "
                f"combinations < {samples_per_class}"
            )
        rng = make_rng(seed, _TAG_PAIRING, pair_idx)
        for combo in _distinct_integers(rng, n_combos, samples_per_class):
            a = src_a[int(combo) // len(src_b)]
            b = src_b[int(combo) % len(src_b)]
            out.append(concat_gestures(a, b))
    return GestureDataset(out)


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------

class SplitSpec:
    """Class-count targets for a train/val/test split of original classes."""

    __slots__ = ("train_classes", "val_classes", "test_classes", "seed")

    def __init__(self, train_classes, val_classes, test_classes, seed=0):
        for name, v in (("train", train_classes), ("val", val_classes),
                        ("test", test_classes)):
            if int(v) < 1:
                raise InvalidInputError(f"{name} class count must be >= 1, got {v}")
        self.train_classes = int(train_classes)
        self.val_classes = int(val_classes)
        self.test_classes = int(test_classes)
        self.seed = int(seed)


def split_by_original_class(dataset, spec):
    """Partition combined classes so no original gesture leaks across splits.

    Original class names are shuffled (seeded) and dealt into three
    disjoint groups of the requested sizes; a combined class lands in a
    split only when both of its originals belong to that split's group,
    and classes straddling groups are dropped.
    """
    class_originals = {}
    for seq in dataset.samples:
        orig = seq.original_classes()
        prev = class_originals.setdefault(seq.class_label, orig)
        if prev != orig:
            raise InvalidInputError(
                f"class {seq.class_label!r} has inconsistent original pairs"
            )
    names = sorted(set().union(*class_originals.values()))
    need = spec.train_classes + spec.val_classes + spec.test_classes
    if len(names) < need:
        raise InfeasibleSplitError(
            f"{len(names)} original classes cannot fill groups of {need}"
        )
    perm = make_rng(spec.seed, _TAG_SPLIT).permutation(len(names))
    shuffled = [names[int(i)] for i in perm]
    groups = {
        "train": frozenset(shuffled[: spec.train_classes]),
        "val": frozenset(shuffled[spec.train_classes: spec.train_classes + spec.val_classes]),
        "test": frozenset(
            shuffled[spec.train_classes + spec.val_classes: need]
        ),
    }
    out = {}
    for split, group in groups.items():
        keep = {c for c, orig in class_originals.items() if orig <= group}
        if not keep:
            raise InfeasibleSplitError(f"{split} split received zero classes")
        out[split] = GestureDataset(s for s in dataset.samples if s.class_label in keep)
    return out["train"], out["val"], out["test"]


def partition_by_class(dataset, sizes, seed=0):
    """Deal the dataset's class labels into disjoint groups of given sizes.

    Plain class-level partition (no original-pair logic); returns one
    dataset per requested size, in order.
    """
    labels = dataset.classes
    if sum(sizes) > len(labels):
        raise CapacityError(f"cannot split {len(labels)} classes into groups of {sizes}")
    if any(s < 1 for s in sizes):
        raise InvalidInputError("every partition size must be >= 1")
    perm = make_rng(seed, _TAG_SPLIT, len(sizes)).permutation(len(labels))
    shuffled = [labels[int(i)] for i in perm]
    out = []
    pos = 0
    for s in sizes:
        out.append(dataset.subset(shuffled[pos: pos + s]))
        pos += s
    return out


# ---------------------------------------------------------------------------
# Synthetic gesture generator
# ---------------------------------------------------------------------------

# Rest pose of a right hand, wrist-relative offsets in MediaPipe landmark
# order (wrist, thumb x4, index x4, middle x4, ring x4, pinky x4).
HAND_TEMPLATE = np.array([
    [0.000, 0.000, 0.000],
    [-0.040, -0.030, 0.012], [-0.070, -0.060, 0.018], [-0.090, -0.090, 0.020], [-0.100, -0.120, 0.022],
    [-0.030, -0.110, 0.004], [-0.035, -0.150, 0.006], [-0.040, -0.180, 0.008], [-0.040, -0.210, 0.010],
    [0.000, -0.115, 0.000], [0.000, -0.160, 0.002], [0.000, -0.195, 0.004], [0.000, -0.230, 0.006],
    [0.030, -0.110, -0.004], [0.035, -0.150, -0.006], [0.040, -0.180, -0.008], [0.045, -0.210, -0.010],
    [0.055, -0.100, -0.008], [0.065, -0.130, -0.012], [0.070, -0.155, -0.014], [0.075, -0.180, -0.016],
])

TRAJECTORY_FAMILIES = ("line", "circle", "eight", "zigzag", "spiral", "arc")


def _wrist_path(family, t, q):
    """Wrist position at phase t in [0, 1] for one parameterized family."""
    cx, cy = q["cx"], q["cy"]
    if family == "line":
        return (
            cx + (t - 0.5) * q["len"] * math.cos(q["ang"]),
            cy + (t - 0.5) * q["len"] * math.sin(q["ang"]),
        )
    if family == "circle":
        a = q["phase"] + q["dir"] * 2 * math.pi * q["turns"] * t
        return cx + q["r"] * math.cos(a), cy + q["r"] * math.sin(a)
    if family == "eight":
        a = q["phase"] + q["dir"] * 2 * math.pi * t
        return cx + q["rx"] * math.sin(a), cy + q["ry"] * math.sin(2 * a)
    if family == "zigzag":
        main = (t - 0.5) * q["len"]
        saw = 2 * abs((t * q["zigs"]) % 1.0 - 0.5) - 0.5
        perp = saw * q["amp"]
        ca, sa = math.cos(q["ang"]), math.sin(q["ang"])
        return cx + main * ca - perp * sa, cy + main * sa + perp * ca
    if family == "spiral":
        a = q["phase"] + q["dir"] * 2 * math.pi * q["turns"] * t
        r = q["r0"] + (q["r1"] - q["r0"]) * t
        return cx + r * math.cos(a), cy + r * math.sin(a)
    if family == "arc":
        a = q["phase"] + q["dir"] * q["span"] * t
        return cx + q["r"] * math.cos(a), cy + q["r"] * math.sin(a)
    raise InvalidInputError(f"unknown trajectory family {family!r}")


def _class_geometry(family, rng):
    q = {
        "cx": rng.uniform(0.38, 0.62),
        "cy": rng.uniform(0.42, 0.66),
        "dir": 1.0 if rng.integers(0, 2) == 0 else -1.0,
        "phase": rng.uniform(0, 2 * math.pi),
        "ang": rng.uniform(0, 2 * math.pi),
        "z_amp": rng.uniform(0.02, 0.15),
        "z_freq": rng.uniform(0.5, 2.5),
        "z_phase": rng.uniform(0, 2 * math.pi),
        "scale": rng.uniform(0.55, 0.8),
    }
    if family == "line":
        q["len"] = rng.uniform(0.18, 0.42)
    elif family == "circle":
        q["r"] = rng.uniform(0.08, 0.2)
        q["turns"] = rng.uniform(0.8, 2.0)
    elif family == "eight":
        q["rx"] = rng.uniform(0.1, 0.2)
        q["ry"] = rng.uniform(0.06, 0.14)
    elif family == "zigzag":
        q["len"] = rng.uniform(0.2, 0.4)
        q["amp"] = rng.uniform(0.06, 0.16)
        q["zigs"] = int(rng.integers(3, 7))
    elif family == "spiral":
        q["r0"] = rng.uniform(0.02, 0.06)
        q["r1"] = rng.uniform(0.14, 0.22)
        q["turns"] = rng.uniform(1.2, 2.5)
    elif family == "arc":
        q["r"] = rng.uniform(0.12, 0.22)
        q["span"] = rng.uniform(0.6 * math.pi, 1.6 * math.pi)
    return q


def gen_synthetic(n_classes, samples_per_class, noise_sigma=0.01, seed=0):
    """Synthetic landmark gestures: one wrist trajectory per class.

    Trajectory families are cycled across classes and re-parameterized per
    class (direction, size, frequency), the rest-pose hand template rides
    along the wrist path, and per-sample Gaussian noise of the given sigma
    is added to valid frames. The active span length and placement are
    class-level draws, so noise_sigma=0 makes all samples of a class
    byte-identical. Everything is deterministic per seed, and sample i of
    class c does not change when n_classes or samples_per_class grow.
    """
    if n_classes < 2:
        raise InvalidInputError("gen_synthetic needs n_classes >= 2")
    if samples_per_class < 1:
        raise InvalidInputError("samples_per_class must be >= 1")
    samples = []
    for c in range(n_classes):
        family = TRAJECTORY_FAMILIES[c % len(TRAJECTORY_FAMILIES)]
        label = f"{family}-{c:03d}"
        crng = make_rng(seed, _TAG_CLASS, c)
        q = _class_geometry(family, crng)
        length = int(crng.integers(37, 56))
        start = int(crng.integers(0, SEQ_LEN - length + 1))

        base = np.zeros((length, FRAME_DIM))
        hand = HAND_TEMPLATE * q["scale"]
        for k in range(length):
            t = k / (length - 1)
            wx, wy = _wrist_path(family, t, q)
            wz = q["z_amp"] * math.sin(2 * math.pi * q["z_freq"] * t + q["z_phase"])
            frame = hand + np.array([wx, wy, wz])
            base[k] = frame.ravel()

        for s in range(samples_per_class):
            coords = base
            if noise_sigma > 0:
                srng = make_rng(seed, _TAG_SAMPLE, c, s)
                coords = base + srng.normal(0.0, noise_sigma, size=base.shape)
            coords = coords.copy()
            coords[:, 0::3] = np.clip(coords[:, 0::3], 0.0, 1.0)
            coords[:, 1::3] = np.clip(coords[:, 1::3], 0.0, 1.0)
            coords[:, 2::3] = np.clip(coords[:, 2::3], -1.0, 1.0)
            frames = np.zeros((SEQ_LEN, FRAME_DIM), dtype=np.float32)
            valid = np.zeros(SEQ_LEN, dtype=bool)
            frames[start:start + length] = coords.astype(np.float32)
            valid[start:start + length] = True
            samples.append(GestureSequence(
                frames, valid,
                class_label=label,
                original_pair=("synthetic", family),
                sample_id=f"{label}-{s:04d}",
            ))
    return GestureDataset(samples)
