"""Video to GSJL conversion: per-frame landmark detection, fitting to the
fixed 72-step sequence length, and canonical GSJL serialization.

The GSJL wire format is the only coupling to the recognition library:
one JSON object per line with keys (class, pair, sample_id, valid,
frames), '#'-prefixed comment lines carrying extractor provenance.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SEQ_LEN = 72
FRAME_DIM = 63

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass
class ExtractionJob:
    input_path: str
    class_label: str
    sample_id: str
    target_length: int = SEQ_LEN


def _read_frames(path):
    import cv2

    p = Path(path)
    if p.is_dir():
        files = sorted(f for f in p.iterdir() if f.suffix.lower() in IMAGE_SUFFIXES)
        if not files:
            raise IOError(f"{path}: no frame images found")
        frames = []
        for f in files:
            img = cv2.imread(str(f))
            if img is None:
                raise IOError(f"{f}: unreadable image")
            frames.append(img)
        return frames
    cap = cv2.VideoCapture(str(p))
    if not cap.isOpened():
        raise IOError(f"{path}: unreadable video")
    frames = []
    while True:
        ok, frame = cap.read()
        if not ok:
            break
        frames.append(frame)
    cap.release()
    if not frames:
        raise IOError(f"{path}: video holds no frames")
    return frames


def subsample_indices(n_frames, target):
    """Uniform temporal subsampling: index i maps to round(i * n / target).

    Ties round to even (numpy semantics). Requires n_frames >= target.
    """
    idx = np.round(np.arange(target) * (n_frames / target)).astype(int)
    return np.minimum(idx, n_frames - 1)


def fit_to_length(coords, valid, target=SEQ_LEN):
    """Pad with invalid frames or uniformly subsample to the target length."""
    coords = np.asarray(coords, dtype=np.float32)
    valid = np.asarray(valid, dtype=bool)
    n = len(valid)
    if n > target:
        idx = subsample_indices(n, target)
        return coords[idx], valid[idx]
    if n < target:
        out_c = np.zeros((target, FRAME_DIM), dtype=np.float32)
        out_v = np.zeros(target, dtype=bool)
        out_c[:n] = coords
        out_v[:n] = valid
        return out_c, out_v
    return coords, valid


def extract_frames(frames, backend, target_length=SEQ_LEN):
    """Detect landmarks per frame and fit the sequence to target_length.

    Undetected frames are zero-filled and flagged invalid. Detected
    coordinates are clamped into the normalized ranges (x, y in [0, 1],
    |z| <= 1) at this ingestion boundary.
    """
    coords = np.zeros((len(frames), FRAME_DIM), dtype=np.float32)
    valid = np.zeros(len(frames), dtype=bool)
    for i, frame in enumerate(frames):
        landmarks = backend.detect(frame)
        if landmarks is None:
            continue
        pts = np.asarray(landmarks, dtype=np.float64)
        pts[:, 0] = np.clip(pts[:, 0], 0.0, 1.0)
        pts[:, 1] = np.clip(pts[:, 1], 0.0, 1.0)
        pts[:, 2] = np.clip(pts[:, 2], -1.0, 1.0)
        coords[i] = pts.ravel().astype(np.float32)
        valid[i] = True
    return fit_to_length(coords, valid, target_length)


def gsjl_record(coords, valid, class_label, sample_id):
    """Canonical GSJL line (keys ordered class, pair, sample_id, valid,
    frames; shortest round-trip float rendering)."""
    record = {
        "class": class_label,
        "pair": ["extracted", class_label],
        "sample_id": sample_id,
        "valid": [bool(v) for v in valid],
        "frames": [[float(v) for v in row] for row in coords],
    }
    return json.dumps(record, separators=(",", ":"))


def extract_video(job, backend, out_path, append=False):
    """Run one extraction job and write (or append) its GSJL record.

    Returns the number of valid frames. A clip with zero detected hands
    still produces a record, with a warning: the recognition library's
    loader rejects such records ('no valid frame'), which is the
    documented contract for hand-free clips.
    """
    frames = _read_frames(job.input_path)
    coords, valid = extract_frames(frames, backend, job.target_length)
    n_valid = int(valid.sum())
    if n_valid == 0:
        print(
            f"warning: no hand detected in {job.input_path}; the record "
            "will be rejected by the dataset loader",
            file=sys.stderr,
        )
    mode = "a" if append else "w"
    with open(out_path, mode, encoding="utf-8", newline="\n") as fh:
        fh.write(f"# fewgest-extractor backend={backend.name} "
                 f"version={backend.version} source={Path(job.input_path).name}\n")
        fh.write(gsjl_record(coords, valid, job.class_label, job.sample_id))
        fh.write("\n")
    return n_valid
