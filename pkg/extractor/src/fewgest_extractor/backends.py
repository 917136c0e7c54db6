"""Per-frame hand-landmark detection backends.

A backend turns one BGR frame into 21 (x, y, z) landmark triples in
normalized image coordinates, or None when no hand is found. MediaPipe
Hands is the production backend; the marker backend tracks a bright
blob so the pipeline can be exercised deterministically on synthetic
clips and in environments without mediapipe.
"""

from __future__ import annotations

import numpy as np

NUM_LANDMARKS = 21

# Rest-pose offsets around the tracked point, wrist first (same landmark
# ordering as the hand model: thumb, index, middle, ring, pinky chains).
_MARKER_TEMPLATE = np.array([
    [0.000, 0.000, 0.000],
    [-0.040, -0.030, 0.012], [-0.070, -0.060, 0.018], [-0.090, -0.090, 0.020], [-0.100, -0.120, 0.022],
    [-0.030, -0.110, 0.004], [-0.035, -0.150, 0.006], [-0.040, -0.180, 0.008], [-0.040, -0.210, 0.010],
    [0.000, -0.115, 0.000], [0.000, -0.160, 0.002], [0.000, -0.195, 0.004], [0.000, -0.230, 0.006],
    [0.030, -0.110, -0.004], [0.035, -0.150, -0.006], [0.040, -0.180, -0.008], [0.045, -0.210, -0.010],
    [0.055, -0.100, -0.008], [0.065, -0.130, -0.012], [0.070, -0.155, -0.014], [0.075, -0.180, -0.016],
])


class MarkerBackend:
    """Tracks the brightest blob in the frame and drapes a fixed hand
    template over it. Fully deterministic; intended for synthetic clips
    and tests."""

    name = "marker"
    version = "1"

    def __init__(self, threshold=200, min_pixels=12):
        self.threshold = threshold
        self.min_pixels = min_pixels

    def detect(self, frame_bgr):
        gray = frame_bgr.max(axis=2)
        mask = gray >= self.threshold
        count = int(mask.sum())
        if count < self.min_pixels:
            return None
        ys, xs = np.nonzero(mask)
        h, w = gray.shape
        cx = float(xs.mean()) / w
        cy = float(ys.mean()) / h
        landmarks = _MARKER_TEMPLATE * 0.6 + np.array([cx, cy, 0.0])
        return landmarks


class MediaPipeBackend:
    """MediaPipe Hands wrapper: highest-confidence single hand per frame."""

    name = "mediapipe"

    def __init__(self, min_detection_confidence=0.5):
        import mediapipe as mp  # deferred: optional dependency

        self.version = mp.__version__
        self._hands = mp.solutions.hands.Hands(
            static_image_mode=False,
            max_num_hands=1,
            min_detection_confidence=min_detection_confidence,
        )
        self._cv2 = __import__("cv2")

    def detect(self, frame_bgr):
        rgb = self._cv2.cvtColor(frame_bgr, self._cv2.COLOR_BGR2RGB)
        result = self._hands.process(rgb)
        if not result.multi_hand_landmarks:
            return None
        hand = result.multi_hand_landmarks[0]
        return np.array([[lm.x, lm.y, lm.z] for lm in hand.landmark])

    def close(self):
        self._hands.close()


def resolve_backend(name):
    """Backend by name; 'auto' prefers mediapipe and falls back to marker."""
    if name == "marker":
        return MarkerBackend()
    if name == "mediapipe":
        return MediaPipeBackend()
    if name == "auto":
        try:
            return MediaPipeBackend()
        except ImportError:
            return MarkerBackend()
    raise ValueError(f"unknown backend {name!r}")
