"""Regenerate the bundled sample clip: a bright marker sweeping an arc for
~2.6 seconds followed by empty frames, 90 frames total at 30 fps.

The committed clip under data/ is the test fixture; rerun this script only
when the fixture needs to change.
"""

import math
from pathlib import Path

import cv2
import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data" / "sample_clip.avi"
W, H, FPS, FRAMES = 160, 120, 30, 90
BLANK_TAIL = 12


def main():
    OUT.parent.mkdir(parents=True, exist_ok=True)
    writer = cv2.VideoWriter(str(OUT), cv2.VideoWriter_fourcc(*"MJPG"), FPS, (W, H))
    for i in range(FRAMES):
        frame = np.zeros((H, W, 3), dtype=np.uint8)
        if i < FRAMES - BLANK_TAIL:
            t = i / (FRAMES - BLANK_TAIL - 1)
            angle = math.pi * (0.25 + 1.2 * t)
            cx = int(W * (0.5 + 0.3 * math.cos(angle)))
            cy = int(H * (0.55 - 0.3 * math.sin(angle)))
            cv2.circle(frame, (cx, cy), 6, (255, 255, 255), -1)
        writer.write(frame)
    writer.release()
    print(f"wrote {OUT} ({FRAMES} frames, {BLANK_TAIL} blank)")


if __name__ == "__main__":
    main()
