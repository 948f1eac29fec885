"""Deterministic stub face detection.

A "face" is a connected region that differs from the flat background, which
is enough to drive the adapter's control flow (no face / one face / several
faces) without any model. The background level is the modal border pixel;
regions smaller than MIN_REGION_PIXELS are treated as noise. When several
regions are found, the most prominent one wins: largest bounding-box area,
ties broken by leftmost then topmost corner.
"""

from __future__ import annotations

import hashlib
from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .media import to_gray

INTENSITY_TOL = 8
MIN_REGION_PIXELS = 4


@dataclass(frozen=True)
class FaceBox:
    x0: int
    y0: int
    x1: int  # exclusive
    y1: int  # exclusive

    @property
    def area(self) -> int:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


def find_faces(image: np.ndarray) -> list[FaceBox]:
    gray = to_gray(image).astype(np.int64)
    h, w = gray.shape
    border = np.concatenate([gray[0, :], gray[-1, :], gray[:, 0], gray[:, -1]])
    background = Counter(border.tolist()).most_common(1)[0][0]
    mask = np.abs(gray - background) > INTENSITY_TOL

    boxes: list[FaceBox] = []
    seen = np.zeros_like(mask, dtype=bool)
    for sy, sx in zip(*np.nonzero(mask)):
        if seen[sy, sx]:
            continue
        queue = deque([(int(sy), int(sx))])
        seen[sy, sx] = True
        pixels = 0
        x0, y0, x1, y1 = int(sx), int(sy), int(sx), int(sy)
        while queue:
            cy, cx = queue.popleft()
            pixels += 1
            x0, x1 = min(x0, cx), max(x1, cx)
            y0, y1 = min(y0, cy), max(y1, cy)
            for ny, nx in ((cy - 1, cx), (cy + 1, cx), (cy, cx - 1), (cy, cx + 1)):
                if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                    seen[ny, nx] = True
                    queue.append((ny, nx))
        if pixels >= MIN_REGION_PIXELS:
            boxes.append(FaceBox(x0, y0, x1 + 1, y1 + 1))
    return boxes


def most_prominent(boxes: list[FaceBox]) -> FaceBox | None:
    if not boxes:
        return None
    return max(boxes, key=lambda b: (b.area, -b.x0, -b.y0))


def crop(image: np.ndarray, box: FaceBox) -> np.ndarray:
    return image[box.y0 : box.y1, box.x0 : box.x1]


def stub_age(face_crop: np.ndarray) -> int:
    """Deterministic placeholder age in [1, 90], derived from the crop bytes."""
    digest = hashlib.sha256(face_crop.tobytes()).digest()
    return 1 + int.from_bytes(digest[:4], "big") % 90
