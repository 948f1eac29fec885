"""Regenerate the bundled bridge fixtures. Run from anywhere:

    python bridge/tools/make_fixtures.py

Deterministic by construction; re-running must not change any byte.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def png_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def face_a() -> np.ndarray:
    img = np.full((24, 24), 200, dtype=np.uint8)
    img[5:15, 7:17] = 80
    return img


def face_b() -> np.ndarray:
    # two regions: the 9x8 one must win over the 3x3 speck
    img = np.full((24, 24), 60, dtype=np.uint8)
    img[4:13, 5:13] = 180
    img[18:21, 18:21] = 180
    return img


def face_c() -> np.ndarray:
    img = np.full((20, 26, 3), (210, 210, 210), dtype=np.uint8)
    img[6:16, 9:19] = (150, 100, 80)
    return img


def blank() -> np.ndarray:
    return np.full((24, 24), 128, dtype=np.uint8)


def mono_clip(values: list[int], size: int = 16) -> bytes:
    parts = [f"YUV4MPEG2 W{size} H{size} F25:1 Ip A1:1 Cmono\n".encode("ascii")]
    for v in values:
        parts.append(b"FRAME\n")
        parts.append(bytes([v]) * (size * size))
    return b"".join(parts)


def main() -> None:
    faces = FIXTURES / "faces"
    clips = FIXTURES / "clips"
    swap_media = FIXTURES / "swap" / "media"
    for d in (faces, clips, swap_media):
        d.mkdir(parents=True, exist_ok=True)

    (faces / "face_a.png").write_bytes(png_bytes(face_a()))
    (faces / "face_b.png").write_bytes(png_bytes(face_b()))
    (faces / "face_c.png").write_bytes(png_bytes(face_c()))
    (faces / "blank.png").write_bytes(png_bytes(blank()))

    (clips / "clip59.y4m").write_bytes(mono_clip(list(range(59))))
    (clips / "clip10.y4m").write_bytes(mono_clip([100 + i for i in range(10)]))
    whole = mono_clip([1, 2, 3])
    (clips / "corrupt.y4m").write_bytes(whole[: len(whole) - 100])

    rng = np.random.default_rng(2024)
    for name in ("s1", "s2", "t1", "t2"):
        img = rng.integers(40, 216, size=(18, 18), dtype=np.uint8).astype(np.uint8)
        (swap_media / f"{name}.png").write_bytes(png_bytes(img))

    plan = (
        "source_id,target_id,cosine,attr_score,combined\n"
        "s1,t1,0.82,0.7,0.784\n"
        "s2,t2,0.64,0.9,0.718\n"
    )
    (FIXTURES / "swap" / "plan.csv").write_text(plan, encoding="utf-8", newline="\n")
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
