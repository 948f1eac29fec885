"""Raster and clip IO: PNG images and YUV4MPEG2 (.y4m) clips.

Y4M is an uncompressed container ffmpeg reads and writes directly
(`ffmpeg -i clip.mp4 -pix_fmt yuv420p clip.y4m`), which keeps the bridge
free of codec dependencies. Mono and 4:2:0 colorspaces are supported; 4:2:0
chroma is upsampled nearest-neighbor and converted to RGB with full-range
BT.601 coefficients.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidDataError, MissingInputError
from .formats import atomic_write_bytes, select_frame_indices

Y4M_MAGIC = b"YUV4MPEG2"


def load_png(path: str | Path) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"image not found: {p}")
    try:
        with Image.open(p) as img:
            if img.mode in ("L", "I;16", "LA", "1"):
                return np.asarray(img.convert("L"), dtype=np.uint8)
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (OSError, SyntaxError) as exc:
        raise InvalidDataError(f"{p}: cannot decode image ({exc})") from exc


def encode_png(arr: np.ndarray) -> bytes:
    if arr.dtype != np.uint8 or arr.ndim not in (2, 3):
        raise InvalidDataError(f"expected uint8 2-D or 3-D array, got {arr.dtype} {arr.shape}")
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def save_png(arr: np.ndarray, path: str | Path) -> None:
    atomic_write_bytes(path, encode_png(arr))


def to_gray(arr: np.ndarray) -> np.ndarray:
    """Luma plane of an image array, BT.601 weights for RGB."""
    if arr.ndim == 2:
        return arr
    w = np.array([0.299, 0.587, 0.114])
    return np.clip(np.round(arr.astype(np.float64) @ w), 0, 255).astype(np.uint8)


def _parse_y4m_header(line: bytes, path: Path) -> tuple[int, int, str]:
    tokens = line.split(b" ")
    if tokens[0] != Y4M_MAGIC:
        raise InvalidDataError(f"{path}: not a YUV4MPEG2 clip")
    width = height = 0
    colorspace = "420"
    for tok in tokens[1:]:
        if tok.startswith(b"W"):
            width = int(tok[1:])
        elif tok.startswith(b"H"):
            height = int(tok[1:])
        elif tok.startswith(b"C"):
            colorspace = tok[1:].decode("ascii")
    if width < 1 or height < 1:
        raise InvalidDataError(f"{path}: missing or bad W/H in header")
    if colorspace.startswith("420"):
        if width % 2 or height % 2:
            raise InvalidDataError(f"{path}: 4:2:0 needs even dimensions, got {width}x{height}")
        return width, height, "420"
    if colorspace == "mono":
        return width, height, "mono"
    raise InvalidDataError(f"{path}: unsupported colorspace C{colorspace} (mono and 420 only)")


def _yuv420_to_rgb(y: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    uf = np.repeat(np.repeat(u, 2, axis=0), 2, axis=1).astype(np.float64) - 128.0
    vf = np.repeat(np.repeat(v, 2, axis=0), 2, axis=1).astype(np.float64) - 128.0
    yf = y.astype(np.float64)
    rgb = np.stack(
        [
            yf + 1.402 * vf,
            yf - 0.344136 * uf - 0.714136 * vf,
            yf + 1.772 * uf,
        ],
        axis=-1,
    )
    return np.clip(np.round(rgb), 0, 255).astype(np.uint8)


def load_y4m(path: str | Path) -> list[np.ndarray]:
    """Decode every frame of a .y4m clip.

    Returns (H, W) uint8 arrays for mono clips and (H, W, 3) RGB for 4:2:0.
    The whole clip is validated before anything is returned, so a truncated
    or corrupt file yields an error and no frames.
    """
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"clip not found: {p}")
    data = p.read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise InvalidDataError(f"{p}: not a YUV4MPEG2 clip")
    width, height, colorspace = _parse_y4m_header(data[:nl], p)

    y_size = width * height
    c_size = (width // 2) * (height // 2)
    frame_size = y_size if colorspace == "mono" else y_size + 2 * c_size

    frames: list[np.ndarray] = []
    off = nl + 1
    while off < len(data):
        marker_end = data.find(b"\n", off)
        if marker_end < 0 or not data[off:marker_end].startswith(b"FRAME"):
            raise InvalidDataError(f"{p}: frame {len(frames)}: bad FRAME marker")
        start = marker_end + 1
        raw = data[start : start + frame_size]
        if len(raw) < frame_size:
            raise InvalidDataError(f"{p}: frame {len(frames)} truncated")
        y = np.frombuffer(raw[:y_size], dtype=np.uint8).reshape(height, width)
        if colorspace == "mono":
            frames.append(y.copy())
        else:
            u = np.frombuffer(raw[y_size : y_size + c_size], dtype=np.uint8)
            v = np.frombuffer(raw[y_size + c_size :], dtype=np.uint8)
            half = (height // 2, width // 2)
            frames.append(_yuv420_to_rgb(y, u.reshape(half), v.reshape(half)))
        off = start + frame_size
    if not frames:
        raise InvalidDataError(f"{p}: clip has no frames")
    return frames


def extract_frames(clip_path: str | Path, out_dir: str | Path, count: int = 30) -> list[Path]:
    """Write `count` evenly spaced frames of a clip as PNGs.

    The clip is decoded and validated in full before the first write, so a
    corrupt file produces an error and no output files. Frame files are
    named <clip-stem>_f<index>.png after their index in the source clip.
    """
    clip_path = Path(clip_path)
    frames = load_y4m(clip_path)
    indices = select_frame_indices(len(frames), count)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for idx in indices:
        path = out_dir / f"{clip_path.stem}_f{idx:06d}.png"
        save_png(frames[idx], path)
        written.append(path)
    return written


def write_y4m(frames: list[np.ndarray], path: str | Path) -> None:
    """Encode mono frames as a .y4m clip (fixture helper and test aid)."""
    if not frames:
        raise InvalidDataError("cannot write an empty clip")
    h, w = frames[0].shape
    parts = [f"YUV4MPEG2 W{w} H{h} F25:1 Ip A1:1 Cmono\n".encode("ascii")]
    for f in frames:
        if f.shape != (h, w) or f.dtype != np.uint8:
            raise InvalidDataError("all frames must be uint8 with one shape")
        parts.append(b"FRAME\n")
        parts.append(f.tobytes())
    atomic_write_bytes(path, b"".join(parts))
