"""Annotation and description of face images into engine interchange rows."""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import detect
from .errors import InvalidDataError, ModelUnavailableError, UsageError
from .formats import LABELS, SOURCES, age_group_token
from .media import load_png, to_gray

STUB_BACKEND = "stub"
REAL_ANNOTATE_BACKEND = "deepface"


def _require_stub_or(backend: str, real_name: str) -> None:
    if backend == STUB_BACKEND:
        return
    if backend == real_name:
        raise ModelUnavailableError(
            f"backend '{real_name}' needs the {real_name} package and its model weights; "
            f"install them or run with --backend stub"
        )
    raise UsageError(f"unknown backend {backend!r} (expected stub or {real_name})")


@dataclass(frozen=True)
class DetectedFace:
    path: Path
    image: np.ndarray
    box: detect.FaceBox


@dataclass
class AnnotateResult:
    rows: list[list[str]]
    skipped: int


def _detect_one(path: Path) -> tuple[Path, np.ndarray, detect.FaceBox | None]:
    image = load_png(path)
    box = detect.most_prominent(detect.find_faces(image))
    return path, image, box


def _detect_all(paths: list[Path], workers: int) -> tuple[list[DetectedFace], int]:
    if workers < 1:
        raise UsageError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        results = [_detect_one(p) for p in paths]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_detect_one, paths))
    faces = [DetectedFace(p, img, box) for p, img, box in results if box is not None]
    skipped = len(results) - len(faces)
    return faces, skipped


def annotate_images(
    paths: list[Path],
    source: str,
    label: str,
    backend: str = STUB_BACKEND,
    ages: list[int] | None = None,
    workers: int = 1,
) -> AnnotateResult:
    """Build manifest rows for every image with a detectable face.

    Ages come from the injected list when given (assigned to detected faces
    in input order, cycling if shorter), otherwise from the deterministic
    stub estimator. Images without a detectable face are skipped and
    counted, never emitted.
    """
    _require_stub_or(backend, REAL_ANNOTATE_BACKEND)
    if source not in SOURCES:
        raise UsageError(f"source must be one of {SOURCES}, got {source!r}")
    if label not in LABELS:
        raise UsageError(f"label must be one of {LABELS}, got {label!r}")
    if ages is not None and not ages:
        raise UsageError("injected age list must not be empty")

    faces, skipped = _detect_all(paths, workers)
    seen: set[str] = set()
    rows = []
    for i, face in enumerate(faces):
        frame_id = face.path.stem
        if frame_id in seen:
            raise InvalidDataError(f"duplicate frame id {frame_id!r} (from {face.path})")
        seen.add(frame_id)
        if ages is not None:
            age = ages[i % len(ages)]
        else:
            age = detect.stub_age(detect.crop(face.image, face.box))
        if age < 0:
            raise InvalidDataError(f"injected age {age} for {frame_id!r} is negative")
        video_id = face.path.parent.name or "clip"
        rows.append([frame_id, video_id, source, label, str(age), age_group_token(age)])
    return AnnotateResult(rows, skipped)


@dataclass
class DescribeResult:
    dim: int
    rows: list[list[str]]
    skipped: int


def _stub_embedding(face_crop: np.ndarray, dim: int) -> list[float]:
    digest = hashlib.shake_128(face_crop.tobytes()).digest(4 * dim)
    vals = []
    for i in range(dim):
        word = int.from_bytes(digest[4 * i : 4 * i + 4], "big")
        vals.append(2.0 * word / 2**32 - 1.0)
    if all(abs(v) < 1e-6 for v in vals):
        vals[0] = 1.0
    return vals


def describe_images(
    paths: list[Path],
    dim: int = 8,
    backend: str = STUB_BACKEND,
    workers: int = 1,
) -> DescribeResult:
    """Emit one descriptor row per image with a detectable face.

    The stub derives the embedding from a hash of the face crop and the
    attributes from simple geometry and intensity statistics, so rows are
    deterministic and always satisfy the engine's range checks.
    """
    _require_stub_or(backend, REAL_ANNOTATE_BACKEND)
    if dim < 1:
        raise UsageError(f"dim must be >= 1, got {dim}")

    faces, skipped = _detect_all(paths, workers)
    seen: set[str] = set()
    rows = []
    for face in faces:
        frame_id = face.path.stem
        if frame_id in seen:
            raise InvalidDataError(f"duplicate frame id {frame_id!r} (from {face.path})")
        seen.add(frame_id)
        gray = to_gray(face.image)
        h, w = gray.shape
        box = face.box
        cx = (box.x0 + box.x1) / 2.0
        cy = (box.y0 + box.y1) / 2.0
        yaw = max(-45.0, min(45.0, 45.0 * (2.0 * cx / w - 1.0)))
        pitch = max(-45.0, min(45.0, 45.0 * (2.0 * cy / h - 1.0)))
        brightness = float(np.mean(gray)) / 255.0
        expression = min(1.0, float(np.std(gray)) / 128.0)
        embedding = _stub_embedding(detect.crop(face.image, box), dim)
        rows.append(
            [frame_id, str(dim)]
            + [f"{v:.6f}" for v in embedding]
            + [f"{yaw:.2f}", f"{pitch:.2f}", f"{brightness:.4f}", f"{expression:.4f}"]
        )
    return DescribeResult(dim, rows, skipped)
