"""Interchange file I/O: manifests, descriptors, scores, features, and rasters.

All delimiter-separated formats are UTF-8 CSV with LF line endings and a
fixed header row; floats are written with ``repr`` so write-then-load is
lossless. Images are lossless rasters only: 8-bit PNG (gray or RGB) and
binary PGM/PPM with maxval 255.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from fairage.core import AgeGroup, CurationConfig, DEFAULT_CONFIG, FrameRecord, Label, SourceDataset, bin_age
from fairage.errors import MissingInputError, ValidationError
from fairage.matching import FaceDescriptor

FORMAT_VERSION = "1"

MANIFEST_HEADER = ["frame_id", "video_id", "source", "label", "estimated_age", "age_group"]
SCORE_HEADER = ["model_id", "train_set", "test_set", "frame_id", "label", "age_group", "score"]
DESCRIPTOR_PREFIX = ["frame_id", "d"]
DESCRIPTOR_SUFFIX = ["yaw_deg", "pitch_deg", "brightness", "expression"]
FEATURE_PREFIX = ["frame_id", "d"]

ABSENT_GROUP = "none"


@dataclass(frozen=True)
class Provenance:
    path: str
    format_version: str = FORMAT_VERSION


@dataclass(frozen=True)
class Manifest:
    """An ordered, validated collection of frame records."""

    records: tuple[FrameRecord, ...]
    provenance: Provenance
    dropped: int = 0
    issues: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def replace_records(self, records) -> "Manifest":
        return Manifest(tuple(records), self.provenance, self.dropped, self.issues)


@dataclass(frozen=True)
class ScoreRecord:
    """One detector score for one frame under a (model, train, test) context."""

    model_id: str
    train_set: str
    test_set: str
    frame_id: str
    label: Label
    age_group: AgeGroup | None
    score: float


def _open_input(path: str | Path):
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"input file not found: {p}")
    return open(p, encoding="utf-8", newline="")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _parse_age(token: str) -> int:
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    try:
        value = float(token)
    except ValueError:
        raise ValidationError(f"unparseable age {token!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"unparseable age {token!r}")
    return _round_half_up(value)


def load_manifest(
    path: str | Path,
    cfg: CurationConfig = DEFAULT_CONFIG,
    *,
    lenient: bool = False,
) -> Manifest:
    """Parse and validate an annotation manifest.

    Every row is re-binned from its estimated age and checked against the
    stored age_group column. In strict mode (default) the first problem
    aborts with its row number; in lenient mode bad rows are dropped and
    counted, mirroring how undetectable faces are skipped upstream.
    """
    records: list[FrameRecord] = []
    issues: list[str] = []
    seen: set[str] = set()
    with _open_input(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise ValidationError(f"{path}: expected header {MANIFEST_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            try:
                records.append(_parse_manifest_row(row, line_no, seen, cfg))
            except ValidationError as exc:
                if not lenient:
                    raise ValidationError(f"{path} row {line_no}: {exc}") from None
                issues.append(f"row {line_no}: {exc}")
    return Manifest(
        records=tuple(records),
        provenance=Provenance(str(path)),
        dropped=len(issues),
        issues=tuple(issues),
    )


def _parse_manifest_row(row, line_no, seen, cfg) -> FrameRecord:
    if len(row) != len(MANIFEST_HEADER):
        raise ValidationError(f"expected {len(MANIFEST_HEADER)} fields, got {len(row)}")
    frame_id, video_id, source_tok, label_tok, age_tok, group_tok = row
    if not frame_id:
        raise ValidationError("empty frame_id")
    if frame_id in seen:
        raise ValidationError(f"duplicate frame_id {frame_id!r}")
    source = SourceDataset.from_token(source_tok)
    label = Label.from_token(label_tok)
    age = _parse_age(age_tok)
    try:
        derived = bin_age(age, cfg)
    except ValidationError as exc:
        raise ValidationError(f"frame {frame_id!r}: {exc}") from None
    stored = AgeGroup.from_token(group_tok)
    if stored is not derived:
        raise ValidationError(
            f"frame {frame_id!r}: age {age} bins to {derived.value!r} "
            f"but row stores {stored.value!r}"
        )
    seen.add(frame_id)
    return FrameRecord(frame_id, video_id, source, label, age, derived)


def write_manifest(manifest: Manifest | list[FrameRecord] | tuple, path: str | Path) -> None:
    records = manifest.records if isinstance(manifest, Manifest) else manifest
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for r in records:
            writer.writerow(
                [r.frame_id, r.video_id, r.source.value, r.label.value,
                 str(r.estimated_age), r.age_group.value]
            )


def load_descriptors(path: str | Path) -> dict[str, FaceDescriptor]:
    """Load a descriptor file into an id -> FaceDescriptor map.

    Rows are ``frame_id, d, v1..vd, yaw_deg, pitch_deg, brightness,
    expression``; the declared dimension guards against ragged rows and all
    rows must share one dimension.
    """
    out: dict[str, FaceDescriptor] = {}
    dim: int | None = None
    with _open_input(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != DESCRIPTOR_PREFIX or header[-4:] != DESCRIPTOR_SUFFIX:
            raise ValidationError(f"{path}: bad descriptor header")
        for line_no, row in enumerate(reader, start=2):
            if len(row) < 7:
                raise ValidationError(f"{path} row {line_no}: too few fields")
            frame_id = row[0]
            try:
                declared = int(row[1])
            except ValueError:
                raise ValidationError(f"{path} row {line_no}: bad dimension {row[1]!r}") from None
            if len(row) != 2 + declared + 4:
                raise ValidationError(
                    f"{path} row {line_no} ({frame_id!r}): declared dimension {declared} "
                    f"but row has {len(row) - 6} vector components"
                )
            if dim is None:
                dim = declared
            elif declared != dim:
                raise ValidationError(
                    f"{path} row {line_no} ({frame_id!r}): dimension {declared} != {dim}"
                )
            values = _parse_floats(row[2:], path, line_no, frame_id)
            vec = np.array(values[:declared])
            yaw, pitch, brightness, expression = values[declared:]
            if frame_id in out:
                raise ValidationError(f"{path} row {line_no}: duplicate id {frame_id!r}")
            try:
                out[frame_id] = FaceDescriptor(vec, yaw, pitch, brightness, expression)
            except ValidationError as exc:
                raise ValidationError(f"{path} row {line_no} ({frame_id!r}): {exc}") from None
    return out


def _parse_floats(tokens, path, line_no, frame_id) -> list[float]:
    values = []
    for tok in tokens:
        try:
            v = float(tok)
        except ValueError:
            raise ValidationError(f"{path} row {line_no} ({frame_id!r}): bad float {tok!r}") from None
        if not math.isfinite(v):
            raise ValidationError(f"{path} row {line_no} ({frame_id!r}): non-finite value {tok!r}")
        values.append(v)
    return values


def write_descriptors(descriptors: dict[str, FaceDescriptor], path: str | Path) -> None:
    dims = {d.embedding.size for d in descriptors.values()}
    if len(dims) > 1:
        raise ValidationError(f"mixed embedding dimensions {sorted(dims)}")
    dim = dims.pop() if dims else 0
    header = DESCRIPTOR_PREFIX + [f"v{i + 1}" for i in range(dim)] + DESCRIPTOR_SUFFIX
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for frame_id, d in descriptors.items():
            row = [frame_id, str(d.embedding.size)]
            row += [repr(float(v)) for v in d.embedding]
            row += [repr(float(d.yaw_deg)), repr(float(d.pitch_deg)),
                    repr(float(d.brightness)), repr(float(d.expression))]
            writer.writerow(row)


def load_scores(path: str | Path) -> list[ScoreRecord]:
    records = []
    with _open_input(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SCORE_HEADER:
            raise ValidationError(f"{path}: expected header {SCORE_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(SCORE_HEADER):
                raise ValidationError(f"{path} row {line_no}: expected {len(SCORE_HEADER)} fields")
            model_id, train_set, test_set, frame_id, label_tok, group_tok, score_tok = row
            label = Label.from_token(label_tok)
            group = None if group_tok.strip().lower() == ABSENT_GROUP else AgeGroup.from_token(group_tok)
            try:
                score = float(score_tok)
            except ValueError:
                raise ValidationError(f"{path} row {line_no}: unparseable score {score_tok!r}") from None
            if not math.isfinite(score):
                raise ValidationError(f"{path} row {line_no}: non-finite score {score_tok!r}")
            records.append(ScoreRecord(model_id, train_set, test_set, frame_id, label, group, score))
    return records


def write_scores(records: list[ScoreRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCORE_HEADER)
        for r in records:
            writer.writerow(
                [r.model_id, r.train_set, r.test_set, r.frame_id, r.label.value,
                 ABSENT_GROUP if r.age_group is None else r.age_group.value,
                 repr(float(r.score))]
            )


def load_features(path: str | Path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Load a feature file (``frame_id, d, f1..fd, label``).

    Returns ids, a float64 matrix of shape (n, d), and 0/1 labels where
    fake = 1.
    """
    ids: list[str] = []
    rows: list[list[float]] = []
    labels: list[int] = []
    dim: int | None = None
    with _open_input(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != FEATURE_PREFIX or header[-1] != "label":
            raise ValidationError(f"{path}: bad feature header")
        for line_no, row in enumerate(reader, start=2):
            if len(row) < 4:
                raise ValidationError(f"{path} row {line_no}: too few fields")
            frame_id = row[0]
            try:
                declared = int(row[1])
            except ValueError:
                raise ValidationError(f"{path} row {line_no}: bad dimension {row[1]!r}") from None
            if len(row) != 2 + declared + 1:
                raise ValidationError(f"{path} row {line_no} ({frame_id!r}): ragged feature row")
            if dim is None:
                dim = declared
            elif declared != dim:
                raise ValidationError(f"{path} row {line_no} ({frame_id!r}): dimension {declared} != {dim}")
            values = _parse_floats(row[2:-1], path, line_no, frame_id)
            ids.append(frame_id)
            rows.append(values)
            labels.append(1 if Label.from_token(row[-1]) is Label.FAKE else 0)
    return ids, np.array(rows, dtype=np.float64).reshape(len(ids), dim or 0), np.array(labels, dtype=np.int64)


def write_features(ids, features, labels, path: str | Path) -> None:
    features = np.asarray(features, dtype=np.float64)
    dim = features.shape[1] if features.ndim == 2 else 0
    header = FEATURE_PREFIX + [f"f{i + 1}" for i in range(dim)] + ["label"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for frame_id, vec, y in zip(ids, features, labels):
            row = [frame_id, str(dim)] + [repr(float(v)) for v in vec]
            row.append(Label.FAKE.value if int(y) == 1 else Label.REAL.value)
            writer.writerow(row)


@dataclass(frozen=True)
class RasterImage:
    """8-bit raster, row-major, interleaved channels."""

    width: int
    height: int
    channels: int
    pixels: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError(f"bad raster size {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise ValidationError(f"channels must be 1 or 3, got {self.channels}")
        expected = self.width * self.height * self.channels
        if len(self.pixels) != expected:
            raise ValidationError(
                f"pixel buffer holds {len(self.pixels)} samples, expected {expected}"
            )

    def to_array(self) -> np.ndarray:
        arr = np.frombuffer(self.pixels, dtype=np.uint8)
        return arr.reshape(self.height, self.width, self.channels)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        arr = np.asarray(arr)
        if arr.dtype != np.uint8:
            raise ValidationError(f"raster arrays must be uint8, got {arr.dtype}")
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValidationError(f"raster arrays must be HxW or HxWxC, got shape {arr.shape}")
        h, w, c = arr.shape
        return cls(w, h, c, arr.tobytes())


def load_image(path: str | Path) -> RasterImage:
    """Decode a PNG/PGM/PPM file into a RasterImage."""
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"input file not found: {p}")
    data = p.read_bytes()
    if data[:2] in (b"P5", b"P6"):
        return _decode_pnm(data, p)
    return _decode_png(p)


def _decode_png(path: Path) -> RasterImage:
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "RGB"):
                raise ValidationError(
                    f"{path}: unsupported image mode {img.mode!r} (8-bit gray or RGB only)"
                )
            img.load()
            arr = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError:
        raise ValidationError(f"{path}: not a supported raster file") from None
    except OSError as exc:
        raise ValidationError(f"{path}: failed to decode image: {exc}") from None
    return RasterImage.from_array(arr)


def _decode_pnm(data: bytes, path: Path) -> RasterImage:
    channels = 1 if data[:2] == b"P5" else 3
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise ValidationError(f"{path}: malformed PNM header")
        fields.append(int(token))
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise ValidationError(f"{path}: unsupported bit depth (maxval {maxval}, need 255)")
    expected = width * height * channels
    pixels = data[pos : pos + expected]
    if len(pixels) != expected:
        raise ValidationError(f"{path}: truncated pixel data ({len(pixels)} of {expected} bytes)")
    return RasterImage(width, height, channels, pixels)


def write_image(image: RasterImage, path: str | Path) -> None:
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix in (".pgm", ".ppm"):
        magic = b"P5" if image.channels == 1 else b"P6"
        if (suffix == ".pgm") != (image.channels == 1):
            raise ValidationError(f"{p}: extension does not match channel count")
        header = magic + b"\n%d %d\n255\n" % (image.width, image.height)
        p.write_bytes(header + image.pixels)
        return
    if suffix == ".png":
        arr = image.to_array()
        mode = "L" if image.channels == 1 else "RGB"
        Image.fromarray(arr[:, :, 0] if image.channels == 1 else arr, mode=mode).save(p, format="PNG")
        return
    raise ValidationError(f"{p}: unsupported output format {suffix!r}")
