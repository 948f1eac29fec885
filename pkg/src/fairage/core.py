"""Domain types shared by every pipeline stage: age bins, labels, frame records.

Ages are binned into five half-open intervals [0,10), [10,19), [19,36),
[36,51), [51, inf). The boundary ages 10, 19, 36 and 51 belong to the upper
bin, so every age maps to exactly one group.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from fairage.errors import ValidationError

MAX_AGE = 130


class AgeGroup(Enum):
    G0_10 = "0-10"
    G10_18 = "10-18"
    G19_35 = "19-35"
    G36_50 = "36-50"
    G51_PLUS = "51+"

    @property
    def order(self) -> int:
        return _GROUP_ORDER[self]

    @classmethod
    def from_token(cls, token: str) -> "AgeGroup":
        try:
            return cls(token.strip())
        except ValueError:
            raise ValidationError(f"unknown age group {token!r}") from None


_GROUP_ORDER = {g: i for i, g in enumerate(AgeGroup)}

AGE_GROUPS = tuple(AgeGroup)


class SourceDataset(Enum):
    CELEB_DF = "celebdf"
    FACE_FORENSICS = "faceforensicspp"
    UTK_FACE = "utkface"
    SYNTHETIC = "synthetic"

    @property
    def display_name(self) -> str:
        return _SOURCE_DISPLAY[self]

    @classmethod
    def from_token(cls, token: str) -> "SourceDataset":
        t = token.strip().lower()
        if t in _SOURCE_ALIASES:
            return _SOURCE_ALIASES[t]
        raise ValidationError(f"unknown source dataset {token!r}")


_SOURCE_DISPLAY = {
    SourceDataset.UTK_FACE: "UTKFace",
    SourceDataset.CELEB_DF: "Celeb",
    SourceDataset.FACE_FORENSICS: "FaceForensics++",
    SourceDataset.SYNTHETIC: "Synthetic",
}

_SOURCE_ALIASES = {
    "celebdf": SourceDataset.CELEB_DF,
    "celeb-df": SourceDataset.CELEB_DF,
    "celeb": SourceDataset.CELEB_DF,
    "faceforensicspp": SourceDataset.FACE_FORENSICS,
    "faceforensics++": SourceDataset.FACE_FORENSICS,
    "utkface": SourceDataset.UTK_FACE,
    "synthetic": SourceDataset.SYNTHETIC,
}


class Label(Enum):
    REAL = "real"
    FAKE = "fake"  # positive class for every metric

    @classmethod
    def from_token(cls, token: str) -> "Label":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ValidationError(f"unknown label {token!r}") from None


@dataclass(frozen=True)
class CurationConfig:
    """Knobs for binning, splitting, and seeding the curation stages."""

    bin_boundaries: tuple[int, ...] = (10, 19, 36, 51)
    split_ratio: float = 0.7
    seed: int = 0

    def __post_init__(self):
        bounds = tuple(self.bin_boundaries)
        object.__setattr__(self, "bin_boundaries", bounds)
        if len(bounds) != 4:
            raise ValidationError(
                f"need 4 bin boundaries for the five age groups, got {len(bounds)}"
            )
        if any(b <= a for a, b in zip(bounds, bounds[1:])) or bounds[0] <= 0:
            raise ValidationError(f"bin boundaries must be strictly increasing: {bounds}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ValidationError(f"split ratio must be in (0,1), got {self.split_ratio}")


DEFAULT_CONFIG = CurationConfig()


@dataclass(frozen=True)
class FrameRecord:
    """One annotated frame in a manifest."""

    frame_id: str
    video_id: str
    source: SourceDataset
    label: Label
    estimated_age: int
    age_group: AgeGroup

    @classmethod
    def build(
        cls,
        frame_id: str,
        video_id: str,
        source: SourceDataset,
        label: Label,
        estimated_age: int,
        cfg: CurationConfig = DEFAULT_CONFIG,
    ) -> "FrameRecord":
        """Construct a record with the age group derived from the age."""
        return cls(frame_id, video_id, source, label, estimated_age,
                   bin_age(estimated_age, cfg))


def bin_age(age: int, cfg: CurationConfig = DEFAULT_CONFIG) -> AgeGroup:
    """Map an integer age in years to its age group.

    Raises ValidationError outside [0, 130].
    """
    if not isinstance(age, int) or isinstance(age, bool):
        raise ValidationError(f"age must be an integer, got {age!r}")
    if age < 0 or age > MAX_AGE:
        raise ValidationError(f"age {age} outside the valid range [0, {MAX_AGE}]")
    for boundary, group in zip(cfg.bin_boundaries, AGE_GROUPS):
        if age < boundary:
            return group
    return AgeGroup.G51_PLUS


def select_frame_indices(total_frames: int, k: int) -> list[int]:
    """Indices of k evenly spaced frames out of total_frames.

    Spacing is round(i * (total_frames - 1) / (k - 1)) with half-up rounding
    done in exact integer arithmetic. When the clip has fewer than k frames,
    every frame is taken exactly once; frames are never duplicated.
    """
    if total_frames < 1:
        raise ValidationError(f"total_frames must be >= 1, got {total_frames}")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if total_frames <= k:
        return list(range(total_frames))
    if k == 1:
        return [0]
    span = total_frames - 1
    den = k - 1
    return [(2 * i * span + den) // (2 * den) for i in range(k)]
