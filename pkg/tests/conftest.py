from pathlib import Path

import pytest

from fairage.core import AgeGroup, FrameRecord, Label, SourceDataset
from fairage.ingest import Manifest, Provenance

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def make_records(counts, age_of=None):
    """Expand {(label, group, source): n} into FrameRecords with stable ids."""
    default_age = {
        AgeGroup.G0_10: 5,
        AgeGroup.G10_18: 14,
        AgeGroup.G19_35: 25,
        AgeGroup.G36_50: 40,
        AgeGroup.G51_PLUS: 60,
    }
    ages = age_of or default_age
    records = []
    serial = 0
    for (label, group, source), n in counts.items():
        for _ in range(n):
            records.append(
                FrameRecord.build(
                    f"f{serial:06d}", f"v{serial // 25:05d}", source, label, ages[group]
                )
            )
            serial += 1
    return records


def make_manifest(counts, age_of=None) -> Manifest:
    return Manifest(tuple(make_records(counts, age_of)), Provenance("test"), 0, ())
