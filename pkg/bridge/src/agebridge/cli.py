"""agebridge command line: annotate, describe, swap, extract-frames.

Exit codes: 0 success, 2 usage error, 3 missing input, 4 invalid data,
5 model unavailable. Failures never leave partial output files behind.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, annotate, media, swap
from .errors import (
    InvalidDataError,
    MissingInputError,
    ModelUnavailableError,
    UsageError,
)
from .formats import write_descriptors, write_manifest

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_INVALID = 4
EXIT_MODEL = 5


def _collect_images(raw_paths: list[str]) -> list[Path]:
    images: list[Path] = []
    for raw in raw_paths:
        p = Path(raw)
        if p.is_dir():
            images.extend(sorted(p.glob("*.png")))
        elif p.is_file():
            images.append(p)
        else:
            raise MissingInputError(f"image path not found: {p}")
    if not images:
        raise MissingInputError(f"no PNG images under {', '.join(raw_paths)}")
    return images


def _parse_ages(raw: str | None) -> list[int] | None:
    if raw is None:
        return None
    try:
        return [int(tok) for tok in raw.split(",")]
    except ValueError:
        raise UsageError(f"--ages must be comma-separated integers, got {raw!r}") from None


def cmd_annotate(args) -> int:
    images = _collect_images(args.images)
    result = annotate.annotate_images(
        images,
        source=args.source,
        label=args.label,
        backend=args.backend,
        ages=_parse_ages(args.ages),
        workers=args.workers,
    )
    write_manifest(result.rows, args.out)
    print(f"annotated {len(result.rows)} faces, skipped {result.skipped} (no face) -> {args.out}")
    return EXIT_OK


def cmd_describe(args) -> int:
    images = _collect_images(args.images)
    result = annotate.describe_images(
        images, dim=args.dim, backend=args.backend, workers=args.workers
    )
    write_descriptors(result.dim, result.rows, args.out)
    print(f"described {len(result.rows)} faces, skipped {result.skipped} (no face) -> {args.out}")
    return EXIT_OK


def cmd_swap(args) -> int:
    outcome = swap.execute_swaps(
        args.plan, args.media_dir, args.out_dir, backend=args.backend, workers=args.workers
    )
    total = len(outcome.ok) + len(outcome.failed)
    print(f"swaps: {len(outcome.ok)} ok, {len(outcome.failed)} failed (plan size {total}) -> {args.out_dir}")
    return EXIT_OK


def cmd_extract(args) -> int:
    written = media.extract_frames(args.clip, args.out_dir, count=args.count)
    print(f"extracted {len(written)} frames -> {args.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agebridge",
        description="File adapters between face tooling and the fairage engine.",
    )
    parser.add_argument("--version", action="version", version=f"agebridge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="detect faces and write an annotation manifest")
    p.add_argument("--images", nargs="+", required=True, help="image files or directories of PNGs")
    p.add_argument("--out", required=True, help="manifest CSV output")
    p.add_argument("--source", required=True, help="source dataset token for every row")
    p.add_argument("--label", required=True, help="real or fake")
    p.add_argument("--backend", default=annotate.STUB_BACKEND)
    p.add_argument("--ages", help="comma-separated ages to inject instead of estimating")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("describe", help="write face descriptors for matching")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--out", required=True, help="descriptor CSV output")
    p.add_argument("--dim", type=int, default=8, help="embedding dimension (default 8)")
    p.add_argument("--backend", default=annotate.STUB_BACKEND)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("swap", help="execute a swap plan and emit quality pairs")
    p.add_argument("--plan", required=True, help="swap plan CSV from the engine's match stage")
    p.add_argument("--media-dir", dest="media_dir", required=True, help="directory of <id>.png media")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--backend", default=annotate.STUB_BACKEND)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_swap)

    p = sub.add_parser("extract-frames", help="write evenly spaced clip frames as PNGs")
    p.add_argument("--clip", required=True, help=".y4m clip path")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--count", type=int, default=30, help="frames to extract (default 30)")
    p.set_defaults(func=cmd_extract)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingInputError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except InvalidDataError as exc:
        print(f"invalid data: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ModelUnavailableError as exc:
        print(f"model unavailable: {exc}", file=sys.stderr)
        return EXIT_MODEL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
