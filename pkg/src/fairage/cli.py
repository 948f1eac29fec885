"""Command-line interface: one subcommand per pipeline stage plus a
`pipeline` command chaining them all.

Configuration comes from an INI file (--config flag, or the FAIRAGE_CONFIG
environment variable when the flag is absent); any same-named flag overrides
the config value. Every stochastic stage draws from named streams of the one
top-level seed, so a fixed seed makes whole runs byte-reproducible.

Exit codes: 0 success, 2 usage error, 3 missing input, 4 invalid data.
"""

from __future__ import annotations

import argparse
import configparser
import os
import re
import sys
from pathlib import Path

import numpy as np

from fairage import curation, detector, evaluation, ingest, matching, quality, reporting
from fairage.core import AgeGroup, DEFAULT_CONFIG, Label
from fairage.errors import FairageError, MissingInputError, SingleClassError, ValidationError
from fairage.rng import derive_seed

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_INPUT = 3
EXIT_INVALID = 4

CONFIG_ENV_VAR = "FAIRAGE_CONFIG"


class UsageError(FairageError):
    pass


def load_config(path: str | None) -> tuple[configparser.ConfigParser, Path | None]:
    """Parse the INI config; relative paths inside it resolve against the
    config file's directory (returned as the base)."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    parser = configparser.ConfigParser()
    if path is None:
        return parser, None
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"config file not found: {p}")
    try:
        parser.read(p, encoding="utf-8")
    except configparser.Error as exc:
        raise ValidationError(f"{p}: bad config: {exc}") from None
    return parser, p.parent


def _cfg_get(cp: configparser.ConfigParser, section: str, key: str) -> str | None:
    if cp.has_option(section, key):
        return cp.get(section, key)
    return None


def _resolve(value: str, base: Path | None) -> Path:
    p = Path(value)
    if not p.is_absolute() and base is not None:
        return base / p
    return p


def _pick_path(flag: str | None, cp, base, section: str, key: str, what: str) -> Path:
    if flag is not None:
        return Path(flag)
    raw = _cfg_get(cp, section, key)
    if raw is None:
        raise UsageError(f"{what} is required (flag or config [{section}] {key})")
    return _resolve(raw, base)


def _pick(flag, cp, base, section: str, key: str, parse, default):
    if flag is not None:
        return flag
    raw = _cfg_get(cp, section, key)
    if raw is None:
        return default
    try:
        return parse(raw)
    except ValueError:
        raise ValidationError(f"config [{section}] {key}: unparseable value {raw!r}") from None


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _parse_hidden(raw: str) -> tuple[int, ...]:
    raw = raw.strip()
    if raw in ("", "-", "none"):
        return ()
    return tuple(int(t) for t in raw.split(","))


def _seed(args, cp) -> int:
    return _pick(getattr(args, "seed", None), cp, None, "run", "seed", int, 0)


def _slug(name: str) -> str:
    out = re.sub(r"[^A-Za-z0-9._-]+", "-", name).strip("-")
    return out or "unnamed"


def _match_config(args, cp) -> matching.MatchConfig:
    return matching.MatchConfig(
        w_sim=_pick(getattr(args, "w_sim", None), cp, None, "match", "w_sim", float, 0.7),
        w_attr=_pick(getattr(args, "w_attr", None), cp, None, "match", "w_attr", float, 0.3),
        min_cosine=_pick(getattr(args, "min_cosine", None), cp, None, "match", "min_cosine", float, 0.2),
        min_combined=_pick(getattr(args, "min_combined", None), cp, None, "match", "min_combined", float, 0.5),
        one_to_one=_pick(
            True if getattr(args, "one_to_one", False) else None,
            cp, None, "match", "one_to_one", _parse_bool, False,
        ),
    )


def _quality_config(args, cp) -> quality.QualityConfig:
    return quality.QualityConfig(
        k1=_pick(None, cp, None, "quality", "k1", float, 0.01),
        k2=_pick(None, cp, None, "quality", "k2", float, 0.03),
        window_size=_pick(getattr(args, "window_size", None), cp, None, "quality", "window_size", int, 11),
        sigma=_pick(getattr(args, "sigma", None), cp, None, "quality", "sigma", float, 1.5),
        min_ssim=_pick(getattr(args, "min_ssim", None), cp, None, "quality", "min_ssim", float, 0.2),
        min_psnr_db=_pick(getattr(args, "min_psnr", None), cp, None, "quality", "min_psnr_db", float, 10.0),
    )


def _hyper_params(args, cp, seed: int) -> detector.HyperParams:
    return detector.HyperParams(
        learning_rate=_pick(getattr(args, "learning_rate", None), cp, None, "detector", "learning_rate", float, 0.001),
        weight_decay=_pick(getattr(args, "weight_decay", None), cp, None, "detector", "weight_decay", float, 1e-6),
        batch_size=_pick(getattr(args, "batch_size", None), cp, None, "detector", "batch_size", int, 32),
        max_epochs=_pick(getattr(args, "max_epochs", None), cp, None, "detector", "max_epochs", int, 20),
        patience=_pick(getattr(args, "patience", None), cp, None, "detector", "patience", int, 3),
        beta1=_pick(None, cp, None, "detector", "beta1", float, 0.9),
        beta2=_pick(None, cp, None, "detector", "beta2", float, 0.999),
        epsilon=_pick(None, cp, None, "detector", "epsilon", float, 1e-8),
        hidden_layers=_pick(
            getattr(args, "hidden", None), cp, None, "detector", "hidden_layers", _parse_hidden, (),
        ),
        seed=seed,
        decoupled_weight_decay=_pick(
            False if getattr(args, "coupled_weight_decay", False) else None,
            cp, None, "detector", "decoupled_weight_decay", _parse_bool, True,
        ),
    )


def _eval_config(args, cp) -> evaluation.EvalConfig:
    return evaluation.EvalConfig(
        max_fpr=_pick(getattr(args, "max_fpr", None), cp, None, "eval", "max_fpr", float, 0.1),
        pauc_normalized=_pick(
            False if getattr(args, "raw_pauc", False) else None,
            cp, None, "eval", "pauc_normalized", _parse_bool, True,
        ),
    )


def _age_pie_spec(dist: curation.DistributionTable) -> reporting.ChartSpec:
    series = []
    for group in AgeGroup:
        total = sum(dist.row_total(label, group) for label in Label)
        if total > 0:
            series.append((group.value, float(total)))
    return reporting.ChartSpec(kind="pie", title="Records per age group", series=tuple(series))


def cmd_analyze(args, cp, base) -> int:
    manifest_path = _pick_path(args.manifest, cp, base, "paths", "manifest", "manifest path")
    out_path = args.out
    if out_path is None:
        raise UsageError("--out is required")
    manifest = ingest.load_manifest(manifest_path, lenient=args.lenient)
    dist = curation.analyze_distribution(manifest)
    reporting.write_distribution_csv(dist, out_path)
    if args.table is not None:
        reporting.write_text_table(reporting.render_distribution(dist), args.table)
    if args.chart is not None:
        reporting.write_chart(_age_pie_spec(dist), args.chart)
    if manifest.dropped:
        print(f"dropped {manifest.dropped} rows in lenient mode", file=sys.stderr)
    print(f"analyzed {len(manifest)} records -> {out_path}")
    return EXIT_OK


def _write_balance_artifacts(result: curation.BalanceResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    ingest.write_manifest(result.kept, out_dir / "balanced_manifest.csv")
    curation.write_plan(result.undersample_entries, out_dir / "undersample_plan.csv")
    curation.write_plan(result.topup_entries, out_dir / "topup_plan.csv")
    curation.write_plan(result.augmentation_entries, out_dir / "augmentation_plan.csv")
    with open(out_dir / "removed_ids.txt", "w", encoding="utf-8", newline="\n") as fh:
        for frame_id in result.removed_ids:
            fh.write(frame_id + "\n")
    sections = [
        reporting.render_balance_plan(result.undersample_entries, "Undersampling plan"),
        reporting.render_balance_plan(result.topup_entries, "Real top-up plan"),
        reporting.render_balance_plan(result.augmentation_entries, "Synthetic augmentation plan"),
    ]
    text = "\n".join(reporting.render_text(spec) for spec in sections)
    (out_dir / "balance_report.txt").write_text(text, encoding="utf-8", newline="\n")


def cmd_balance(args, cp, base) -> int:
    manifest_path = _pick_path(args.manifest, cp, base, "paths", "manifest", "manifest path")
    if args.out_dir is None:
        raise UsageError("--out-dir is required")
    seed = _seed(args, cp)
    manifest = ingest.load_manifest(manifest_path)
    result = curation.run_balancing(manifest, seed)
    _write_balance_artifacts(result, Path(args.out_dir))
    print(f"balanced {len(manifest)} -> {len(result.kept)} records (seed {seed})")
    return EXIT_OK


def cmd_plan_aug(args, cp, base) -> int:
    manifest_path = _pick_path(args.manifest, cp, base, "paths", "manifest", "manifest path")
    if args.out is None:
        raise UsageError("--out is required")
    manifest = ingest.load_manifest(manifest_path)
    dist = curation.analyze_distribution(manifest)
    if args.target is not None:
        target = args.target
    else:
        target = curation.compute_mean_targets(dist)[Label.FAKE]
        if target is None:
            raise ValidationError("no fake records present; pass --target explicitly")
    entries = curation.plan_augmentation(dist, target)
    curation.write_plan(entries, args.out)
    total = sum(e.amount for e in entries)
    print(f"augmentation plan: {total} frames to synthesize -> {args.out}")
    return EXIT_OK


def cmd_match(args, cp, base) -> int:
    sources_path = _pick_path(args.sources, cp, base, "paths", "descriptors_sources", "source descriptors")
    targets_path = _pick_path(args.targets, cp, base, "paths", "descriptors_targets", "target descriptors")
    if args.out is None:
        raise UsageError("--out is required")
    cfg = _match_config(args, cp)
    sources = ingest.load_descriptors(sources_path)
    targets = ingest.load_descriptors(targets_path)
    plan = matching.best_matches(sources, targets, cfg)
    matching.write_swap_plan(plan, args.out, args.rejects)
    print(f"matched {len(plan.entries)} of {len(sources)} sources -> {args.out}")
    return EXIT_OK


def cmd_quality(args, cp, base) -> int:
    pairs_path = _pick_path(args.pairs, cp, base, "paths", "quality_pairs", "pairs file")
    if args.out is None:
        raise UsageError("--out is required")
    cfg = _quality_config(args, cp)
    pairs = quality.load_pairs(pairs_path)
    base_dir = Path(args.base_dir) if args.base_dir is not None else Path(pairs_path).parent
    metrics = quality.evaluate_pairs(pairs, cfg, base_dir=base_dir)
    report = quality.gate(metrics, cfg)
    quality.write_quality_report(report, cfg, args.out, args.summary)
    print(f"quality: {len(report.accepted)} accepted, {len(report.rejected)} rejected -> {args.out}")
    return EXIT_OK


def cmd_split(args, cp, base) -> int:
    manifest_path = _pick_path(args.manifest, cp, base, "paths", "manifest", "manifest path")
    if args.train_out is None or args.test_out is None:
        raise UsageError("--train-out and --test-out are required")
    seed = _seed(args, cp)
    ratio = _pick(args.ratio, cp, None, "curation", "split_ratio", float, DEFAULT_CONFIG.split_ratio)
    manifest = ingest.load_manifest(manifest_path)
    train, test = curation.stratified_split(manifest, ratio, seed)
    ingest.write_manifest(train, args.train_out)
    ingest.write_manifest(test, args.test_out)
    print(f"split {len(manifest)} records into {len(train)} train / {len(test)} test")
    return EXIT_OK


def cmd_train(args, cp, base) -> int:
    features_path = _pick_path(args.features, cp, base, "paths", "features", "feature file")
    if args.val_features is None:
        raise UsageError("--val-features is required")
    if args.model_out is None:
        raise UsageError("--model-out is required")
    seed = _seed(args, cp)
    hp = _hyper_params(args, cp, seed)
    _, train_x, train_y = ingest.load_features(features_path)
    _, val_x, val_y = ingest.load_features(args.val_features)
    model = detector.train(train_x, train_y, val_x, val_y, hp)
    detector.save_model(model, args.model_out)
    if args.history_out is not None:
        detector.write_history(model, args.history_out)
    print(
        f"trained {model.stopped_epoch} epochs, best val AUC "
        f"{reporting.format_metric(model.best_val_auc)} at epoch {model.best_epoch}"
    )
    return EXIT_OK


def cmd_evaluate(args, cp, base) -> int:
    if args.scores is None:
        raise UsageError("--scores is required")
    if args.out is None:
        raise UsageError("--out is required")
    cfg = _eval_config(args, cp)
    records = ingest.load_scores(args.scores)
    if not records:
        raise ValidationError(f"{args.scores}: no score rows")
    report = evaluation.evaluate(records, cfg)
    evaluation.write_metric_report(report, args.out)
    print(f"evaluated {len(records)} scores across {len(report.contexts())} contexts -> {args.out}")
    return EXIT_OK


def _write_fairness_csv(report: evaluation.MetricReport, path: Path) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "train", "test", "metric", "gap"])
        for context in report.contexts():
            for metric in ("auc", "pauc", "eer"):
                gap = evaluation.fairness_gap(report, metric, context)
                writer.writerow(
                    list(context) + [metric, "none" if gap is None else repr(gap)]
                )


def _write_metric_tables(report: evaluation.MetricReport, out_dir: Path) -> list[Path]:
    written = []
    for spec in reporting.render_metrics(report):
        train = spec.title.rsplit(" trained on ", 1)[-1]
        path = out_dir / f"metrics_{_slug(train)}.txt"
        reporting.write_text_table(spec, path)
        written.append(path)
    return written


def cmd_report(args, cp, base) -> int:
    if args.out_dir is None:
        raise UsageError("--out-dir is required")
    if args.metrics is None and args.manifest is None:
        raise UsageError("pass --metrics and/or --manifest")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.manifest is not None:
        manifest = ingest.load_manifest(args.manifest)
        dist = curation.analyze_distribution(manifest)
        reporting.write_distribution_csv(dist, out_dir / "distribution.csv")
        reporting.write_text_table(reporting.render_distribution(dist), out_dir / "distribution.txt")
        reporting.write_chart(_age_pie_spec(dist), out_dir / "age_groups_pie.svg")
    if args.metrics is not None:
        report = evaluation.load_metric_report(args.metrics)
        _write_metric_tables(report, out_dir)
        _write_fairness_csv(report, out_dir / "fairness.csv")
    print(f"report artifacts written to {out_dir}")
    return EXIT_OK


def cmd_pipeline(args, cp, base) -> int:
    if base is None:
        raise UsageError("pipeline requires --config (or FAIRAGE_CONFIG)")
    seed = _seed(args, cp)
    out_raw = args.out_dir or _cfg_get(cp, "run", "out_dir")
    if out_raw is None:
        raise UsageError("output directory is required (--out-dir or config [run] out_dir)")
    out_dir = Path(out_raw) if args.out_dir else _resolve(out_raw, base)
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest_path = _pick_path(None, cp, base, "paths", "manifest", "manifest path")
    manifest = ingest.load_manifest(manifest_path)

    # stage 1: distribution analysis
    dist = curation.analyze_distribution(manifest)
    reporting.write_distribution_csv(dist, out_dir / "distribution.csv")
    reporting.write_text_table(reporting.render_distribution(dist), out_dir / "distribution.txt")
    reporting.write_chart(_age_pie_spec(dist), out_dir / "age_groups_pie.svg")

    # stage 2: balancing and augmentation planning
    result = curation.run_balancing(manifest, seed)
    _write_balance_artifacts(result, out_dir)

    # stage 3: face matching
    sources = ingest.load_descriptors(
        _pick_path(None, cp, base, "paths", "descriptors_sources", "source descriptors")
    )
    targets = ingest.load_descriptors(
        _pick_path(None, cp, base, "paths", "descriptors_targets", "target descriptors")
    )
    plan = matching.best_matches(sources, targets, _match_config(args, cp))
    matching.write_swap_plan(plan, out_dir / "swap_plan.csv", out_dir / "swap_rejects.csv")

    # stage 4: quality gating
    q_cfg = _quality_config(args, cp)
    pairs_path = _pick_path(None, cp, base, "paths", "quality_pairs", "pairs file")
    pair_metrics = quality.evaluate_pairs(quality.load_pairs(pairs_path), q_cfg, base_dir=pairs_path.parent)
    q_report = quality.gate(pair_metrics, q_cfg)
    quality.write_quality_report(q_report, q_cfg, out_dir / "quality_metrics.csv", out_dir / "quality_summary.csv")

    # stage 5: stratified split of the balanced manifest
    ratio = _pick(None, cp, None, "curation", "split_ratio", float, DEFAULT_CONFIG.split_ratio)
    train_records, test_records = curation.stratified_split(result.kept, ratio, seed)
    ingest.write_manifest(train_records, out_dir / "train_manifest.csv")
    ingest.write_manifest(test_records, out_dir / "test_manifest.csv")

    # stage 6: detector training; validation comes from a second stratified
    # cut of the train records so the test rows stay untouched
    ids, features, labels = ingest.load_features(
        _pick_path(None, cp, base, "paths", "features", "feature file")
    )
    by_id = {frame_id: i for i, frame_id in enumerate(ids)}

    def rows_for(records) -> tuple[np.ndarray, np.ndarray]:
        missing = [r.frame_id for r in records if r.frame_id not in by_id]
        if missing:
            raise ValidationError(f"feature file lacks rows for: {', '.join(missing[:5])}")
        idx = [by_id[r.frame_id] for r in records]
        for r in records:
            want = 1 if r.label is Label.FAKE else 0
            if int(labels[by_id[r.frame_id]]) != want:
                raise ValidationError(f"feature label for {r.frame_id!r} contradicts the manifest")
        return features[idx], labels[idx]

    fit_records, val_records = curation.stratified_split(
        train_records, ratio, derive_seed(seed, "pipeline.val")
    )
    fit_x, fit_y = rows_for(fit_records)
    val_x, val_y = rows_for(val_records)
    hp = _hyper_params(args, cp, seed)
    model = detector.train(fit_x, fit_y, val_x, val_y, hp)
    detector.save_model(model, out_dir / "model.txt")
    detector.write_history(model, out_dir / "history.csv")

    # stage 7: score the held-out test rows
    test_x, _ = rows_for(test_records)
    logits = detector.predict(model, test_x)
    model_id = _cfg_get(cp, "run", "model_id") or "reference"
    train_name = _cfg_get(cp, "run", "train_name") or "fixture-train"
    test_name = _cfg_get(cp, "run", "test_name") or "fixture-test"
    score_records = [
        ingest.ScoreRecord(model_id, train_name, test_name, r.frame_id, r.label, r.age_group, float(z))
        for r, z in zip(test_records, logits)
    ]
    ingest.write_scores(score_records, out_dir / "scores.csv")

    # stage 8: metrics and reports
    e_cfg = _eval_config(args, cp)
    report = evaluation.evaluate(score_records, e_cfg)
    evaluation.write_metric_report(report, out_dir / "metric_report.csv")
    _write_metric_tables(report, out_dir)
    _write_fairness_csv(report, out_dir / "fairness.csv")

    print(f"pipeline complete (seed {seed}): artifacts in {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairage",
        description="Deterministic dataset curation and fairness evaluation for deepfake detection work.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="INI config file path")
        p.set_defaults(func=func)
        return p

    p = add("analyze", cmd_analyze, "count records by label, age group, and source")
    p.add_argument("--manifest")
    p.add_argument("--out", help="distribution CSV output")
    p.add_argument("--table", help="optional aligned text table output")
    p.add_argument("--chart", help="optional age-group pie chart (SVG)")
    p.add_argument("--lenient", action="store_true", help="drop bad manifest rows instead of failing")

    p = add("balance", cmd_balance, "undersample to the mean and plan top-ups and synthesis")
    p.add_argument("--manifest")
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int)

    p = add("plan-aug", cmd_plan_aug, "emit the synthetic augmentation plan")
    p.add_argument("--manifest")
    p.add_argument("--out")
    p.add_argument("--target", type=int, help="fake target per age group (default: computed)")

    p = add("match", cmd_match, "pair source faces with targets by embedding similarity")
    p.add_argument("--sources")
    p.add_argument("--targets")
    p.add_argument("--out", help="swap plan CSV output")
    p.add_argument("--rejects", help="optional rejected-sources CSV output")
    p.add_argument("--w-sim", dest="w_sim", type=float)
    p.add_argument("--w-attr", dest="w_attr", type=float)
    p.add_argument("--min-cosine", dest="min_cosine", type=float)
    p.add_argument("--min-combined", dest="min_combined", type=float)
    p.add_argument("--one-to-one", dest="one_to_one", action="store_true")

    p = add("quality", cmd_quality, "compute SSIM/PSNR for frame pairs and gate them")
    p.add_argument("--pairs")
    p.add_argument("--out", help="per-pair metrics CSV output")
    p.add_argument("--summary", help="optional aggregate summary CSV output")
    p.add_argument("--base-dir", dest="base_dir", help="base for relative image paths (default: pairs file directory)")
    p.add_argument("--min-ssim", dest="min_ssim", type=float)
    p.add_argument("--min-psnr", dest="min_psnr", type=float)
    p.add_argument("--window-size", dest="window_size", type=int)
    p.add_argument("--sigma", type=float)

    p = add("split", cmd_split, "stratified train/test split of a manifest")
    p.add_argument("--manifest")
    p.add_argument("--train-out", dest="train_out")
    p.add_argument("--test-out", dest="test_out")
    p.add_argument("--ratio", type=float)
    p.add_argument("--seed", type=int)

    p = add("train", cmd_train, "train the reference detector on feature files")
    p.add_argument("--features")
    p.add_argument("--val-features", dest="val_features")
    p.add_argument("--model-out", dest="model_out")
    p.add_argument("--history-out", dest="history_out")
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--weight-decay", dest="weight_decay", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--max-epochs", dest="max_epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--hidden", type=_parse_hidden, help="hidden layer widths, e.g. 8,4 (default none)")
    p.add_argument("--coupled-weight-decay", dest="coupled_weight_decay", action="store_true")
    p.add_argument("--seed", type=int)

    p = add("evaluate", cmd_evaluate, "compute AUC/pAUC/EER from a score file")
    p.add_argument("--scores")
    p.add_argument("--out", help="metric report CSV output")
    p.add_argument("--max-fpr", dest="max_fpr", type=float)
    p.add_argument("--raw-pauc", dest="raw_pauc", action="store_true", help="skip pAUC normalization")

    p = add("report", cmd_report, "render tables and charts from metric reports or manifests")
    p.add_argument("--metrics", help="metric report CSV input")
    p.add_argument("--manifest", help="manifest input for distribution artifacts")
    p.add_argument("--out-dir", dest="out_dir")

    p = add("pipeline", cmd_pipeline, "run every stage over the configured fixture tree")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--seed", type=int)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cp, base = load_config(getattr(args, "config", None))
        return args.func(args, cp, base)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (ValidationError, SingleClassError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FairageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
