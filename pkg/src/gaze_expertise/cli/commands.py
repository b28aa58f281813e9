# File: src/gaze_expertise/cli/commands.py

import logging
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import Dict, List

import numpy as np
import pandas as pd

from ..core.errors import ParameterError
from ..core.runnables import RunnableConfig, RunnableLambda
from ..core.schemas import Fixation, Session
from ..core.validation import validate_session
from ..detection.idt import FixationDetector, write_fixations_csv
from ..evaluation.batch import run_batch
from ..evaluation.plots import plot_roc, plot_trace
from ..evaluation.roc import roc_curve, write_roc_csv
from ..evaluation.splits import make_split
from ..evaluation.traces import compare_phase_scores, softmax_trace
from ..features.export import (
    export_dataset,
    images_frame,
    load_feature_matrix,
    size_tag,
    write_feature_matrix,
)
from ..features.extract import extract_window_features, labels_of, session_windows
from ..features.images import image_statistics
from ..features.normalize import fit_normalizer, normalize_all
from ..models.checkpoint import load_checkpoint, save_checkpoint
from ..models.multistream import init_model, predict_scores
from ..models.training import train
from ..parsers.manifest import SessionParser, load_session
from ..stats.groups import compare_groups, split_by_label
from ..synth.generator import generate_cohort
from ..windowing.spans import inventory_frame
from .config import RunConfig
from .registry import command
from .store import SESSIONS_DIR, dump_json, load_store, manifest_paths, write_store

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["window_size", "phase_filter", "n_models", "mean_auroc", "std_auroc"]


def _runnable_config(config: RunConfig, tag: str) -> RunnableConfig:
    return RunnableConfig(run_id=f"{tag}-{config.seed}", tags=[tag], max_concurrency=config.max_concurrency)


def _session_store(config: RunConfig, args: Namespace) -> Path:
    store = getattr(args, "sessions", None) or config.paths.sessions or config.paths.out / SESSIONS_DIR
    return Path(store)


def _features_dir(config: RunConfig, args: Namespace) -> Path:
    return Path(getattr(args, "features", None) or config.paths.features or config.paths.out)


# ---- ingest ---- #

def _ingest_args(parser: ArgumentParser) -> None:
    parser.add_argument("paths", nargs="+", type=Path, help="Manifest files or directories of manifests.")


@command(_ingest_args)
def cmd_ingest(config: RunConfig, args: Namespace) -> dict:
    """Parse and validate sessions; write usable ones to the session store with validation reports."""
    manifests: List[Path] = []
    for path in args.paths:
        manifests.extend(manifest_paths(path))
    if not manifests:
        raise ParameterError(f"no manifests found in {[str(p) for p in args.paths]}")

    pipeline = SessionParser(options=config.gaze) | RunnableLambda(
        lambda s: (s, validate_session(s, config.validation))
    )
    checked = pipeline.batch(manifests, _runnable_config(config, "ingest"))
    reports = [report for _, report in checked]
    usable: List[Session] = [session for session, report in checked if report.usable]
    usable.sort(key=lambda s: s.participant_id)
    reports.sort(key=lambda r: r.participant_id)

    out = config.paths.out
    write_store(usable, out / SESSIONS_DIR)
    dump_json([r.model_dump(mode="json") for r in reports], out / "validation.json")
    logger.info("✅ Ingested %d of %d sessions", len(usable), len(reports))
    return {"sessions": len(usable), "rejected": len(reports) - len(usable)}


# ---- features ---- #

def _features_args(parser: ArgumentParser) -> None:
    parser.add_argument("--sessions", type=Path, help="Session store directory.")
    parser.add_argument("--dataset", action="store_true", help="Also export per-image statistics and heatmaps.")


@command(_features_args)
def cmd_features(config: RunConfig, args: Namespace) -> dict:
    """Fixations, window inventories and feature matrices for every configured window size."""
    sessions = load_store(_session_store(config, args), config.gaze)
    out = config.paths.out
    detector = FixationDetector(config.idt)
    fixation_lists = detector.batch([s.track for s in sessions], _runnable_config(config, "features"))
    fixations: Dict[str, List[Fixation]] = {s.participant_id: f for s, f in zip(sessions, fixation_lists)}

    for session in sessions:
        write_fixations_csv(fixations[session.participant_id], out / "fixations" / f"{session.participant_id}.csv")

    images = [row for s in sessions for row in image_statistics(s, fixations[s.participant_id])]
    images_frame(images).to_csv(out / "images.csv", index=False, lineterminator="\n")
    if args.dataset:
        for session in sessions:
            export_dataset(session, fixations[session.participant_id], out / "dataset", config.heatmap)

    # every window is kept with its tag; "auto" only narrows training in eval
    initial_only = config.phase_filter == "initial_only"
    counts = {}
    for size in config.window_sizes:
        features = [
            extract_window_features(w, s.track.nominal_rate)
            for s in sessions
            for w in session_windows(s, size, fixations[s.participant_id], initial_only)
        ]
        write_feature_matrix(features, out, size)
        inventory = inventory_frame([
            {
                "participant_id": f.participant_id,
                "window_index": f.window_index,
                "start_s": f.start,
                "size_s": f.size,
                "phase_tag": f.phase_tag.value,
                "label": f.label.value,
            }
            for f in features
        ])
        inventory.to_csv(out / f"windows_{size_tag(size)}.csv", index=False, lineterminator="\n")
        counts[size_tag(size)] = len(features)
    return {"windows": counts}


# ---- stats ---- #

def _stats_args(parser: ArgumentParser) -> None:
    parser.add_argument("--features", type=Path, help="Directory with features_<size>s.npz and images.csv.")


@command(_stats_args)
def cmd_stats(config: RunConfig, args: Namespace) -> dict:
    """Mann-Whitney U tests of AFD, FC and AED between experts and non-experts."""
    source = _features_dir(config, args)
    alpha = config.stats.alpha
    out = config.paths.out
    reports = {}
    if config.stats.granularity == "image":
        images = list(pd.read_csv(source / "images.csv").itertuples(index=False))
        report = compare_groups(*split_by_label(images), alpha=alpha, granularity="image")
        report.write(out / "stats_images.json")
        reports["images"] = report
    else:
        for size in config.window_sizes:
            path = source / f"features_{size_tag(size)}.npz"
            windows = load_feature_matrix(path)
            report = compare_groups(*split_by_label(windows), alpha=alpha, granularity="window")
            report.write(out / f"stats_{size_tag(size)}.json")
            reports[size_tag(size)] = report
    return {
        key: {item.feature: item.significant for item in report.features}
        for key, report in reports.items()
    }


# ---- synth ---- #

@command()
def cmd_synth(config: RunConfig, args: Namespace) -> dict:
    """Generate a synthetic expert / non-expert cohort into the session store."""
    spec = config.synth.model_copy(update={"seed": config.seed})
    sessions = generate_cohort(
        config.expert_profile, config.nonexpert_profile, spec, _runnable_config(config, "synth")
    )
    write_store(sessions, config.paths.out / SESSIONS_DIR)
    return {"sessions": len(sessions)}


# ---- train ---- #

def _train_args(parser: ArgumentParser) -> None:
    parser.add_argument("--features", type=Path, help="Directory with features_<size>s.npz.")


@command(_train_args)
def cmd_train(config: RunConfig, args: Namespace) -> dict:
    """Train one model on a subject-disjoint split of a feature matrix."""
    size = config.window_sizes[0]
    tag = size_tag(size)
    windows = load_feature_matrix(_features_dir(config, args) / f"features_{tag}.npz")
    if not windows:
        raise ParameterError(f"feature matrix for {tag} windows is empty")
    plan = make_split(windows, config.seed)
    by_split = {
        name: [w for w in windows if w.participant_id in set(ids)]
        for name, ids in (("train", plan.train), ("val", plan.val), ("test", plan.test))
    }
    stats = fit_normalizer(by_split["train"])
    by_split = {name: normalize_all(stats, ws) for name, ws in by_split.items()}

    length = windows[0].length
    model = init_model(config.model.model_copy(update={"input_length": length, "seed": config.seed}))
    trained, history = train(
        model, by_split["train"], by_split["val"], config.train.model_copy(update={"seed": config.seed})
    )

    out = config.paths.out
    save_checkpoint(trained, out / f"model_{tag}.npz", window_size=size, nominal_rate=length / size, stats=stats)
    history.write_csv(out / f"history_{tag}.csv")
    dump_json(plan, out / f"split_{tag}.json")
    result = {"best_epoch": history.best_epoch, "best_val_auroc": history.best_val_auroc}
    test = by_split["test"]
    if test and len(set(labels_of(test).tolist())) == 2:
        result["test_auroc"] = roc_curve(predict_scores(trained, test), labels_of(test)).auroc
    return result


# ---- eval ---- #

def _eval_args(parser: ArgumentParser) -> None:
    parser.add_argument("--sessions", type=Path, help="Session store directory.")


@command(_eval_args)
def cmd_eval(config: RunConfig, args: Namespace) -> dict:
    """Batches of models per window size: metrics JSON, ROC points and a summary table."""
    sessions = load_store(_session_store(config, args), config.gaze)
    out = config.paths.out
    rows = []
    for size in config.window_sizes:
        result = run_batch(
            sessions,
            size,
            n_models=config.n_models,
            phase_filter=config.phase_filter,
            base_seed=config.seed,
            model_config=config.model,
            train_config=config.train,
            idt=config.idt,
            config=_runnable_config(config, "eval"),
        )
        target = out / f"eval_{size_tag(size)}"
        result.write_metrics(target / "metrics.json")
        write_roc_csv([(r.seed, r.roc) for r in result.per_model], target / "roc.csv", mean=result.mean_roc)
        if config.plots:
            plot_roc(
                [r.roc for r in result.per_model],
                result.mean_roc,
                target / "roc.png",
                title=f"{size:g}s windows, AUROC {result.mean_auroc:.3f} ± {result.std_auroc:.3f}",
            )
        rows.append([size, result.phase_filter, result.n_models, result.mean_auroc, result.std_auroc])
        logger.info("✅ %gs: mean AUROC %.3f ± %.3f", size, result.mean_auroc, result.std_auroc)

    summary = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    summary.to_csv(out / "summary.csv", index=False, lineterminator="\n", float_format="%.10g")
    return {"summary": summary.to_dict(orient="records")}


# ---- trace ---- #

def _trace_args(parser: ArgumentParser) -> None:
    parser.add_argument("session", type=Path, help="Session manifest.")
    parser.add_argument("--checkpoint", type=Path, help="Trained model (.npz).")


@command(_trace_args)
def cmd_trace(config: RunConfig, args: Namespace) -> dict:
    """Expertise score of every window of one session, from a trained checkpoint."""
    path = args.checkpoint or config.paths.checkpoint
    if path is None:
        raise ParameterError("a checkpoint is required (--checkpoint or paths.checkpoint)")
    ckpt = load_checkpoint(path)
    session = load_session(args.session, options=config.gaze)
    trace = softmax_trace(ckpt.model, session, ckpt.window_size, stats=ckpt.stats, idt=config.idt)

    out = config.paths.out
    trace.write_csv(out / f"trace_{session.participant_id}.csv")
    if config.plots:
        plot_trace(trace, out / f"trace_{session.participant_id}.png")
    result = {"windows": len(trace), "mean_score": float(np.mean(trace.scores)) if len(trace) else None}
    try:
        phases = compare_phase_scores(trace, alpha=config.stats.alpha)
    except ParameterError:
        logger.info("Trace holds a single phase type; no phase comparison")
    else:
        dump_json(phases, out / f"trace_{session.participant_id}_phases.json")
        result["phase_p_value"] = phases.p_value
    return result
