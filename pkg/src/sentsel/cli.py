"""Command-line driver for the whole pipeline.

Seven commands move data from raw SQuAD JSON to the comparison report:

    ingest      parse + sentence-split + label + train/test split
    featurize   encode sentences and build the distance feature matrices
    train       fit one model (or all) on cached features
    evaluate    re-score saved models, or score an external predictions file
    pca-report  eigen spectrum / variance curve of the scaled features
    gmm-report  mixture clustering of the first slot's distance pair
    compare     combined report with paper-reported reference rows

Every command writes its artifacts under the configured output directory
plus a manifest (config hash, input hashes, output hashes, versions), so a
rerun with identical inputs is byte-identical and fully auditable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, classifiers, gmm as gmm_mod, pca as pca_mod
from .config import (
    MODEL_NAMES,
    RunConfig,
    apply_overrides,
    config_hash,
    config_to_dict,
    load_config,
    resolve_path,
)
from .embed import (
    IdfMeanEncoder,
    load_idf,
    load_word_vectors,
    save_idf,
    truncate_table,
    build_vocab_idf,
)
from .errors import ConfigError, DataError, NumericError, SentselError
from .features import (
    FeatureMatrix,
    ScalingParams,
    apply_scaling,
    build_feature_matrix,
    read_features_bin,
    scale,
    write_features_bin,
    write_features_csv,
)
from .ingest import build_dataset, parse_squad, read_examples_jsonl, write_examples_jsonl
from .report import (
    EvalReport,
    ModelResult,
    emit_plot_data,
    emit_report,
    evaluate as evaluate_metrics,
    load_external_predictions,
)

DATA_DIR_ENV = "SENTSEL_DATA_DIR"
COMPARE_ORDER = ("logistic", "svm", "forest", "forest_overfit", "gbt", "external")


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through ConfigError (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fp:
        for chunk in iter(lambda: fp.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return path


def _write_manifest(out: Path, command: str, cfg: RunConfig,
                    inputs: dict, outputs: list) -> Path:
    import matplotlib

    manifest = {
        "command": command,
        "config": config_to_dict(cfg),
        "config_hash": config_hash(cfg),
        "inputs": {
            name: {"path": str(p), "sha256": _sha256(p)}
            for name, p in sorted(inputs.items())
        },
        "outputs": {
            str(Path(p).relative_to(out)): _sha256(Path(p))
            for p in sorted(outputs, key=str)
        },
        "versions": {
            "package": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "matplotlib": matplotlib.__version__,
        },
    }
    return _write_json(out / "manifests" / f"{command}.json", manifest)


def _require_artifact(path: Path, producer: str) -> Path:
    if not path.exists():
        raise DataError(f"missing {path}; run `sentsel {producer}` first")
    return path


class _MemoEncoder:
    """Avoid re-encoding repeated sentences; tracks OOV fractions seen."""

    def __init__(self, inner):
        self.inner = inner
        self.encoder_id = inner.encoder_id
        self._memo = {}
        self.oov_fractions = []

    def encode(self, tokens):
        key = tuple(tokens)
        got = self._memo.get(key)
        if got is None:
            got = self.inner.encode(list(tokens))
            self._memo[key] = got
            self.oov_fractions.append(got.oov_fraction)
        return got


# ---------------------------------------------------------------- commands


def cmd_ingest(cfg: RunConfig, args) -> None:
    out = Path(cfg.output_dir)
    data_dir = os.environ.get(DATA_DIR_ENV)
    squad_path = resolve_path(cfg.squad_json, data_dir)
    if not squad_path.exists():
        raise DataError(f"squad file not found: {squad_path}")

    corpus = parse_squad(squad_path.read_bytes())
    train, test = build_dataset(corpus, cfg.max_slots, cfg.split_ratio, cfg.seed)
    if cfg.limit_rows is not None:
        n_train = max(1, int(cfg.limit_rows * cfg.split_ratio))
        n_test = max(1, cfg.limit_rows - n_train)
        train, test = train[:n_train], test[:n_test]
    idf, default_idf = build_vocab_idf(corpus)

    ds = out / "dataset"
    ds.mkdir(parents=True, exist_ok=True)
    with open(ds / "train.jsonl", "w", encoding="utf-8") as fp:
        write_examples_jsonl(train, fp)
    with open(ds / "test.jsonl", "w", encoding="utf-8") as fp:
        write_examples_jsonl(test, fp)
    save_idf(idf, default_idf, str(ds / "idf.json"))
    stats = {
        "articles": corpus.stats.articles,
        "paragraphs": corpus.stats.paragraphs,
        "questions": corpus.stats.questions,
        "skipped_records": corpus.stats.skipped_records,
        "train_examples": len(train),
        "test_examples": len(test),
        "split_ratio": cfg.split_ratio,
        "seed": cfg.seed,
    }
    _write_json(ds / "stats.json", stats)

    outputs = [ds / "train.jsonl", ds / "test.jsonl", ds / "idf.json", ds / "stats.json"]
    _write_manifest(out, "ingest", cfg, {"squad_json": squad_path}, outputs)
    print(
        f"ingest: {corpus.stats.questions} questions -> "
        f"{len(train)} train / {len(test)} test examples"
    )


def _load_examples(out: Path, split: str):
    path = _require_artifact(out / "dataset" / f"{split}.jsonl", "ingest")
    with open(path, encoding="utf-8") as fp:
        return read_examples_jsonl(fp)


def cmd_featurize(cfg: RunConfig, args) -> None:
    out = Path(cfg.output_dir)
    data_dir = os.environ.get(DATA_DIR_ENV)
    vectors_path = resolve_path(cfg.word_vectors, data_dir)
    if not vectors_path.exists():
        raise DataError(f"word vector file not found: {vectors_path}")
    train_ex = _load_examples(out, "train")
    test_ex = _load_examples(out, "test")
    idf_path = _require_artifact(out / "dataset" / "idf.json", "ingest")

    table = load_word_vectors(str(vectors_path), cfg.vector_limit)
    if cfg.encoder_dim is not None:
        table = truncate_table(table, cfg.encoder_dim)
    idf, default_idf = load_idf(str(idf_path))
    table = table.with_idf(idf, default_idf)
    encoder = _MemoEncoder(IdfMeanEncoder(table))

    train_m = build_feature_matrix(train_ex, encoder, cfg.max_slots)
    pad = float(train_m.X[:, : cfg.max_slots].max())
    test_m = build_feature_matrix(test_ex, encoder, cfg.max_slots, pad_euclid=pad)

    feats = out / "features"
    feats.mkdir(parents=True, exist_ok=True)
    write_features_csv(train_m, str(feats / "train.csv"))
    write_features_bin(train_m, str(feats / "train.bin"))
    write_features_csv(test_m, str(feats / "test.csv"))
    write_features_bin(test_m, str(feats / "test.bin"))
    meta = {
        "encoder_id": encoder.encoder_id,
        "pad_euclid": pad,
        "n_train": train_m.n_rows,
        "n_test": test_m.n_rows,
        "rows": train_m.n_rows + test_m.n_rows,
        "max_slots": cfg.max_slots,
        "split_ratio": cfg.split_ratio,
        "seed": cfg.seed,
        "oov_fraction_mean": round(float(np.mean(encoder.oov_fractions)), 6),
    }
    _write_json(feats / "meta.json", meta)

    outputs = [feats / n for n in ("train.csv", "train.bin", "test.csv", "test.bin", "meta.json")]
    inputs = {
        "word_vectors": vectors_path,
        "train_examples": out / "dataset" / "train.jsonl",
        "test_examples": out / "dataset" / "test.jsonl",
        "idf": idf_path,
    }
    _write_manifest(out, "featurize", cfg, inputs, outputs)
    print(
        f"featurize: {train_m.n_rows}x{train_m.n_cols} train, "
        f"{test_m.n_rows}x{test_m.n_cols} test ({encoder.encoder_id})"
    )


def _load_matrices(out: Path):
    train_p = _require_artifact(out / "features" / "train.bin", "featurize")
    test_p = _require_artifact(out / "features" / "test.bin", "featurize")
    meta_p = _require_artifact(out / "features" / "meta.json", "featurize")
    meta = json.loads(meta_p.read_text(encoding="utf-8"))
    return read_features_bin(str(train_p)), read_features_bin(str(test_p)), meta


def _scaling_payload(params: ScalingParams) -> dict:
    return {
        "kind": params.kind,
        "center": params.center.tolist(),
        "spread": params.spread.tolist(),
    }


def _scaling_from_payload(payload: dict) -> ScalingParams:
    return ScalingParams(
        payload["kind"],
        np.asarray(payload["center"], dtype=np.float64),
        np.asarray(payload["spread"], dtype=np.float64),
    )


def _save_artifact(path: Path, model, preprocess: dict) -> None:
    record = {
        "format_version": classifiers.MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "payload": model.to_payload(),
        "preprocess": preprocess,
    }
    _write_json(path, record)


def _load_artifact(path: Path):
    model = classifiers.load_model(path)
    record = json.loads(path.read_text(encoding="utf-8"))
    return model, record.get("preprocess", {})


def _apply_preprocess(matrix: FeatureMatrix, preprocess: dict) -> np.ndarray:
    X = matrix.X
    if preprocess.get("scaling"):
        X = _scaling_from_payload(preprocess["scaling"]).transform(X)
    if preprocess.get("pca"):
        p = preprocess["pca"]
        mean = np.asarray(p["mean"], dtype=np.float64)
        components = np.asarray(p["components"], dtype=np.float64)
        X = (X - mean) @ components.T
    return X


def _eval_payload(name: str, model, X_train, y_train, X_test, y_test,
                  wall: float, hyper: dict) -> dict:
    train_pred = classifiers.predict(model, X_train)
    test_pred = classifiers.predict(model, X_test)
    train_m = evaluate_metrics(train_pred, y_train)
    test_m = evaluate_metrics(test_pred, y_test)
    return {
        "name": name,
        "accuracy": round(test_m["accuracy"], 6),
        "macro_f1": round(test_m["macro_f1"], 6),
        "train_accuracy": round(train_m["accuracy"], 6),
        "train_macro_f1": round(train_m["macro_f1"], 6),
        "wall_time_seconds": round(wall, 6),
        "hyperparameters": hyper,
    }


def _train_one(name: str, cfg: RunConfig, train_s: FeatureMatrix,
               test_s: FeatureMatrix, out: Path) -> list:
    """Fit one named model on pre-scaled matrices; returns written paths."""
    params = train_s.scaling
    written = []
    t0 = time.perf_counter()

    if name == "logistic":
        lc = cfg.logistic
        pca_payload = None
        fit_train, fit_test = train_s, test_s
        if lc.pca_k is not None:
            model_pca = pca_mod.fit_pca(train_s.X)
            k = lc.pca_k
            fit_train = FeatureMatrix(
                pca_mod.project(model_pca, train_s.X, k), train_s.labels, train_s.max_slots
            )
            fit_test = FeatureMatrix(
                pca_mod.project(model_pca, test_s.X, k), test_s.labels, test_s.max_slots
            )
            pca_payload = {
                "mean": model_pca.mean.tolist(),
                "components": model_pca.components[:k].tolist(),
                "k": k,
            }
        model, curve = classifiers.fit_logistic(
            fit_train, fit_test, lc.learning_rate, lc.epochs, lc.l2, cfg.seed
        )
        wall = (time.perf_counter() - t0) if cfg.record_timings else 0.0
        model.training_meta["wall_time_seconds"] = round(wall, 6)
        pre = {"scaling": _scaling_payload(params), "pca": pca_payload}
        _save_artifact(out / "models" / "logistic.json", model, pre)
        written.append(out / "models" / "logistic.json")

        curves = out / "curves"
        curves.mkdir(parents=True, exist_ok=True)
        emit_plot_data("curve", curve, curves / "logistic.csv")
        written.append(curves / "logistic.csv")
        from .figures import render_curve

        figs = out / "figures"
        figs.mkdir(parents=True, exist_ok=True)
        render_curve(curve, figs / "logistic_accuracy.png", figs / "logistic_loss.png")
        written += [figs / "logistic_accuracy.png", figs / "logistic_loss.png"]

        hyper = {
            "learning_rate": lc.learning_rate,
            "epochs": lc.epochs,
            "l2": lc.l2,
            "pca_k": lc.pca_k,
            "seed": cfg.seed,
            "scaling": params.kind,
        }
        payload = _eval_payload(
            "logistic", model, fit_train.X, fit_train.labels,
            fit_test.X, fit_test.labels, wall, hyper,
        )
        written.append(_write_json(out / "eval" / "logistic.json", payload))
        return written

    if name == "svm":
        sc = cfg.svm
        fit_train = train_s
        n = train_s.n_rows
        subsampled = None
        if n > sc.max_train_rows:
            rng = np.random.RandomState(cfg.seed)
            keep = np.sort(rng.choice(n, size=sc.max_train_rows, replace=False))
            fit_train = FeatureMatrix(
                train_s.X[keep], train_s.labels[keep], train_s.max_slots
            )
            subsampled = sc.max_train_rows
        model = classifiers.fit_svm(
            fit_train, sc.kernel, sc.gamma, sc.C, sc.degree, sc.tol, cfg.seed
        )
        wall = (time.perf_counter() - t0) if cfg.record_timings else 0.0
        model.training_meta["wall_time_seconds"] = round(wall, 6)
        pre = {"scaling": _scaling_payload(params), "pca": None}
        _save_artifact(out / "models" / "svm.json", model, pre)
        written.append(out / "models" / "svm.json")
        hyper = {
            "kernel": sc.kernel,
            "gamma": sc.gamma,
            "C": sc.C,
            "degree": sc.degree,
            "tol": sc.tol,
            "train_rows": fit_train.n_rows,
            "subsampled_to": subsampled,
            "seed": cfg.seed,
            "scaling": params.kind,
        }
        payload = _eval_payload(
            "svm", model, fit_train.X, fit_train.labels,
            test_s.X, test_s.labels, wall, hyper,
        )
        written.append(_write_json(out / "eval" / "svm.json", payload))
        return written

    if name in ("forest", "forest_overfit"):
        preset = cfg.forest.default if name == "forest" else cfg.forest.overfit
        model = classifiers.fit_forest(
            train_s,
            n_estimators=preset.n_estimators,
            min_samples_leaf=preset.min_samples_leaf,
            seed=cfg.seed,
        )
        wall = (time.perf_counter() - t0) if cfg.record_timings else 0.0
        model.training_meta["wall_time_seconds"] = round(wall, 6)
        pre = {"scaling": _scaling_payload(params), "pca": None}
        _save_artifact(out / "models" / f"{name}.json", model, pre)
        written.append(out / "models" / f"{name}.json")
        hyper = {
            "n_estimators": preset.n_estimators,
            "min_samples_leaf": preset.min_samples_leaf,
            "max_features": model.training_meta["max_features"],
            "seed": cfg.seed,
            "scaling": params.kind,
        }
        payload = _eval_payload(
            name, model, train_s.X, train_s.labels,
            test_s.X, test_s.labels, wall, hyper,
        )
        written.append(_write_json(out / "eval" / f"{name}.json", payload))
        return written

    if name == "gbt":
        gc = cfg.gbt
        model = classifiers.fit_gbt(
            train_s,
            n_estimators=gc.n_estimators,
            learning_rate=gc.learning_rate,
            max_depth=gc.max_depth,
            min_samples_leaf=gc.min_samples_leaf,
            seed=cfg.seed,
        )
        wall = (time.perf_counter() - t0) if cfg.record_timings else 0.0
        model.training_meta["wall_time_seconds"] = round(wall, 6)
        pre = {"scaling": _scaling_payload(params), "pca": None}
        _save_artifact(out / "models" / "gbt.json", model, pre)
        written.append(out / "models" / "gbt.json")
        hyper = {
            "n_estimators": gc.n_estimators,
            "learning_rate": gc.learning_rate,
            "max_depth": gc.max_depth,
            "min_samples_leaf": gc.min_samples_leaf,
            "seed": cfg.seed,
            "scaling": params.kind,
        }
        payload = _eval_payload(
            "gbt", model, train_s.X, train_s.labels,
            test_s.X, test_s.labels, wall, hyper,
        )
        written.append(_write_json(out / "eval" / "gbt.json", payload))
        return written

    raise ConfigError(f"unknown model {name!r}")


def cmd_train(cfg: RunConfig, args) -> None:
    out = Path(cfg.output_dir)
    train_m, test_m, _ = _load_matrices(out)
    train_s = scale(train_m, cfg.scaling.classifier)
    test_s = apply_scaling(test_m, train_s.scaling)

    if args.model == "all":
        names = ["logistic", "svm", "forest", "forest_overfit", "gbt"]
    elif args.model == "forest":
        names = ["forest", "forest_overfit"]
    else:
        names = [args.model]

    (out / "models").mkdir(parents=True, exist_ok=True)
    (out / "eval").mkdir(parents=True, exist_ok=True)
    outputs = []
    for name in names:
        outputs += _train_one(name, cfg, train_s, test_s, out)
        payload = json.loads((out / "eval" / f"{name}.json").read_text())
        print(
            f"train {name}: test accuracy {payload['accuracy']:.4f}, "
            f"macro F1 {payload['macro_f1']:.4f}"
        )

    inputs = {
        "features_train": out / "features" / "train.bin",
        "features_test": out / "features" / "test.bin",
    }
    _write_manifest(out, "train", cfg, inputs, outputs)


def cmd_evaluate(cfg: RunConfig, args) -> None:
    out = Path(cfg.output_dir)
    train_m, test_m, _ = _load_matrices(out)
    outputs = []
    inputs = {
        "features_train": out / "features" / "train.bin",
        "features_test": out / "features" / "test.bin",
    }

    if args.external:
        ext_path = Path(args.external)
        if not ext_path.exists():
            raise DataError(f"external predictions file not found: {ext_path}")
        predictions = load_external_predictions(ext_path)
        test_ex = _load_examples(out, "test")
        missing = [ex.qa_id for ex in test_ex if ex.qa_id not in predictions]
        if missing:
            raise DataError(
                f"external predictions missing {len(missing)} of "
                f"{len(test_ex)} test qa_ids (first: {missing[0]})"
            )
        preds = np.array([predictions[ex.qa_id] for ex in test_ex], dtype=np.int64)
        labels = np.array([ex.gold_slot for ex in test_ex], dtype=np.int64)
        metrics = evaluate_metrics(preds, labels)
        payload = {
            "name": "external",
            "accuracy": round(metrics["accuracy"], 6),
            "macro_f1": round(metrics["macro_f1"], 6),
            "train_accuracy": 0.0,
            "train_macro_f1": 0.0,
            "wall_time_seconds": 0.0,
            "hyperparameters": {"source": ext_path.name},
        }
        outputs.append(_write_json(out / "eval" / "external.json", payload))
        inputs["external_predictions"] = ext_path
        print(
            f"evaluate external: accuracy {metrics['accuracy']:.4f}, "
            f"macro F1 {metrics['macro_f1']:.4f}"
        )
    else:
        if args.model == "all":
            names = ["logistic", "svm", "forest", "forest_overfit", "gbt"]
        elif args.model == "forest":
            names = ["forest", "forest_overfit"]
        else:
            names = [args.model]
        for name in names:
            artifact = _require_artifact(
                out / "models" / f"{name}.json", f"train --model {name.split('_')[0]}"
            )
            model, preprocess = _load_artifact(artifact)
            X_train = _apply_preprocess(train_m, preprocess)
            X_test = _apply_preprocess(test_m, preprocess)
            wall = float(model.training_meta.get("wall_time_seconds", 0.0))
            hyper = dict(model.training_meta)
            hyper.pop("per_class", None)
            hyper.pop("deviance_trace", None)
            payload = _eval_payload(
                name, model, X_train, train_m.labels, X_test, test_m.labels,
                wall, hyper,
            )
            outputs.append(_write_json(out / "eval" / f"{name}.json", payload))
            inputs[f"model_{name}"] = artifact
            print(
                f"evaluate {name}: accuracy {payload['accuracy']:.4f}, "
                f"macro F1 {payload['macro_f1']:.4f}"
            )

    _write_manifest(out, "evaluate", cfg, inputs, outputs)


def cmd_pca_report(cfg: RunConfig, args) -> None:
    out = Path(cfg.output_dir)
    train_m, _, _ = _load_matrices(out)
    train_s = scale(train_m, cfg.scaling.pca)

    model = pca_mod.fit_pca(train_s.X)
    analysis = out / "analysis"
    analysis.mkdir(parents=True, exist_ok=True)
    emit_plot_data("eigspectrum", model.eigenvalues, analysis / "eigspectrum.csv")
    curve = pca_mod.variance_curve(model)
    emit_plot_data("variance", curve, analysis / "variance.csv")
    recon = {
        str(k): round(pca_mod.reconstruction_error(model, train_s.X, k), 6)
        for k in range(1, model.dim + 1)
    }
    meta = {
        "dim": model.dim,
        "eigenvalue_sum": round(float(model.eigenvalues.sum()), 6),
        "reconstruction_error": recon,
        "scaling": cfg.scaling.pca,
    }
    _write_json(analysis / "pca_meta.json", meta)

    from .figures import render_eigspectrum, render_variance

    figs = out / "figures"
    figs.mkdir(parents=True, exist_ok=True)
    render_eigspectrum(model.eigenvalues, figs / "eigspectrum.png")
    render_variance(curve, figs / "variance.png")

    outputs = [
        analysis / "eigspectrum.csv",
        analysis / "variance.csv",
        analysis / "pca_meta.json",
        figs / "eigspectrum.png",
        figs / "variance.png",
    ]
    inputs = {"features_train": out / "features" / "train.bin"}
    _write_manifest(out, "pca-report", cfg, inputs, outputs)
    top = model.eigenvalues[0] / max(model.eigenvalues.sum(), 1e-300)
    print(f"pca-report: top component explains {top:.1%} of variance")


def cmd_gmm_report(cfg: RunConfig, args) -> None:
    out = Path(cfg.output_dir)
    train_m, test_m, meta = _load_matrices(out)
    train_s = scale(train_m, cfg.scaling.gmm)
    test_s = apply_scaling(test_m, train_s.scaling)
    full = np.vstack([train_s.X, test_s.X])
    pairs = full[:, [0, train_m.max_slots]]  # (e0, c0)
    if cfg.gmm.max_rows is not None and pairs.shape[0] > cfg.gmm.max_rows:
        rng = np.random.RandomState(cfg.seed)
        keep = np.sort(rng.choice(pairs.shape[0], cfg.gmm.max_rows, replace=False))
        pairs = pairs[keep]

    model = gmm_mod.fit_gmm(
        pairs, cfg.gmm.n_components, cfg.seed, cfg.gmm.tol, cfg.gmm.max_iter
    )
    clusters = gmm_mod.predict_cluster(model, pairs)

    analysis = out / "analysis"
    analysis.mkdir(parents=True, exist_ok=True)
    emit_plot_data("gmmscatter", (pairs, clusters), analysis / "gmm_scatter.csv")
    emit_plot_data("lltrace", model.log_likelihood_trace, analysis / "gmm_lltrace.csv")
    gmeta = {
        "n_components": model.n_components,
        "rows": int(pairs.shape[0]),
        "iterations": len(model.log_likelihood_trace) - 1,
        "final_log_likelihood": round(model.log_likelihood_trace[-1], 6),
        "n_reinits": model.n_reinits,
        "scaling": cfg.scaling.gmm,
        "seed": cfg.seed,
    }
    _write_json(analysis / "gmm_meta.json", gmeta)

    from .figures import render_gmm_scatter, render_lltrace

    figs = out / "figures"
    figs.mkdir(parents=True, exist_ok=True)
    render_gmm_scatter(pairs, clusters, figs / "gmm_scatter.png")
    render_lltrace(model.log_likelihood_trace, figs / "gmm_em.png")

    outputs = [
        analysis / "gmm_scatter.csv",
        analysis / "gmm_lltrace.csv",
        analysis / "gmm_meta.json",
        figs / "gmm_scatter.png",
        figs / "gmm_em.png",
    ]
    inputs = {
        "features_train": out / "features" / "train.bin",
        "features_test": out / "features" / "test.bin",
    }
    _write_manifest(out, "gmm-report", cfg, inputs, outputs)
    print(
        f"gmm-report: K={model.n_components}, {gmeta['iterations']} EM iterations, "
        f"final LL {gmeta['final_log_likelihood']:.2f}"
    )


def cmd_compare(cfg: RunConfig, args) -> None:
    out = Path(cfg.output_dir)
    _, _, meta = _load_matrices(out)
    results = []
    inputs = {
        "features_train": out / "features" / "train.bin",
        "features_test": out / "features" / "test.bin",
    }
    for name in COMPARE_ORDER:
        path = out / "eval" / f"{name}.json"
        if not path.exists():
            continue
        payload = json.loads(path.read_text(encoding="utf-8"))
        results.append(
            ModelResult(
                name=payload["name"],
                accuracy=payload["accuracy"],
                macro_f1=payload["macro_f1"],
                train_accuracy=payload["train_accuracy"],
                wall_time_seconds=payload["wall_time_seconds"],
                hyperparameters=payload["hyperparameters"],
            )
        )
        inputs[f"eval_{name}"] = path
    if not results:
        raise DataError("no evaluation results found; run `sentsel train` first")

    dataset_meta = {
        "rows": meta["rows"],
        "split_ratio": meta["split_ratio"],
        "seed": meta["seed"],
        "encoder_id": meta["encoder_id"],
    }
    report = EvalReport(results=tuple(results), dataset_meta=dataset_meta)
    rep_dir = out / "report"
    rep_dir.mkdir(parents=True, exist_ok=True)
    md_path = emit_report(report, rep_dir / "report.json")

    from .figures import render_comparison

    figs = out / "figures"
    figs.mkdir(parents=True, exist_ok=True)
    render_comparison(report, figs / "comparison.png")

    outputs = [rep_dir / "report.json", md_path, figs / "comparison.png"]
    _write_manifest(out, "compare", cfg, inputs, outputs)
    print(f"compare: {len(results)} models -> {rep_dir / 'report.md'}")


# ---------------------------------------------------------------- plumbing


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--seed", type=int, help="override config seed")
    common.add_argument("--pca-k", type=int, dest="pca_k",
                        help="project logistic features onto k components")
    common.add_argument("--kernel", choices=("linear", "poly", "rbf"),
                        help="SVM kernel")
    common.add_argument("--gamma", type=float, help="SVM kernel gamma")
    common.add_argument("--c", type=float, help="SVM soft-margin C")
    common.add_argument("--min-samples-leaf", type=int, dest="min_samples_leaf",
                        help="forest default-preset leaf size")
    common.add_argument("--n-estimators", type=int, dest="n_estimators",
                        help="forest default-preset / gbt round count")
    common.add_argument("--max-depth", type=int, dest="max_depth",
                        help="gbt tree depth")
    common.add_argument("--gmm-k", type=int, dest="gmm_k",
                        help="mixture component count")
    common.add_argument("--encoder-dim", type=int, dest="encoder_dim",
                        help="truncate word vectors to this many dimensions")
    common.add_argument("--limit-rows", type=int, dest="limit_rows",
                        help="cap the number of labeled examples at ingest")

    parser = _Parser(
        prog="sentsel",
        description="Answer-sentence selection pipeline over SQuAD-style data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="parse, label, and split")
    sub.add_parser("featurize", parents=[common], help="build feature matrices")
    p_train = sub.add_parser("train", parents=[common], help="fit models")
    p_train.add_argument("--model", choices=MODEL_NAMES + ("all",), default="all")
    p_eval = sub.add_parser("evaluate", parents=[common], help="score saved models")
    p_eval.add_argument("--model", choices=MODEL_NAMES + ("all",), default="all")
    p_eval.add_argument("--external", metavar="PATH",
                        help="score a qa_id,predicted_slot file instead")
    sub.add_parser("pca-report", parents=[common], help="eigen spectrum + variance")
    sub.add_parser("gmm-report", parents=[common], help="mixture clustering")
    sub.add_parser("compare", parents=[common], help="combined comparison report")
    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "featurize": cmd_featurize,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "pca-report": cmd_pca_report,
    "gmm-report": cmd_gmm_report,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config) if args.config else RunConfig().validate()
        cfg = apply_overrides(
            cfg,
            seed=args.seed,
            limit_rows=args.limit_rows,
            encoder_dim=args.encoder_dim,
            pca_k=args.pca_k,
            kernel=args.kernel,
            gamma=args.gamma,
            c=args.c,
            min_samples_leaf=args.min_samples_leaf,
            n_estimators=args.n_estimators,
            max_depth=args.max_depth,
            gmm_k=args.gmm_k,
        )
        COMMANDS[args.command](cfg, args)
        return 0
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except SentselError as exc:   # safety net for future subclasses
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
