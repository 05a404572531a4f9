"""The command-line pipeline: artifacts, manifests, and exit codes."""

import hashlib
import json
import shutil

import numpy as np
import pytest

from sentsel.cli import main
from sentsel.classifiers import load_model, predict
from sentsel.config import RunConfig, apply_overrides, config_hash, resolve_path
from sentsel.features import read_features_bin


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Run every command once against the bundled mini corpus."""
    root = tmp_path_factory.mktemp("cli")
    out = root / "out"
    cfg_path = root / "cfg.json"
    cfg_path.write_text(json.dumps({
        "output_dir": str(out),
        "record_timings": False,
    }))
    common = ["--config", str(cfg_path)]
    for command in (["ingest"], ["featurize"], ["train", "--model", "all"],
                    ["evaluate"], ["pca-report"], ["gmm-report"], ["compare"]):
        assert main(command + common) == 0, f"{command} failed"
    return out, common, cfg_path


def test_dataset_artifacts(pipeline):
    out, _, _ = pipeline
    stats = json.loads((out / "dataset" / "stats.json").read_text())
    assert stats["articles"] == 8
    assert stats["questions"] == 200
    assert stats["skipped_records"] == 2
    assert stats["train_examples"] == 156
    assert stats["test_examples"] == 40
    train_lines = (out / "dataset" / "train.jsonl").read_text().splitlines()
    assert len(train_lines) == 156
    assert (out / "dataset" / "idf.json").exists()


def test_feature_artifacts(pipeline):
    out, _, _ = pipeline
    meta = json.loads((out / "features" / "meta.json").read_text())
    assert meta["encoder_id"] == "idf-mean-d50-v107"
    assert meta["rows"] == 196
    train = read_features_bin(str(out / "features" / "train.bin"))
    assert train.X.shape == (156, 20)
    header = (out / "features" / "train.csv").read_text().splitlines()[0]
    assert header.split(",")[:2] == ["e0", "e1"]
    assert header.split(",")[-1] == "label"


def test_model_artifacts_reload_and_predict(pipeline):
    out, _, _ = pipeline
    test = read_features_bin(str(out / "features" / "test.bin"))
    for name in ("logistic", "svm", "forest", "forest_overfit", "gbt"):
        blob = json.loads((out / "models" / f"{name}.json").read_text())
        assert blob["format_version"] == 1
        assert "payload" in blob and "preprocess" in blob
        model = load_model(out / "models" / f"{name}.json")
        # preprocess (scaling, maybe PCA) is applied by the harness; here we
        # only need the model to accept a matrix of the right width
        n_features = model.n_features
        preds = predict(model, np.zeros((3, n_features)))
        assert preds.shape == (3,)
        assert blob["preprocess"]["scaling"]["kind"] in ("minmax", "zscore")
    assert test.X.shape == (40, 20)


def test_learning_curve_artifact(pipeline):
    out, _, _ = pipeline
    lines = (out / "curves" / "logistic.csv").read_text().splitlines()
    assert lines[0] == "epoch,train_accuracy,test_accuracy,train_loss,test_loss"
    assert len(lines) == 301  # 300 epochs


def test_eval_artifacts(pipeline):
    out, _, _ = pipeline
    for name in ("logistic", "svm", "forest", "forest_overfit", "gbt"):
        blob = json.loads((out / "eval" / f"{name}.json").read_text())
        assert blob["name"] == name
        assert 0.0 <= blob["accuracy"] <= 1.0
        assert 0.0 <= blob["macro_f1"] <= 1.0
        assert blob["wall_time_seconds"] == 0.0  # record_timings off


def test_analysis_artifacts(pipeline):
    out, _, _ = pipeline
    eig = (out / "analysis" / "eigspectrum.csv").read_text().splitlines()
    assert eig[0] == "index,eigenvalue"
    assert len(eig) == 21  # header + 20 eigenvalues
    var = (out / "analysis" / "variance.csv").read_text().splitlines()
    assert float(var[-1].split(",")[1]) == 1.0
    scatter = (out / "analysis" / "gmm_scatter.csv").read_text().splitlines()
    assert scatter[0] == "euclid,cosine,cluster"
    assert len(scatter) == 197  # header + one row per example, both splits
    gmm_meta = json.loads((out / "analysis" / "gmm_meta.json").read_text())
    assert gmm_meta["n_components"] == 10


def test_figures_are_png(pipeline):
    out, _, _ = pipeline
    figures = sorted((out / "figures").glob("*.png"))
    names = {f.name for f in figures}
    assert {"comparison.png", "eigspectrum.png", "variance.png",
            "gmm_scatter.png", "gmm_em.png", "logistic_accuracy.png",
            "logistic_loss.png"} <= names
    for fig in figures:
        assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_compare_report(pipeline):
    out, _, _ = pipeline
    report = json.loads((out / "report" / "report.json").read_text())
    assert report["schema_version"] == 1
    assert set(report["models"]) == {"logistic", "svm", "forest",
                                     "forest_overfit", "gbt"}
    assert report["reference"]["bert_test_accuracy"]["source"] == "paper-reported"
    md = (out / "report" / "report.md").read_text()
    assert md.count("|") > 20


def test_manifests(pipeline):
    out, _, cfg_path = pipeline
    cfg = apply_overrides(
        RunConfig(output_dir=str(out), record_timings=False)
    )
    expected_hash = config_hash(cfg)
    # evaluate rewrites the eval/*.json files train produced, so digests are
    # checked last-writer-wins in pipeline order
    final = {}
    for name in ("ingest", "featurize", "train", "evaluate",
                 "pca-report", "gmm-report", "compare"):
        manifest = json.loads((out / "manifests" / f"{name}.json").read_text())
        assert manifest["command"] == name
        assert manifest["config_hash"] == expected_hash
        assert manifest["versions"]["package"]
        final.update(manifest["outputs"])
        for entry in manifest["inputs"].values():
            path = entry["path"]
            blob = open(path, "rb").read()
            assert hashlib.sha256(blob).hexdigest() == entry["sha256"]
    for rel, digest in final.items():
        blob = (out / rel).read_bytes()
        assert hashlib.sha256(blob).hexdigest() == digest, rel


def test_external_predictions_flow(pipeline, tmp_path):
    out, common, _ = pipeline
    ids = [json.loads(l)["qa_id"]
           for l in (out / "dataset" / "test.jsonl").read_text().splitlines()]
    ext = tmp_path / "ext.csv"
    ext.write_text("qa_id,predicted_slot\n" +
                   "".join(f"{i},0\n" for i in ids))
    assert main(["evaluate", "--external", str(ext)] + common) == 0
    blob = json.loads((out / "eval" / "external.json").read_text())
    assert blob["name"] == "external"

    # dropping one test id is a data error
    ext.write_text("qa_id,predicted_slot\n" +
                   "".join(f"{i},0\n" for i in ids[1:]))
    assert main(["evaluate", "--external", str(ext)] + common) == 2
    assert main(["evaluate", "--external", str(tmp_path / "nope.csv")] + common) == 2


def test_exit_code_config_errors(tmp_path):
    assert main(["train", "--model", "bogus"]) == 1
    bad_cfg = tmp_path / "bad.json"
    bad_cfg.write_text("{broken")
    assert main(["ingest", "--config", str(bad_cfg)]) == 1
    typo_cfg = tmp_path / "typo.json"
    typo_cfg.write_text(json.dumps({"outupt_dir": "x"}))
    assert main(["ingest", "--config", str(typo_cfg)]) == 1
    assert main(["gmm-report", "--gmm-k", "0", "--config",
                 str(_cfg(tmp_path))]) == 1


def test_exit_code_missing_upstream(tmp_path):
    cfg = _cfg(tmp_path)
    assert main(["featurize", "--config", str(cfg)]) == 2
    assert main(["train", "--config", str(cfg)]) == 2
    assert main(["evaluate", "--config", str(cfg)]) == 2
    assert main(["compare", "--config", str(cfg)]) == 2


def test_exit_code_missing_input_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "output_dir": str(tmp_path / "out"),
        "squad_json": str(tmp_path / "missing.json"),
    }))
    assert main(["ingest", "--config", str(cfg)]) == 2


def test_exit_code_numeric_failure(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "output_dir": str(tmp_path / "out"),
        "record_timings": False,
        "logistic": {"learning_rate": 1e200, "epochs": 5},
    }))
    common = ["--config", str(cfg)]
    assert main(["ingest"] + common) == 0
    assert main(["featurize"] + common) == 0
    assert main(["train", "--model", "logistic"] + common) == 3


def test_data_dir_env_var(tmp_path, monkeypatch):
    data_dir = tmp_path / "data"
    data_dir.mkdir()
    shutil.copy(resolve_path("builtin:mini_squad.json"), data_dir / "squad.json")
    shutil.copy(resolve_path("builtin:mini_vectors.txt"), data_dir / "vec.txt")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "output_dir": str(tmp_path / "out"),
        "squad_json": "squad.json",
        "word_vectors": "vec.txt",
    }))
    monkeypatch.setenv("SENTSEL_DATA_DIR", str(data_dir))
    assert main(["ingest", "--config", str(cfg)]) == 0
    stats = json.loads((tmp_path / "out" / "dataset" / "stats.json").read_text())
    assert stats["questions"] == 200


def test_flag_overrides_reach_the_run(tmp_path):
    cfg = _cfg(tmp_path)
    common = ["--config", str(cfg)]
    assert main(["ingest", "--limit-rows", "60"] + common) == 0
    stats = json.loads(
        (tmp_path / "out" / "dataset" / "stats.json").read_text()
    )
    assert stats["train_examples"] + stats["test_examples"] == 60


def _cfg(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "output_dir": str(tmp_path / "out"),
        "record_timings": False,
    }))
    return path
