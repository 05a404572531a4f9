"""Run configuration: defaults, JSON loading, flag overrides, hashing.

One JSON file configures a whole run; command-line flags override single
fields and the resolved result is hashed into every manifest. Unknown keys
are rejected so a typo cannot silently fall back to a default.

Paths may use the form "builtin:<name>" to refer to the bundled mini corpus
and word vectors under sentsel/data/.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

from .errors import ConfigError

SCALING_KINDS = ("minmax", "zscore")
MODEL_NAMES = ("logistic", "svm", "forest", "gbt")


@dataclass(frozen=True)
class ScalingConfig:
    classifier: str = "zscore"
    pca: str = "zscore"
    gmm: str = "minmax"

    def validate(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v not in SCALING_KINDS:
                raise ConfigError(
                    f"scaling.{f.name} must be one of {SCALING_KINDS}, got {v!r}"
                )


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = 0.5
    epochs: int = 300
    l2: float = 0.0001
    pca_k: int | None = None

    def validate(self):
        if self.learning_rate <= 0:
            raise ConfigError("logistic.learning_rate must be > 0")
        if self.epochs < 1:
            raise ConfigError("logistic.epochs must be >= 1")
        if self.l2 < 0:
            raise ConfigError("logistic.l2 must be >= 0")
        if self.pca_k is not None and self.pca_k < 1:
            raise ConfigError("logistic.pca_k must be >= 1 when set")


@dataclass(frozen=True)
class SvmConfig:
    kernel: str = "rbf"
    gamma: float = 0.1
    C: float = 1000.0
    degree: int = 3
    tol: float = 0.001
    max_train_rows: int = 20000  # SMO is quadratic; cap the rows it sees

    def validate(self):
        if self.kernel not in ("linear", "poly", "rbf"):
            raise ConfigError(f"svm.kernel must be linear|poly|rbf, got {self.kernel!r}")
        if self.gamma <= 0:
            raise ConfigError("svm.gamma must be > 0")
        if self.C <= 0:
            raise ConfigError("svm.C must be > 0")
        if self.degree < 1:
            raise ConfigError("svm.degree must be >= 1")
        if self.tol <= 0:
            raise ConfigError("svm.tol must be > 0")
        if self.max_train_rows < 1:
            raise ConfigError("svm.max_train_rows must be >= 1")


@dataclass(frozen=True)
class ForestPreset:
    n_estimators: int = 60
    min_samples_leaf: int = 8

    def validate(self, name: str):
        if self.n_estimators < 1:
            raise ConfigError(f"forest.{name}.n_estimators must be >= 1")
        if self.min_samples_leaf < 1:
            raise ConfigError(f"forest.{name}.min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class ForestConfig:
    # reference settings plus the deliberately overfitting pair
    default: ForestPreset = field(default_factory=ForestPreset)
    overfit: ForestPreset = field(
        default_factory=lambda: ForestPreset(n_estimators=5, min_samples_leaf=3)
    )

    def validate(self):
        self.default.validate("default")
        self.overfit.validate("overfit")


@dataclass(frozen=True)
class GbtConfig:
    n_estimators: int = 50
    learning_rate: float = 0.1
    max_depth: int = 4
    min_samples_leaf: int = 1

    def validate(self):
        if self.n_estimators < 1:
            raise ConfigError("gbt.n_estimators must be >= 1")
        if not (0 < self.learning_rate <= 1):
            raise ConfigError("gbt.learning_rate must be in (0, 1]")
        if self.max_depth < 0:
            raise ConfigError("gbt.max_depth must be >= 0")
        if self.min_samples_leaf < 1:
            raise ConfigError("gbt.min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class GmmConfig:
    n_components: int = 10
    tol: float = 1e-6
    max_iter: int = 200
    max_rows: int | None = None

    def validate(self):
        if self.n_components < 1:
            raise ConfigError("gmm.n_components must be >= 1")
        if self.tol <= 0:
            raise ConfigError("gmm.tol must be > 0")
        if self.max_iter < 1:
            raise ConfigError("gmm.max_iter must be >= 1")
        if self.max_rows is not None and self.max_rows < 1:
            raise ConfigError("gmm.max_rows must be >= 1 when set")


@dataclass(frozen=True)
class RunConfig:
    squad_json: str = "builtin:mini_squad.json"
    word_vectors: str = "builtin:mini_vectors.txt"
    output_dir: str = "sentsel-out"
    seed: int = 13
    max_slots: int = 10
    split_ratio: float = 0.8
    limit_rows: int | None = None     # cap labeled examples (smoke runs)
    encoder_dim: int | None = None    # truncate word vectors to leading dims
    vector_limit: int | None = None   # cap vocabulary size on load
    record_timings: bool = True       # false writes 0.0 wall times (byte-stable reports)
    scaling: ScalingConfig = field(default_factory=ScalingConfig)
    logistic: LogisticConfig = field(default_factory=LogisticConfig)
    svm: SvmConfig = field(default_factory=SvmConfig)
    forest: ForestConfig = field(default_factory=ForestConfig)
    gbt: GbtConfig = field(default_factory=GbtConfig)
    gmm: GmmConfig = field(default_factory=GmmConfig)

    def validate(self):
        if self.max_slots < 1:
            raise ConfigError("max_slots must be >= 1")
        if not (0.0 < self.split_ratio < 1.0):
            raise ConfigError("split_ratio must be in (0, 1)")
        if self.limit_rows is not None and self.limit_rows < 1:
            raise ConfigError("limit_rows must be >= 1 when set")
        if self.encoder_dim is not None and self.encoder_dim < 1:
            raise ConfigError("encoder_dim must be >= 1 when set")
        if self.vector_limit is not None and self.vector_limit < 1:
            raise ConfigError("vector_limit must be >= 1 when set")
        for section in (self.scaling, self.logistic, self.svm, self.forest,
                        self.gbt, self.gmm):
            section.validate()
        return self


_SECTIONS = {
    "scaling": ScalingConfig,
    "logistic": LogisticConfig,
    "svm": SvmConfig,
    "gbt": GbtConfig,
    "gmm": GmmConfig,
}


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be an object")
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")
    return cls(**data)


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    data = dict(data)
    kwargs = {}
    for name, cls in _SECTIONS.items():
        if name in data:
            kwargs[name] = _build(cls, data.pop(name), name)
    if "forest" in data:
        forest = dict(data.pop("forest"))
        presets = {}
        for preset in ("default", "overfit"):
            if preset in forest:
                presets[preset] = _build(
                    ForestPreset, forest.pop(preset), f"forest.{preset}"
                )
        if forest:
            raise ConfigError(f"unknown forest keys: {sorted(forest)}")
        kwargs["forest"] = ForestConfig(**presets)
    allowed = {f.name for f in fields(RunConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = RunConfig(**kwargs, **data)
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    return cfg.validate()


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def apply_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """Apply CLI flag values (None means the flag was not given)."""
    simple = {
        k: v
        for k, v in overrides.items()
        if k in ("seed", "limit_rows", "encoder_dim") and v is not None
    }
    if simple:
        cfg = replace(cfg, **simple)
    if overrides.get("pca_k") is not None:
        cfg = replace(cfg, logistic=replace(cfg.logistic, pca_k=overrides["pca_k"]))
    if overrides.get("kernel") is not None:
        cfg = replace(cfg, svm=replace(cfg.svm, kernel=overrides["kernel"]))
    if overrides.get("gamma") is not None:
        cfg = replace(cfg, svm=replace(cfg.svm, gamma=overrides["gamma"]))
    if overrides.get("c") is not None:
        cfg = replace(cfg, svm=replace(cfg.svm, C=overrides["c"]))
    if overrides.get("min_samples_leaf") is not None:
        preset = replace(
            cfg.forest.default, min_samples_leaf=overrides["min_samples_leaf"]
        )
        cfg = replace(cfg, forest=replace(cfg.forest, default=preset))
    if overrides.get("n_estimators") is not None:
        preset = replace(cfg.forest.default, n_estimators=overrides["n_estimators"])
        cfg = replace(
            cfg,
            forest=replace(cfg.forest, default=preset),
            gbt=replace(cfg.gbt, n_estimators=overrides["n_estimators"]),
        )
    if overrides.get("max_depth") is not None:
        cfg = replace(cfg, gbt=replace(cfg.gbt, max_depth=overrides["max_depth"]))
    if overrides.get("gmm_k") is not None:
        cfg = replace(cfg, gmm=replace(cfg.gmm, n_components=overrides["gmm_k"]))
    return cfg.validate()


def config_to_dict(cfg: RunConfig) -> dict:
    return asdict(cfg)


def config_hash(cfg: RunConfig) -> str:
    payload = json.dumps(config_to_dict(cfg), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def resolve_path(spec: str, data_dir: str | None = None) -> Path:
    """Turn a config path into a real file path.

    builtin:<name> maps into the packaged data directory; relative paths
    resolve against data_dir (the SENTSEL_DATA_DIR env var) when given.
    """
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        return Path(str(resources.files("sentsel").joinpath("data", name)))
    p = Path(spec)
    if not p.is_absolute() and data_dir:
        return Path(data_dir) / p
    return p
