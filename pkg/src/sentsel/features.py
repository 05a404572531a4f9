"""Distance features: question-to-sentence Euclidean and cosine columns.

Each labeled example becomes one row of 2*max_slots values (Euclidean block
then cosine block). Slots past the paragraph's sentence count hold sentinels
chosen so a padded slot can never win an argmax: the observed maximum
distance and cosine -1.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .embed import Encoder
from .errors import DataError, FormatError
from .ingest import LabeledExample

PAD_COSINE = -1.0


def euclidean(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"length mismatch: {u.shape} vs {v.shape}")
    return float(np.linalg.norm(u - v))


def cosine(u, v) -> float:
    """Cosine similarity with the zero-vector convention: either norm 0 -> 0."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


@dataclass(frozen=True)
class FeatureRow:
    euclid: np.ndarray
    cosine: np.ndarray
    gold_slot: int
    valid_slots: int

    def flat(self) -> np.ndarray:
        return np.concatenate([self.euclid, self.cosine])


@dataclass(frozen=True)
class ScalingParams:
    kind: str                 # "minmax" | "zscore"
    center: np.ndarray        # per-column min (minmax) or mean (zscore)
    spread: np.ndarray        # per-column max-min or population std; 0 marks a constant column

    def transform(self, X: np.ndarray) -> np.ndarray:
        spread = np.where(self.spread == 0.0, 1.0, self.spread)
        out = (X - self.center) / spread
        out[:, self.spread == 0.0] = 0.0
        return out

    def inverse(self, X: np.ndarray) -> np.ndarray:
        spread = np.where(self.spread == 0.0, 1.0, self.spread)
        out = X * spread + self.center
        # constant columns scaled to 0 recover their single value
        out[:, self.spread == 0.0] = self.center[self.spread == 0.0]
        return out


@dataclass(frozen=True)
class FeatureMatrix:
    X: np.ndarray             # N x (2 * max_slots), float64
    labels: np.ndarray        # N, int64
    max_slots: int
    scaling: ScalingParams | None = None

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_cols(self) -> int:
        return self.X.shape[1]


def feature_names(max_slots: int) -> list[str]:
    return [f"e{i}" for i in range(max_slots)] + [f"c{i}" for i in range(max_slots)]


def featurize_example(example: LabeledExample, encoder: Encoder, max_slots: int = 10,
                      pad_euclid: float | None = None) -> FeatureRow:
    """Distances between the question vector and each sentence-slot vector.

    Padding slots get cosine -1 and, for the Euclidean block, `pad_euclid`;
    when that is None the row's own maximum valid distance is used. The
    dataset-level builder passes the corpus maximum instead.
    """
    from .embed import tokenize

    q = encoder.encode(tokenize(example.question)).values
    valid = min(len(example.sentence_texts), max_slots)
    euclid = np.zeros(max_slots)
    cos = np.full(max_slots, PAD_COSINE)
    for i in range(valid):
        s = encoder.encode(tokenize(example.sentence_texts[i])).values
        euclid[i] = euclidean(q, s)
        cos[i] = cosine(q, s)
    pad = pad_euclid if pad_euclid is not None else (euclid[:valid].max() if valid else 0.0)
    euclid[valid:] = pad
    return FeatureRow(euclid, cos, example.gold_slot, valid)


def build_feature_matrix(examples: list[LabeledExample], encoder: Encoder,
                         max_slots: int = 10,
                         pad_euclid: float | None = None) -> FeatureMatrix:
    """Featurize every example, then fill Euclidean padding with the corpus max.

    Two passes: distances first, then the observed maximum over all valid
    slots becomes the sentinel for every padded slot. Passing pad_euclid
    overrides the observed maximum, which lets a test split reuse the train
    sentinel.
    """
    if not examples:
        raise DataError("no examples to featurize")
    rows = [featurize_example(ex, encoder, max_slots, pad_euclid=0.0) for ex in examples]
    corpus_max = max((r.euclid[:r.valid_slots].max() for r in rows if r.valid_slots),
                     default=0.0)
    if pad_euclid is not None:
        corpus_max = pad_euclid
    X = np.zeros((len(rows), 2 * max_slots))
    labels = np.zeros(len(rows), dtype=np.int64)
    for i, row in enumerate(rows):
        euclid = row.euclid.copy()
        euclid[row.valid_slots:] = corpus_max
        X[i, :max_slots] = euclid
        X[i, max_slots:] = row.cosine
        labels[i] = row.gold_slot
    return FeatureMatrix(X, labels, max_slots)


def scale(matrix: FeatureMatrix, kind: str) -> FeatureMatrix:
    """Fit per-column scaling on this matrix and apply it.

    minmax maps each column to [0, 1]; zscore centers to mean 0 and population
    std 1. Constant columns map to 0 under both. The fitted ScalingParams ride
    along so test data can be transformed with train statistics.
    """
    if matrix.n_rows < 2:
        raise DataError(f"scaling needs at least 2 rows, got {matrix.n_rows}")
    if kind == "minmax":
        center = matrix.X.min(axis=0)
        spread = matrix.X.max(axis=0) - center
    elif kind == "zscore":
        center = matrix.X.mean(axis=0)
        spread = matrix.X.std(axis=0)
    else:
        raise DataError(f"unknown scaling kind: {kind!r}")
    params = ScalingParams(kind, center, spread)
    return replace(matrix, X=params.transform(matrix.X), scaling=params)


def apply_scaling(matrix: FeatureMatrix, params: ScalingParams) -> FeatureMatrix:
    """Transform with previously fitted statistics (train stats on test data)."""
    return replace(matrix, X=params.transform(matrix.X), scaling=params)


def unscale(matrix: FeatureMatrix) -> FeatureMatrix:
    if matrix.scaling is None:
        raise DataError("matrix carries no scaling parameters")
    return replace(matrix, X=matrix.scaling.inverse(matrix.X), scaling=None)


def write_features_csv(matrix: FeatureMatrix, path: str) -> None:
    """Header e0..e{m-1},c0..c{m-1},label; full-precision floats via repr."""
    names = feature_names(matrix.max_slots)
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(",".join(names + ["label"]) + "\n")
        for i in range(matrix.n_rows):
            vals = [repr(float(v)) for v in matrix.X[i]]
            fp.write(",".join(vals + [str(int(matrix.labels[i]))]) + "\n")


def read_features_csv(path: str) -> FeatureMatrix:
    with open(path, "r", encoding="utf-8") as fp:
        header = fp.readline().strip().split(",")
        if not header or header[-1] != "label" or (len(header) - 1) % 2 != 0:
            raise FormatError(f"bad feature CSV header in {path}", line=1)
        max_slots = (len(header) - 1) // 2
        if header[:-1] != feature_names(max_slots):
            raise FormatError(f"bad feature CSV header in {path}", line=1)
        X_rows, labels = [], []
        for lineno, line in enumerate(fp, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != len(header):
                raise FormatError(f"line {lineno}: expected {len(header)} fields",
                                  line=lineno)
            try:
                X_rows.append([float(v) for v in parts[:-1]])
                labels.append(int(parts[-1]))
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}", line=lineno) from exc
    if not X_rows:
        raise FormatError(f"no feature rows in {path}")
    return FeatureMatrix(np.array(X_rows), np.array(labels, dtype=np.int64), max_slots)


_BIN_MAGIC = b"SFM"
_BIN_VERSION = 1


def write_features_bin(matrix: FeatureMatrix, path: str) -> None:
    """Compact cache: magic, version byte, dims, float64 rows, int64 labels."""
    with open(path, "wb") as fp:
        fp.write(_BIN_MAGIC)
        fp.write(struct.pack("<BQQ", _BIN_VERSION, matrix.n_rows, matrix.max_slots))
        fp.write(np.ascontiguousarray(matrix.X, dtype=np.float64).tobytes())
        fp.write(np.ascontiguousarray(matrix.labels, dtype=np.int64).tobytes())


def read_features_bin(path: str) -> FeatureMatrix:
    with open(path, "rb") as fp:
        blob = fp.read()
    if blob[:3] != _BIN_MAGIC:
        raise FormatError(f"{path}: not a feature cache")
    version, n, max_slots = struct.unpack_from("<BQQ", blob, 3)
    if version != _BIN_VERSION:
        raise FormatError(f"{path}: unsupported cache version {version}")
    off = 3 + struct.calcsize("<BQQ")
    cols = 2 * max_slots
    X = np.frombuffer(blob, dtype=np.float64, count=n * cols, offset=off).reshape(n, cols)
    off += n * cols * 8
    labels = np.frombuffer(blob, dtype=np.int64, count=n, offset=off)
    return FeatureMatrix(X.copy(), labels.copy(), max_slots)
