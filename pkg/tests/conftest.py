"""Shared fixtures: the bundled mini corpus, parsed once per session."""

import numpy as np
import pytest

from sentsel.config import resolve_path
from sentsel.embed import IdfMeanEncoder, build_vocab_idf, load_word_vectors
from sentsel.features import build_feature_matrix, scale
from sentsel.ingest import build_dataset, parse_squad


@pytest.fixture(scope="session")
def mini_squad_path():
    return resolve_path("builtin:mini_squad.json")


@pytest.fixture(scope="session")
def mini_vectors_path():
    return resolve_path("builtin:mini_vectors.txt")


@pytest.fixture(scope="session")
def corpus(mini_squad_path):
    return parse_squad(mini_squad_path.read_bytes())


@pytest.fixture(scope="session")
def dataset(corpus):
    return build_dataset(corpus, max_slots=10, split_ratio=0.8, seed=13)


@pytest.fixture(scope="session")
def encoder(corpus, mini_vectors_path):
    table = load_word_vectors(str(mini_vectors_path))
    idf, default_idf = build_vocab_idf(corpus)
    return IdfMeanEncoder(table.with_idf(idf, default_idf))


@pytest.fixture(scope="session")
def raw_splits(dataset, encoder):
    """Unscaled train/test feature matrices off the mini corpus."""
    train_ex, test_ex = dataset
    train = build_feature_matrix(train_ex, encoder)
    pad = float(train.X[:, :10].max())
    test = build_feature_matrix(test_ex, encoder, pad_euclid=pad)
    return train, test


@pytest.fixture(scope="session")
def splits(raw_splits):
    """Z-scored train/test matrices (train statistics applied to both)."""
    from sentsel.features import apply_scaling

    train_raw, test_raw = raw_splits
    train = scale(train_raw, "zscore")
    test = apply_scaling(test_raw, train.scaling)
    return train, test


@pytest.fixture()
def rng():
    return np.random.RandomState(7)
