"""Answer-sentence selection over SQuAD-style corpora.

Pipeline: parse a SQuAD JSON file into sentence-segmented paragraphs, encode
questions and sentences with IDF-weighted word vectors, turn each question
into a 20-column row of Euclidean/cosine distances against its paragraph's
sentence slots, then train and compare from-scratch classifiers (softmax
regression, SMO-trained SVM, random forest, gradient boosting) plus PCA and
GMM analyses of the feature space.
"""

__version__ = "1.0.0"

from .errors import (
    ConfigError,
    DataError,
    FormatError,
    NumericError,
    ParseError,
    SchemaError,
    SentselError,
)

__all__ = [
    "__version__",
    "SentselError",
    "ConfigError",
    "DataError",
    "ParseError",
    "SchemaError",
    "FormatError",
    "NumericError",
]
