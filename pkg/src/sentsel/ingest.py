"""SQuAD v1.1 parsing, sentence segmentation, and dataset construction.

Turns raw SQuAD JSON into a Corpus whose paragraphs carry sentence spans,
then into per-question labeled examples (candidate sentences plus the index
of the sentence containing the answer). Bad records are skipped and counted,
never fatal.
"""

from __future__ import annotations

import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, ParseError, SchemaError

log = logging.getLogger(__name__)

SENTENCE_TERMINATORS = ".!?"
OPENING_QUOTES = "\"'“‘"

# Fixed suppression list for the deterministic splitter. Tokens are compared
# lowercased; entries with internal periods match tokens like "e.g".
ABBREVIATIONS = frozenset({
    "dr", "mr", "mrs", "ms", "st", "prof", "jr", "sr",
    "etc", "e.g", "i.e", "vs", "fig",
})


@dataclass(frozen=True)
class SentenceSpan:
    text: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Answer:
    text: str
    answer_start: int


@dataclass(frozen=True)
class QA:
    id: str
    question: str
    answers: tuple[Answer, ...]


@dataclass(frozen=True)
class Paragraph:
    context: str
    sentences: tuple[SentenceSpan, ...]
    qas: tuple[QA, ...]


@dataclass(frozen=True)
class Article:
    title: str
    paragraphs: tuple[Paragraph, ...]


@dataclass(frozen=True)
class ParseStats:
    articles: int
    paragraphs: int
    questions: int
    skipped_records: int


@dataclass(frozen=True)
class Corpus:
    articles: tuple[Article, ...]
    stats: ParseStats = field(compare=False, default=ParseStats(0, 0, 0, 0))

    def iter_paragraphs(self):
        for article in self.articles:
            yield from article.paragraphs


@dataclass(frozen=True)
class LabeledExample:
    qa_id: str
    question: str
    sentence_texts: tuple[str, ...]
    gold_slot: int


def _is_sentence_boundary(context: str, pos: int) -> bool:
    """Boundary rule: terminator, then whitespace, then an uppercase letter,
    digit, or opening quote. Periods additionally pass the abbreviation check."""
    n = len(context)
    if pos + 1 >= n or not context[pos + 1].isspace():
        return False
    j = pos + 1
    while j < n and context[j].isspace():
        j += 1
    if j >= n:
        return False
    nxt = context[j]
    if not (nxt.isupper() or nxt.isdigit() or nxt in OPENING_QUOTES):
        return False
    if context[pos] == ".":
        k = pos
        while k > 0 and (context[k - 1].isalpha() or context[k - 1] == "."):
            k -= 1
        token = context[k:pos].strip(".")
        if token:
            if token.lower() in ABBREVIATIONS:
                return False
            last = token.split(".")[-1]
            if len(last) == 1 and last.isupper():
                return False
    return True


def split_sentences(context: str) -> list[SentenceSpan]:
    """Split a paragraph into sentence spans under the documented rule.

    Spans exclude surrounding whitespace, include their terminator, are
    ordered, and tile the context except for inter-sentence whitespace.
    Empty or whitespace-only input yields no spans.
    """
    n = len(context)
    spans: list[SentenceSpan] = []
    start = 0
    while start < n and context[start].isspace():
        start += 1
    if start == n:
        return spans

    for pos in range(start, n):
        if context[pos] in SENTENCE_TERMINATORS and _is_sentence_boundary(context, pos):
            spans.append(SentenceSpan(context[start:pos + 1], start, pos + 1))
            start = pos + 1
            while start < n and context[start].isspace():
                start += 1

    if start < n:
        end = n
        while end > start and context[end - 1].isspace():
            end -= 1
        spans.append(SentenceSpan(context[start:end], start, end))
    return spans


def label_answer_sentence(paragraph: Paragraph, answer_start: int) -> int:
    """Index of the sentence whose span contains answer_start.

    Starts falling in inter-sentence whitespace are assigned to the following
    sentence; a start beyond the last span is a record-level error.
    """
    if not (0 <= answer_start < len(paragraph.context)):
        raise DataError(
            f"answer_start {answer_start} outside context of length {len(paragraph.context)}")
    if not paragraph.sentences:
        raise DataError("paragraph has no sentences")
    for idx, span in enumerate(paragraph.sentences):
        if answer_start < span.char_end:
            return idx
    raise DataError(
        f"answer_start {answer_start} beyond last sentence span "
        f"(ends at {paragraph.sentences[-1].char_end})")


def _require(mapping, key: str, path: str):
    if not isinstance(mapping, dict) or key not in mapping:
        raise SchemaError(f"missing required key at {path}.{key}", path=f"{path}.{key}")
    return mapping[key]


def parse_squad(raw: bytes | str) -> Corpus:
    """Parse a SQuAD v1.1 JSON payload into a Corpus.

    Record-level problems (an answer_start outside its context, an empty
    answer list) skip that QA and are counted in the returned stats;
    structural problems raise ParseError/SchemaError.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}", offset=exc.start) from exc
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at byte offset {exc.pos}: {exc.msg}",
                         offset=exc.pos) from exc

    data = _require(payload, "data", "$")
    if not isinstance(data, list):
        raise SchemaError("$.data must be a list", path="$.data")

    articles: list[Article] = []
    n_paragraphs = 0
    n_questions = 0
    skipped = 0
    for ai, raw_article in enumerate(data):
        apath = f"$.data[{ai}]"
        title = _require(raw_article, "title", apath)
        raw_paragraphs = _require(raw_article, "paragraphs", apath)
        paragraphs: list[Paragraph] = []
        for pi, raw_para in enumerate(raw_paragraphs):
            ppath = f"{apath}.paragraphs[{pi}]"
            context = _require(raw_para, "context", ppath)
            raw_qas = _require(raw_para, "qas", ppath)
            sentences = tuple(split_sentences(context))
            qas: list[QA] = []
            for qi, raw_qa in enumerate(raw_qas):
                qpath = f"{ppath}.qas[{qi}]"
                qa_id = _require(raw_qa, "id", qpath)
                question = _require(raw_qa, "question", qpath)
                raw_answers = _require(raw_qa, "answers", qpath)
                answers = []
                ok = True
                if not raw_answers:
                    ok = False
                for xi, raw_ans in enumerate(raw_answers):
                    xpath = f"{qpath}.answers[{xi}]"
                    text = _require(raw_ans, "text", xpath)
                    start = _require(raw_ans, "answer_start", xpath)
                    if not isinstance(start, int) or not (0 <= start < len(context)):
                        ok = False
                        break
                    answers.append(Answer(text, start))
                if not ok:
                    skipped += 1
                    log.debug("skipping record %s: unusable answers", qa_id)
                    continue
                qas.append(QA(str(qa_id), question, tuple(answers)))
                n_questions += 1
            paragraphs.append(Paragraph(context, sentences, tuple(qas)))
            n_paragraphs += 1
        articles.append(Article(title, tuple(paragraphs)))

    stats = ParseStats(len(articles), n_paragraphs, n_questions, skipped)
    log.info("parsed corpus: %d articles, %d paragraphs, %d questions, %d skipped",
             stats.articles, stats.paragraphs, stats.questions, stats.skipped_records)
    return Corpus(tuple(articles), stats)


def corpus_to_json(corpus: Corpus) -> str:
    """Serialize a Corpus back to the SQuAD v1.1 schema (sorted keys)."""
    data = [{
        "title": article.title,
        "paragraphs": [{
            "context": para.context,
            "qas": [{
                "id": qa.id,
                "question": qa.question,
                "answers": [{"text": a.text, "answer_start": a.answer_start}
                            for a in qa.answers],
            } for qa in para.qas],
        } for para in article.paragraphs],
    } for article in corpus.articles]
    return json.dumps({"data": data}, ensure_ascii=False, sort_keys=True)


def build_dataset(corpus: Corpus, max_slots: int = 10, split_ratio: float = 0.8,
                  seed: int = 0) -> tuple[list[LabeledExample], list[LabeledExample]]:
    """Build labeled examples and split them into train/test.

    Uses the first answer of each QA. Examples whose gold sentence index is
    at or beyond max_slots, or whose answer cannot be located, are dropped
    and counted. The split is a seeded shuffle followed by a partition at
    floor(split_ratio * N), so identical (corpus, seed) give identical splits.
    """
    if max_slots < 1:
        raise ConfigError(f"max_slots must be >= 1, got {max_slots}")
    if not (0.0 < split_ratio < 1.0):
        raise ConfigError(f"split_ratio must be in (0, 1), got {split_ratio}")
    if not corpus.articles:
        raise DataError("empty corpus")

    examples: list[LabeledExample] = []
    dropped_overflow = 0
    dropped_bad = 0
    for paragraph in corpus.iter_paragraphs():
        for qa in paragraph.qas:
            try:
                gold = label_answer_sentence(paragraph, qa.answers[0].answer_start)
            except DataError:
                dropped_bad += 1
                continue
            if gold >= max_slots:
                dropped_overflow += 1
                continue
            texts = tuple(s.text for s in paragraph.sentences[:max_slots])
            examples.append(LabeledExample(qa.id, qa.question, texts, gold))

    if not examples:
        raise DataError("corpus produced no usable examples")
    log.info("dataset: %d retained, %d dropped (slot >= %d), %d dropped (bad answer)",
             len(examples), dropped_overflow, max_slots, dropped_bad)

    order = np.random.RandomState(seed).permutation(len(examples))
    n_train = int(split_ratio * len(examples))
    train = [examples[i] for i in order[:n_train]]
    test = [examples[i] for i in order[n_train:]]
    return train, test


def write_examples_jsonl(examples: list[LabeledExample], fp: io.TextIOBase) -> None:
    """One LabeledExample per line, sorted keys, for the corpus cache."""
    for ex in examples:
        fp.write(json.dumps({
            "qa_id": ex.qa_id,
            "question": ex.question,
            "sentence_texts": list(ex.sentence_texts),
            "gold_slot": ex.gold_slot,
        }, ensure_ascii=False, sort_keys=True))
        fp.write("\n")


def read_examples_jsonl(fp: io.TextIOBase) -> list[LabeledExample]:
    examples = []
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            examples.append(LabeledExample(
                rec["qa_id"], rec["question"],
                tuple(rec["sentence_texts"]), int(rec["gold_slot"])))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad example record on line {lineno}: {exc}") from exc
    return examples
