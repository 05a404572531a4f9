"""Regenerate the bundled mini corpus and word vectors.

Emits src/sentsel/data/mini_squad.json (~200 questions in SQuAD v1.1 schema,
permissively constructed English) and mini_vectors.txt (50-dim unit vectors
for the corpus vocabulary, a few percent deliberately left out-of-vocabulary).
Deterministic: rerunning writes identical bytes.

Questions share content words with exactly one sentence of their paragraph,
so distance features carry real signal; a few paragraphs run past 10
sentences to exercise the slot-overflow drop path, and a couple of records
are malformed on purpose to exercise skip counting.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "src" / "sentsel" / "data"

ADJECTIVES = [
    "ancient", "restored", "timber", "copper", "granite", "whitewashed",
    "abandoned", "fortified", "painted", "narrow", "broad", "sunken",
    "northern", "southern", "eastern", "western", "crooked", "terraced",
]
NOUNS = [
    "harbor", "lantern", "orchard", "meadow", "falcon", "turbine",
    "archive", "garrison", "chapel", "foundry", "quarry", "reservoir",
    "observatory", "drydock", "tannery", "windmill", "aqueduct", "granary",
    "bakery", "sawmill", "lighthouse", "armory", "cloister", "viaduct",
    "cistern", "stable", "wharf", "kiln", "belfry", "gatehouse",
    "smithy", "brewery", "mill", "tower", "vault", "causeway",
]
VERBS = [
    "supplied", "guarded", "overlooked", "housed", "powered", "stored",
    "measured", "mapped", "linked", "repaired", "founded", "expanded",
    "flooded", "surveyed", "sheltered", "rebuilt",
]
PLACES = [
    "ridge", "valley", "coast", "plaza", "district", "island",
    "canal", "terrace", "summit", "crossing", "estuary", "headland",
    "lowland", "basin",
]
TITLES = [
    "Arlenport", "Vostram Hills", "Quellmarsh", "Darrow Bank",
    "Severn Hollow", "Calder Reach", "Ostergate", "Mirefield",
]
YEARS = ["1802", "1817", "1834", "1849", "1861", "1872", "1888", "1895"]

# sentence index targeted by each of the five questions, per paragraph shape
LONG_TARGETS = [7, 9, 10, 11, 2]     # slots 10 and 11 must be dropped downstream
SHORT_TARGET_POOL = list(range(9))


def build_paragraph(rng, n_sentences, article_idx, para_idx):
    adjs = list(rng.choice(ADJECTIVES, size=n_sentences, replace=False))
    verbs = list(rng.choice(VERBS, size=n_sentences, replace=False))
    places = list(rng.choice(PLACES, size=min(n_sentences, len(PLACES)), replace=False))
    noun_pool = list(rng.choice(NOUNS, size=2 * n_sentences, replace=False))

    sentences = []
    parts = []
    for i in range(n_sentences):
        adj = adjs[i]
        noun = noun_pool[2 * i]
        noun2 = noun_pool[2 * i + 1]
        verb = verbs[i]
        place = places[i % len(places)]
        if i == 0 and para_idx % 3 == 0:
            text = (
                f"Dr. Maren wrote that the {adj} {noun} {verb} "
                f"the {noun2} near the {place}."
            )
        elif i % 4 == 3:
            year = YEARS[(article_idx + i) % len(YEARS)]
            text = f"In {year}, the {adj} {noun} {verb} the {noun2} near the {place}."
        else:
            text = f"The {adj} {noun} {verb} the {noun2} near the {place}."
        sentences.append(text)
        parts.append({"adj": adj, "noun": noun, "noun2": noun2,
                      "verb": verb, "place": place})
    return " ".join(sentences), sentences, parts


def sentence_start(sentences, idx):
    # contexts join sentences with single spaces
    return sum(len(s) + 1 for s in sentences[:idx])


def build_qas(rng, context, sentences, parts, targets, qa_prefix):
    qas = []
    for qi, t in enumerate(targets):
        p = parts[t]
        start = sentence_start(sentences, t)
        if qi % 2 == 0:
            question = f"What {p['verb']} the {p['noun2']} near the {p['place']}?"
            answer_text = f"{p['adj']} {p['noun']}"
        else:
            question = f"Where did the {p['adj']} {p['noun']} {p['verb']} the {p['noun2']}?"
            answer_text = p["place"]
        answer_start = context.index(answer_text, start)
        assert answer_start < start + len(sentences[t])
        answers = [{"text": answer_text, "answer_start": answer_start}]
        if qi == 4 and t >= 2:
            # second answer points elsewhere; downstream must use the first
            alt = parts[0]["place"]
            answers.append(
                {"text": alt, "answer_start": context.index(alt, sentence_start(sentences, 0))}
            )
        qas.append({
            "question": question,
            "id": f"{qa_prefix}-{qi}",
            "answers": answers,
        })
    return qas


def build_corpus():
    rng = np.random.RandomState(20240817)
    articles = []
    for ai, title in enumerate(TITLES):
        paragraphs = []
        for pi in range(5):
            long_para = ai == 0 and pi < 2
            n_sent = 12 if long_para else int(rng.randint(3, 10))
            context, sentences, parts = build_paragraph(rng, n_sent, ai, pi)
            if long_para:
                targets = LONG_TARGETS
            else:
                pool = [t for t in SHORT_TARGET_POOL if t < n_sent]
                targets = [int(pool[int(rng.randint(len(pool)))]) for _ in range(5)]
            qas = build_qas(rng, context, sentences, parts, targets, f"mini-{ai}-{pi}")
            paragraphs.append({"context": context, "qas": qas})
        articles.append({"title": title, "paragraphs": paragraphs})

    # two deliberately unusable records: empty answers, answer_start past the end
    p0 = articles[0]["paragraphs"][0]
    p0["qas"].append({"question": "Which record has no answer?",
                      "id": "mini-broken-0", "answers": []})
    p0["qas"].append({
        "question": "Which record points past the context?",
        "id": "mini-broken-1",
        "answers": [{"text": "nowhere", "answer_start": len(p0["context"]) + 40}],
    })
    return {"data": articles}


def build_vectors(corpus):
    sys.path.insert(0, str(ROOT / "src"))
    from sentsel.embed import tokenize

    vocab = set()
    for article in corpus["data"]:
        for para in article["paragraphs"]:
            vocab.update(tokenize(para["context"]))
            for qa in para["qas"]:
                vocab.update(tokenize(qa["question"]))
    vocab = sorted(vocab)

    rng = np.random.RandomState(7)
    dropped = set(
        np.array(vocab)[rng.choice(len(vocab), size=max(2, len(vocab) // 33),
                                   replace=False)]
    )
    # filler words stay in-vocabulary so no sentence encodes to zero
    dropped -= {"the", "a", "in", "near", "what", "where", "did", "that", "dr"}

    lines = []
    for word in vocab:
        if word in dropped:
            continue
        v = rng.normal(0.0, 1.0, size=50)
        v /= np.linalg.norm(v)
        lines.append(word + " " + " ".join(f"{x:.6f}" for x in v))
    return "\n".join(lines) + "\n", sorted(dropped)


def main():
    corpus = build_corpus()
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "mini_squad.json").write_text(
        json.dumps(corpus, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )
    vec_text, dropped = build_vectors(corpus)
    (DATA / "mini_vectors.txt").write_text(vec_text, encoding="utf-8")

    n_q = sum(len(p["qas"]) for a in corpus["data"] for p in a["paragraphs"])
    print(f"wrote {DATA / 'mini_squad.json'} ({n_q} questions)")
    print(f"wrote {DATA / 'mini_vectors.txt'} (dropped {len(dropped)} words: {dropped})")


if __name__ == "__main__":
    main()
