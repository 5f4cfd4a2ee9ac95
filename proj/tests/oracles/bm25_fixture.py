"""Reference BM-25 scores for the five-document fixture in test_lexical_index.cpp.

Run: python3 tests/oracles/bm25_fixture.py
"""
import math
import re

DOCS = {
    "d1": "The wreck of the USS Indianapolis was found in 2017.",
    "d2": "Paul Allen funded the expedition that found the wreck.",
    "d3": "Indianapolis is the capital of Indiana.",
    "d4": "The ship sank in 1945 after a torpedo attack; the ship was lost.",
    "d5": "A research vessel surveyed the Philippine Sea.",
}
QUERIES = ["wreck of the ship Indianapolis", "Paul Allen wreck", "capital"]


def tokens(text):
    return re.findall(r"\w+", text.lower())


def rank(query, k1, b):
    toks = {d: tokens(t) for d, t in DOCS.items()}
    n = len(toks)
    avg = sum(len(t) for t in toks.values()) / n
    terms = list(dict.fromkeys(tokens(query)))
    scores = {}
    for d, words in toks.items():
        s, hit = 0.0, False
        for term in terms:
            tf = words.count(term)
            if not tf:
                continue
            hit = True
            df = sum(term in w for w in toks.values())
            idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
            s += tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(words) / avg)) * idf
        if hit:
            scores[d] = s
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


for k1, b in [(0.6, 0.5), (0.9, 0.9)]:
    for q in QUERIES:
        print(f"k1={k1} b={b} {q!r}: " + ", ".join(f"{d}={s:.12f}" for d, s in rank(q, k1, b)))
