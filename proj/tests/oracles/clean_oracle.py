#!/usr/bin/env python3
"""Independent reference for the three cleaning pipelines.

Regenerates the golden token files from tests/golden/cleaning_corpus.jsonl:

    python3 tests/oracles/clean_oracle.py

Written directly from the rule descriptions with Python regular
expressions; it shares no code with the C++ implementation.
"""
import json
import pathlib
import re

ROOT = pathlib.Path(__file__).resolve().parents[2]
GOLDEN = ROOT / "tests" / "golden"
DATA = ROOT / "data"

WS = " \t\n\r\f\v"
URL_SCHEME = re.compile(r"[a-z][a-z0-9+.\-]*://[^ \t\n\r\f\v]*")
URL_WWW = re.compile(r"(?<![^ \t\n\r\f\v])www\.[^ \t\n\r\f\v]*")
MENTION = re.compile(r"@[a-z0-9_]+")
EMOJI = re.compile(
    "[\U0001F600-\U0001F64F\U0001F300-\U0001F5FF\U0001F680-\U0001F6FF"
    "\U0001F900-\U0001F9FF☀-⛿✀-➿]"
)
NON_ALPHA = re.compile(r"[^a-z]")


def read_words(path):
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return words


def ascii_lower(s):
    return "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in s)


def tail(s, stopwords):
    return [t for t in NON_ALPHA.sub(" ", s).split() if len(t) >= 2 and t not in stopwords]


def clean_common(text, stopwords):
    return tail(ascii_lower(text), stopwords)


def clean_human(text, stopwords):
    s = ascii_lower(text)
    s = URL_SCHEME.sub("", s)
    s = URL_WWW.sub("", s)
    s = MENTION.sub("", s)
    s = EMOJI.sub("", s)
    return tail(s, stopwords)


def clean_llm(text, stopwords, neutral):
    return [t for t in clean_human(text, stopwords) if t not in neutral]


def dump(rows, origin, path):
    with open(path, "w", encoding="utf-8") as f:
        for doc_id, tokens in rows:
            obj = {"id": doc_id, "origin": origin, "tokens": tokens}
            f.write(json.dumps(obj, separators=(",", ":"), sort_keys=True, ensure_ascii=False) + "\n")


def main():
    stopwords = read_words(DATA / "stopwords_en.txt")
    neutral = read_words(DATA / "neutral_llm.txt")
    docs = [json.loads(l) for l in (GOLDEN / "cleaning_corpus.jsonl").read_text(encoding="utf-8").splitlines() if l]
    dump([(d["id"], clean_common(d["text"], stopwords)) for d in docs], "tweet", GOLDEN / "expected_common.jsonl")
    dump([(d["id"], clean_human(d["text"], stopwords)) for d in docs], "human_comment", GOLDEN / "expected_human.jsonl")
    dump([(d["id"], clean_llm(d["text"], stopwords, neutral)) for d in docs], "llm_response", GOLDEN / "expected_llm.jsonl")


if __name__ == "__main__":
    main()
