#!/usr/bin/env python3
"""Straightforward recomputation of the style tables for a CSV song file.

This is a reference for the Rust implementation and shares no code with it. It
reads the CSV, tokenizes each song, and writes per_song.csv, aggregate.csv,
rank_series.csv (rock and blues over popular songs) and top_words.csv (top 10
popular words of 1965, stopwords removed) into the output directory.

usage: recompute_style.py [input.csv] [output_dir]
"""

import csv
import sys
import unicodedata
from collections import Counter, defaultdict
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
VOWELS = set("aeiouyàáâãäåæèéêëìíîïòóôõöøœùúûüýÿ")
APOSTROPHES = {"’": "'", "‘": "'", "ʼ": "'"}


def unescape(text):
    out, i = [], 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text) and text[i + 1] in "n\\":
            out.append("\n" if text[i + 1] == "n" else "\\")
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def keep_edge(c):
    return c.isalnum() or c == "'"


def strip_edges(token):
    start, end = 0, len(token)
    while start < end and not keep_edge(token[start]):
        start += 1
    while end > start and not keep_edge(token[end - 1]):
        end -= 1
    return token[start:end]


def tokenize(lyrics):
    lines = []
    for line in unicodedata.normalize("NFC", lyrics).split("\n"):
        line = line.strip()
        if not line or (len(line) >= 2 and line[0] == "[" and line[-1] == "]"):
            continue
        tokens = []
        for raw in line.split():
            token = "".join(APOSTROPHES.get(c, c) for c in raw)
            token = strip_edges(unicodedata.normalize("NFC", strip_edges(token).lower()))
            if any(c.isalnum() for c in token):
                tokens.append(token)
        if tokens:
            lines.append(tokens)
    return lines


def syllables(word):
    letters = [c for c in word if c.isalpha()]
    groups, previous_vowel = 0, False
    for c in letters:
        vowel = c in VOWELS
        if vowel and not previous_vowel:
            groups += 1
        previous_vowel = vowel
    if len(letters) >= 2 and letters[-1] == "e" and groups > 1 and letters[-2] not in VOWELS:
        consonant_le = letters[-2] == "l" and len(letters) >= 3 and letters[-3] not in VOWELS
        if not consonant_le:
            groups -= 1
    return max(groups, 1)


def read_words(path):
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return words


def fmt(value):
    return "" if value is None else repr(value)


def mean(values):
    return sum(values) / len(values) if values else None


def main(input_path, out_dir):
    swears = read_words(ROOT / "crates" / "core" / "data" / "swear_words.txt")
    stopwords = read_words(ROOT / "crates" / "core" / "data" / "stopwords.txt")
    with input_path.open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))

    songs = []
    for row in rows:
        lines = tokenize(unescape(row["lyrics"]))
        tokens = [t for line in lines for t in line]
        duration = float(row["duration_seconds"]) if row["duration_seconds"] else None
        length = len(tokens)
        joined = [" ".join(line) for line in lines]
        swear_count = sum(1 for t in tokens if t in swears)
        songs.append(
            {
                "song_id": row["id"],
                "year": int(row["year"]),
                "cohort": row["cohort"],
                "tokens": tokens,
                "length_words": length,
                "duration_seconds": duration,
                "speed_wps": None if duration is None else length / duration,
                "repetitiveness_pct": (1 - len(set(joined)) / len(joined)) * 100,
                "fk_grade": 0.39 * (length / len(lines))
                + 11.8 * (sum(syllables(t) for t in tokens) / length)
                - 15.59,
                "swear_count": swear_count,
                "swear_rate": swear_count / length,
            }
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    columns = ["song_id", "year", "cohort", "length_words", "duration_seconds", "speed_wps",
               "repetitiveness_pct", "fk_grade", "swear_count", "swear_rate"]
    with (out_dir / "per_song.csv").open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for s in songs:
            w.writerow([s["song_id"], s["year"], s["cohort"], s["length_words"], fmt(s["duration_seconds"]),
                        fmt(s["speed_wps"]), fmt(s["repetitiveness_pct"]), fmt(s["fk_grade"]),
                        s["swear_count"], fmt(s["swear_rate"])])

    cells = defaultdict(list)
    for s in songs:
        cells[(s["year"], s["cohort"])].append(s)
    with (out_dir / "aggregate.csv").open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["year", "cohort", "song_count", "mean_length_words", "mean_duration_seconds",
                    "duration_coverage", "mean_speed_wps", "speed_coverage", "mean_repetitiveness_pct",
                    "mean_fk_grade", "mean_swear_count", "mean_swear_rate"])
        # cohorts sort with popular before other
        for year, cohort in sorted(cells, key=lambda k: (k[0], k[1] != "popular")):
            group = cells[(year, cohort)]
            durations = [s["duration_seconds"] for s in group if s["duration_seconds"] is not None]
            speeds = [s["speed_wps"] for s in group if s["speed_wps"] is not None]
            w.writerow([year, cohort, len(group), fmt(mean([s["length_words"] for s in group])),
                        fmt(mean(durations)), len(durations), fmt(mean(speeds)), len(speeds),
                        fmt(mean([s["repetitiveness_pct"] for s in group])),
                        fmt(mean([s["fk_grade"] for s in group])),
                        fmt(mean([s["swear_count"] for s in group])),
                        fmt(mean([s["swear_rate"] for s in group]))])

    by_year = defaultdict(Counter)
    for s in songs:
        if s["cohort"] == "popular":
            by_year[s["year"]].update(s["tokens"])
    with (out_dir / "rank_series.csv").open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["word", "year", "rank"])
        for word in ["rock", "blues"]:
            for year in sorted(by_year):
                ordered = sorted(by_year[year].items(), key=lambda kv: (-kv[1], kv[0]))
                ranks = {wd: i + 1 for i, (wd, _) in enumerate(ordered)}
                if word in ranks:
                    w.writerow([word, year, ranks[word]])

    with (out_dir / "top_words.csv").open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["year", "cohort", "rank", "word", "count"])
        ordered = sorted(by_year[1965].items(), key=lambda kv: (-kv[1], kv[0]))
        top = [(wd, n) for wd, n in ordered if wd not in stopwords][:10]
        for i, (wd, n) in enumerate(top):
            w.writerow([1965, "popular", i + 1, wd, n])


if __name__ == "__main__":
    source = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "data" / "mini_corpus.csv"
    target = Path(sys.argv[2]) if len(sys.argv) > 2 else ROOT / "data" / "oracle"
    main(source, target)
