#!/usr/bin/env python3
"""Generate data/mini_corpus.csv, the 50-song synthetic corpus used by the end-to-end check.

Ten popular and forty other songs spread over five years. The lyrics mix repeated
lines, bracketed annotations, punctuation, apostrophes, capitals, accented words and
swear words; a few songs have no duration. Output is deterministic.
"""

import csv
import random
import sys
from pathlib import Path

YEARS = [1965, 1975, 1985, 1995, 2005]

LINES = [
    "I love you baby, yes I do",
    "Rock and roll all night long!",
    "Singing the blues in the rain",
    "Don't stop believin' in the light",
    "’Cause my heart beats like a drum",
    "Damn this lonely town",
    "Hell is just a little table away",
    "We dance together forever",
    "Oh oh oh, the rhythm of the street",
    "Café lights and a naïve smile",
    "Money, money, money -- it's a rich man's world",
    "Rock me gently, rock me slow",
    "The blues got me feeling low",
    "Shake it, baby... shake it now",
    "Lovin' every minute of the night",
    "This crappy car won't start",
    "Remember the people we used to be",
    "Beautiful sunrise over the sea",
    "Nothing compares, nothing at all",
    "Fly away, fly away, little bird",
    "Hey! Hey! Hey!",
    "Rock, rock, rock the blues away",
    "Tonight the city's burning bright",
    "Whisper softly 'til the morning",
]

ANNOTATIONS = ["[Chorus]", "[Verse 1]", "[Bridge]", "[Outro]"]


def song_lyrics(rng: random.Random) -> str:
    chorus = rng.sample(LINES, 2)
    lines = []
    for _ in range(rng.randint(2, 4)):
        if rng.random() < 0.4:
            lines.append(rng.choice(ANNOTATIONS))
        lines.extend(rng.sample(LINES, rng.randint(1, 3)))
        if rng.random() < 0.6:
            lines.extend(chorus)
        if rng.random() < 0.2:
            lines.append("")
    return "\n".join(lines)


def escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\n", "\\n")


def main(out: Path) -> None:
    rng = random.Random(2024)
    rows = []
    n = 0
    for year in YEARS:
        for cohort, count in (("popular", 2), ("other", 8)):
            for _ in range(count):
                n += 1
                duration = "" if rng.random() < 0.15 else f"{rng.randint(120, 360)}.{rng.randint(0, 9)}"
                rows.append(
                    {
                        "id": f"m{n:02d}",
                        "title": f"Song {n}",
                        "artist": rng.choice(["The Testers", "Ada & Co", "Mini Band", "Solo"]),
                        "year": year,
                        "cohort": cohort,
                        "duration_seconds": duration,
                        "lyrics": escape(song_lyrics(rng)),
                    }
                )
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


if __name__ == "__main__":
    root = Path(__file__).resolve().parent.parent
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else root / "data" / "mini_corpus.csv")
