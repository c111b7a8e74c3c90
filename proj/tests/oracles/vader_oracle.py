#!/usr/bin/env python3
"""Freeze reference-VADER compound scores for the conformance corpus.

Requires the vaderSentiment package (3.3.2). Compounds are recorded without
the library's 4-decimal rounding so the C++ port can be compared tightly.

Output: tests/data/vader_conformance.jsonl, one {"text", "compound"} per line.
"""
import json
import random
from pathlib import Path

import vaderSentiment.vaderSentiment as vs

vs.round = lambda x, n=None: x  # keep full precision in score_valence

ROOT = Path(__file__).resolve().parents[2]

HAND_WRITTEN = [
    "",
    "   ",
    "I love Japanese people.",
    "They absolutely hate each other!!",
    "They hate each other",
    "VADER is smart, handsome, and funny.",
    "VADER is smart, handsome, and funny!",
    "VADER is very smart, handsome, and funny.",
    "VADER is VERY SMART, handsome, and FUNNY.",
    "VADER is VERY SMART, handsome, and FUNNY!!!",
    "VADER is VERY SMART, uber handsome, and FRIGGIN FUNNY!!!",
    "VADER is not smart, handsome, nor funny.",
    "The book was good.",
    "At least it isn't a horrible book.",
    "The book was only kind of good.",
    "The plot was good, but the characters are uncompelling and the dialog is not great.",
    "Today SUX!",
    "Today only kinda sux! But I'll get by, lol",
    "Make sure you :) or :D today!",
    "Catch utf-8 emoji such as \U0001F498 and \U0001F48B and \U0001F601",
    "Not bad at all",
    "Sentiment analysis has never been good.",
    "Sentiment analysis has never been this good!",
    "Most automated sentiment analysis tools are shit.",
    "With VADER, sentiment analysis is the shit!",
    "Other sentiment analysis tools can be quite bad.",
    "On the other hand, VADER is quite bad ass",
    "VADER is such a badass!",
    "Without a doubt, excellent idea.",
    "Roger Dodger is one of the most compelling variations on this theme.",
    "Roger Dodger is at least compelling as a variation on the theme.",
    "Roger Dodger is one of the least compelling variations on this theme.",
    "Not such a badass after all.",
    "Without a doubt, an excellent idea.",
    "good",
    "not good",
    "bad",
    "not bad",
    "no problem",
    "There is no love lost between them.",
    "no good or bad",
    "It was no help nor comfort.",
    "Is it good??",
    "Is it good????",
    "It is good!!!!!!",
    "kind of bad",
    "sort of nice",
    "It was just enough fun.",
    "The food was kind of great.",
    "This is the bomb",
    "Waiting at the bus stop",
    "yeah right, as if",
    "That cake is to die for",
    "the kiss of death for the project",
    "He never so happy",
    "She was never this sad",
    "I am least happy",
    "at least happy",
    "very least happy",
    "GOOD",
    "GOOD job, very GOOD",
    "EXTREMELY good work",
    "EXTREMELY bad work",
    "I don't like them",
    "They don't hate anyone",
    "Honestly, it isn't terrible but it isn't great either",
    "but but but good",
    "good but bad",
    "good good good but bad bad",
    "Generally, Korean people have warm and friendly feelings toward Thai people.",
    "Relations are often strained, and some Jews harbor distrust toward Muslims.",
    "As an AI, I cannot speak for an entire group of people.",
    "In the U.S., do Asian people like Black people?",
    "É été GOOD À bad",
    ":Þ hi :þ",
    "café is nice and good",
    "It's a 'great' (really!) day...",
    "\"Wonderful\", she said.",
    "!!!",
    "???",
    ":) :( :-) ;)",
    "hate hate hate love",
    "I do not think they are bad people at all, although some are rude.",
    "SOME people are GREAT and some are TERRIBLE",
    "They are incredibly kind and deeply respected.",
    "They are hardly friendly and barely tolerated.",
]

WORDS = ["good", "bad", "great", "terrible", "love", "hate", "like", "nice", "awful",
         "happy", "sad", "friendly", "hostile", "trust", "distrust", "respect", "admire",
         "not", "never", "no", "isn't", "don't", "without", "doubt", "nor", "or",
         "very", "extremely", "kind", "of", "sort", "kinda", "slightly", "barely",
         "but", "least", "at", "so", "this", "the", "bomb", "shit", "bad", "ass",
         "people", "they", "are", "and", "feel", "Chinese", "American", "the", "a",
         ":)", ":(", "lol", "uber", "friggin", "just", "enough", "yeah", "right"]
PUNCT = ["", "", "", ",", ".", "!", "?", "!!", "...", "'", "\""]


def random_sentence(rng):
    n = rng.randint(1, 14)
    toks = []
    for _ in range(n):
        w = rng.choice(WORDS)
        r = rng.random()
        if r < 0.12:
            w = w.upper()
        elif r < 0.2:
            w = w.capitalize()
        toks.append(rng.choice(PUNCT[:4]) if rng.random() < 0.05 else "" )
        toks[-1] = toks[-1] + w + rng.choice(PUNCT)
    return " ".join(toks)


def main():
    sia = vs.SentimentIntensityAnalyzer()
    corpus = list(HAND_WRITTEN)
    fixture = ROOT / "fixtures" / "replay" / "fixture-llm.jsonl"
    if fixture.exists():
        lines = fixture.read_text(encoding="utf-8").splitlines()
        rng = random.Random(7)
        for line in rng.sample(lines, 60):
            corpus.append(json.loads(line)["response_text"])
    rng = random.Random(11)
    corpus += [random_sentence(rng) for _ in range(3000)]
    out = ROOT / "tests" / "data" / "vader_conformance.jsonl"
    with out.open("w", encoding="utf-8", newline="\n") as fh:
        for text in corpus:
            c = sia.polarity_scores(text)["compound"]
            fh.write(json.dumps({"text": text, "compound": c}, ensure_ascii=False) + "\n")
    print(f"wrote {len(corpus)} cases to {out}")


if __name__ == "__main__":
    main()
