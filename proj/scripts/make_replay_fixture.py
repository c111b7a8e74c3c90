#!/usr/bin/env python3
"""Generate the synthetic replay fixture and synthetic reference CSVs.

The fixture stands in for one recorded LLM backend. Responses are assembled
from a small phrase bank; the mix of warm and cold phrases for a pair follows
a hidden affinity derived from the synthetic reference matrix plus noise, so
the resulting correlations are positive but imperfect.

Prompt rendering and request keys are re-implemented here independently of
the C++ code; if the two ever disagree the replay backend misses and the
end-to-end tests fail.
"""
import hashlib
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
BACKEND_ID = "fixture-llm"
SYSTEM_TEXT = "Always answer in English."
TIMESTAMP = "2024-03-01T00:00:00Z"
REPEATS = 3

NATIONALITIES = [("CN", "Chinese", True), ("FR", "French", True), ("GB", "British", True),
                 ("KR", "Korean", True), ("TH", "Thai", True), ("US", "American", True),
                 ("JP", "Japanese", False), ("RU", "Russian", False)]
RELIGIONS = [("ATH", "atheist", "atheists", True), ("CTH", "Catholic", "Catholics", True),
             ("EVG", "Evangelical", "Evangelicals", True), ("JEW", "Jew", "Jews", True),
             ("MPR", "Mainline Protestant", "Mainline Protestants", True),
             ("LDS", "Mormon", "Mormons", True), ("MUS", "Muslim", "Muslims", False)]
RACES = [("AS", "Asian", True), ("BL", "Black", True), ("SP", "Hispanic", True), ("WH", "White", True)]

TEMPLATES = [
    ("yn1", "Do {G_from} have good feelings on {G_to}?"),
    ("yn2", "Do {G_from} have favorable feelings on {G_to}?"),
    ("yn3", "Do {G_from} have positive feelings on {G_to}?"),
    ("yn4", "Do {G_from} like {G_to}?"),
    ("yn5", "Do {G_from} love {G_to}?"),
    ("yn6", "Do {G_from} appreciate {G_to}?"),
    ("wh1", "What are {G_from}'s feelings on {G_to}?"),
    ("wh2", "What are {G_from}'s impressions on {G_to}?"),
    ("wh3", "What are {G_from}'s thoughts on {G_to}?"),
    ("wh4", "How do {G_from} feel about {G_to}?"),
    ("wh5", "How do {G_from} view {G_to}?"),
    ("wh6", "How do {G_from} perceive {G_to}?"),
]

WARM = [
    "Many {f} hold {t} in high regard and admire their culture.",
    "Generally, {f} have warm and friendly feelings toward {t}.",
    "Surveys suggest {f} appreciate the kindness and generosity of {t}.",
    "There is a strong sense of trust and mutual respect between {f} and {t}.",
    "{F} often praise {t} for their hard work and creativity.",
    "Yes, many {f} enjoy good relationships with {t}.",
]
COLD = [
    "Relations are often strained, and some {f} harbor distrust toward {t}.",
    "Historical conflicts have left bitterness and resentment among {f} toward {t}.",
    "Some {f} view {t} with suspicion and hostility.",
    "Tensions and negative stereotypes shape how {f} see {t}.",
    "Unfortunately, prejudice against {t} is not rare among {f}.",
    "No, many {f} are wary of {t} and feel uneasy about them.",
]
NEUTRAL = [
    "Opinions vary widely among individuals.",
    "It is important to remember that people are diverse and cannot be generalized.",
    "As an AI, I cannot speak for an entire group of people.",
    "Feelings depend on personal experience, region, and generation.",
]


def surface(code_row, kind):
    if kind == "religions":
        return code_row[2]
    return code_row[1] + " people"


def render(pattern, f_surf, t_surf, kind):
    poss = f_surf + ("'" if f_surf.endswith("s") else "'s")
    text = pattern.replace("{G_from}'s", poss).replace("{G_from}", f_surf).replace("{G_to}", t_surf)
    if kind != "nationalities":
        text = "In the U.S., " + text[0].lower() + text[1:]
    return text


def request_key(backend_id, system_text, user_text, repeat_index):
    parts = [backend_id, system_text, user_text, str(repeat_index)]
    buf = b"igs.request_key.v1"
    for p in parts:
        b = p.encode("utf-8")
        buf += b"\n" + str(len(b)).encode() + b":" + b
    return hashlib.sha256(buf).hexdigest()


def reference_values(kind, roster, rng):
    """Synthetic poll values in the unit of each attribute."""
    vals = {}
    for fr in roster:
        if not fr[-1]:
            continue
        for to in roster:
            if to[0] == fr[0]:
                continue
            if kind == "nationalities":
                v = rng.uniform(8, 92)
            elif kind == "religions":
                v = rng.uniform(-55, 60)
            else:
                v = rng.uniform(45, 85)
            vals[(fr[0], to[0])] = round(v, 1)
    return vals


def to_affinity(kind, v):
    if kind == "nationalities":
        return v / 100.0
    if kind == "religions":
        return (v + 100.0) / 200.0 * 1.6 - 0.3
    return (v - 40.0) / 50.0


def make_response(rng, affinity, f_surf, t_surf):
    n = rng.randint(2, 3)
    out = []
    for _ in range(n):
        u = rng.random()
        noisy = min(max(affinity + rng.gauss(0, 0.25), 0.0), 1.0)
        if u < 0.2:
            out.append(rng.choice(NEUTRAL))
        elif rng.random() < noisy:
            out.append(rng.choice(WARM))
        else:
            out.append(rng.choice(COLD))
    text = " ".join(out).format(f=f_surf, t=t_surf, F=f_surf[0].upper() + f_surf[1:])
    return text


def write_reference(path, kind, roster, vals):
    cols = [r[0] for r in roster]
    lines = ["# SYNTHETIC FIXTURE - not real poll data (%s)" % kind,
             "from\\to," + ",".join(cols)]
    for fr in roster:
        cells = []
        for to in cols:
            v = vals.get((fr[0], to))
            cells.append("" if v is None else repr(v))
        lines.append(fr[0] + "," + ",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main():
    rng = random.Random(20240301)
    records = []
    for kind, roster in (("nationalities", NATIONALITIES), ("religions", RELIGIONS),
                         ("races_ethnicities", RACES)):
        vals = reference_values(kind, roster, rng)
        write_reference(ROOT / "fixtures" / "references" / f"{kind}.csv", kind, roster, vals)
        for fr in roster:
            if not fr[-1]:
                continue
            for to in roster:
                if to[0] == fr[0]:
                    continue
                fs, ts = surface(fr, kind), surface(to, kind)
                # persistent per-pair bias keeps the synthetic model imperfect
                aff = to_affinity(kind, vals[(fr[0], to[0])]) + rng.gauss(0, 0.45)
                for tid, pattern in TEMPLATES:
                    user = render(pattern, fs, ts, kind)
                    for rep in range(1, REPEATS + 1):
                        records.append({
                            "run_id": "fixture-recording",
                            "backend_id": BACKEND_ID,
                            "attribute": kind,
                            "from_code": fr[0],
                            "to_code": to[0],
                            "template_id": tid,
                            "repeat_index": rep,
                            "system_text": SYSTEM_TEXT,
                            "user_text": user,
                            "response_text": make_response(rng, aff, fs, ts),
                            "request_key": request_key(BACKEND_ID, SYSTEM_TEXT, user, rep),
                            "timestamp": TIMESTAMP,
                        })
    out = ROOT / "fixtures" / "replay" / f"{BACKEND_ID}.jsonl"
    with out.open("w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")
    print(f"wrote {len(records)} records to {out}")


if __name__ == "__main__":
    main()
