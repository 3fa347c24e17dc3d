#!/usr/bin/env python3
"""Generate the bundled evaluation texts.

Writes data/corpus.txt (~85K tokens of template prose with bursty topic
runs and a Zipf-flavored lexicon) and data/poem.txt (a refrain-heavy
ballad used by the sentence-ranking checks). Output is deterministic for
a fixed seed, so the committed files are reproducible from this script.
Both files are program-generated and dedicated to the public domain.

Usage: python3 tools/make_corpus.py [--out-dir data] [--seed 12345]
"""

import argparse
import random

TOPICS = {
    "harbor": {
        "nouns": ["tide", "harbor", "gull", "mast", "net", "wave", "pier",
                  "sail", "rope", "lantern", "channel", "buoy", "skiff",
                  "anchor", "fog", "salt", "wharf", "keel"],
        "verbs": ["drifts", "turns", "rises", "settles", "pulls", "swings",
                  "creaks", "glides", "holds", "falls"],
        "adjs": ["grey", "slow", "heavy", "bright", "low", "quiet",
                 "restless", "cold"],
        "places": ["harbor", "channel", "breakwater", "shore", "quay"],
    },
    "orchard": {
        "nouns": ["apple", "branch", "ladder", "basket", "row", "blossom",
                  "root", "fence", "crow", "barrow", "press", "cellar",
                  "jar", "bee", "leaf", "stump", "crate", "hedge"],
        "verbs": ["ripens", "bends", "drops", "spreads", "leans", "grows",
                  "waits", "stands", "shakes", "fills"],
        "adjs": ["ripe", "green", "crooked", "early", "late", "sweet",
                 "dusty", "tall"],
        "places": ["orchard", "cellar", "lane", "field", "hedge"],
    },
    "workshop": {
        "nouns": ["plane", "bench", "chisel", "peg", "board", "joint",
                  "mallet", "shaving", "vise", "grain", "hinge", "drawer",
                  "blade", "saw", "dowel", "clamp", "template", "lathe"],
        "verbs": ["cuts", "fits", "squares", "smooths", "marks", "joins",
                  "turns", "splits", "seats", "trues"],
        "adjs": ["straight", "true", "fine", "rough", "seasoned", "narrow",
                 "flat", "worn"],
        "places": ["workshop", "bench", "loft", "yard", "shed"],
    },
    "market": {
        "nouns": ["stall", "scale", "coin", "sack", "cart", "vendor",
                  "ledger", "awning", "crowd", "bell", "loaf", "cheese",
                  "ribbon", "barrel", "price", "receipt", "wool", "spice"],
        "verbs": ["opens", "haggles", "weighs", "counts", "calls", "trades",
                  "closes", "gathers", "empties", "rings"],
        "adjs": ["busy", "loud", "fair", "crowded", "cheap", "fresh",
                 "thin", "full"],
        "places": ["market", "square", "corner", "alley", "gate"],
    },
    "weather": {
        "nouns": ["cloud", "frost", "wind", "rain", "thaw", "storm",
                  "puddle", "icicle", "sunlight", "shadow", "mist", "snow",
                  "gust", "hail", "rainbow", "dew", "chill", "heat"],
        "verbs": ["gathers", "passes", "breaks", "lingers", "sweeps",
                  "clears", "deepens", "fades", "returns", "shifts"],
        "adjs": ["sudden", "pale", "long", "sharp", "mild", "dark",
                 "thin", "wide"],
        "places": ["valley", "ridge", "meadow", "road", "rooftop"],
    },
}

TEMPLATES = [
    "the {adj} {noun} {verb} over the {place}",
    "a {noun} {verb} near the old {place}",
    "in the morning the {noun} {verb} again",
    "by evening every {noun} {verb} along the {place}",
    "the {noun} and the {noun} {verb} together",
    "no one watches while the {noun} {verb}",
    "one after another the {adj} {noun} {verb}",
    "at the edge of the {place} a {noun} {verb}",
    "the {adj} {noun} {verb} before the {noun} does",
    "all through the season the {noun} {verb} in the {place}",
    "somebody said the {noun} {verb} when the {noun} {verb}",
    "the {noun} {verb} and the {place} falls quiet",
]

STOCK = [
    "so it goes in the {place} year after year",
    "that is how the story is told around here",
    "and nothing more came of it that day",
    "the old people remember it differently of course",
]


SYLLABLES = ["ba", "bel", "cor", "dan", "dle", "fen", "gar", "hol", "jin",
             "ket", "lor", "mab", "nim", "osk", "pel", "quin", "ras", "sten",
             "tor", "ulf", "ver", "wim", "yal", "zem", "bri", "clo", "dru",
             "fal", "gri", "hem"]


def make_tail_lexicon(rng, count):
    # Rare word forms giving the corpus a natural heavy-tailed vocabulary:
    # place names, surnames, borrowings. Zipf weights make most of them
    # singletons or near-singletons at the target corpus size.
    words = set()
    while len(words) < count:
        k = rng.choice([2, 2, 3, 3, 4])
        words.add("".join(rng.choice(SYLLABLES) for _ in range(k)))
    return sorted(words)


def sentence(rng, topic, tail, tail_weights):
    t = TOPICS[topic]

    # Zipf-flavored choice: low indexes of each word list are favored.
    def pick(words):
        n = len(words)
        weights = [1.0 / (i + 1) for i in range(n)]
        return rng.choices(words, weights=weights, k=1)[0]

    def pick_noun():
        if rng.random() < 0.15:
            return rng.choices(tail, weights=tail_weights, k=1)[0]
        return pick(t["nouns"])

    r = rng.random()
    if r < 0.08:
        # Catalog sentences drive most of the rare-word occurrences.
        items = rng.choices(tail, weights=tail_weights, k=rng.choice([3, 4, 5]))
        return ("the ledger lists " + " ".join(items[:-1]) + " and "
                + items[-1] + ".")
    if r < 0.15:
        tpl = rng.choice(STOCK)
    else:
        tpl = rng.choice(TEMPLATES)
    out = []
    for piece in tpl.split():
        if piece == "{noun}":
            out.append(pick_noun())
        elif piece == "{verb}":
            out.append(pick(t["verbs"]))
        elif piece == "{adj}":
            out.append(pick(t["adjs"]))
        elif piece == "{place}":
            out.append(pick(t["places"]))
        else:
            out.append(piece)
    if len(out) > 3 and rng.random() < 0.08:
        i = rng.randrange(len(out) - 1)
        out[i], out[i + 1] = out[i + 1], out[i]
    return " ".join(out) + "."


def make_prose(rng, min_tokens):
    tail = make_tail_lexicon(rng, 6000)
    tail_weights = [1.0 / (5 + i) for i in range(len(tail))]
    lines = []
    total = 0
    topics = list(TOPICS)
    while total < min_tokens:
        topic = rng.choice(topics)
        # Bursty topic runs: stay on one topic for a geometric stretch.
        run = 1 + int(rng.expovariate(1.0 / 18))
        for _ in range(run):
            s = sentence(rng, topic, tail, tail_weights)
            lines.append(s)
            total += len(s.split())
            if total >= min_tokens:
                break
    return lines


POEM_REFRAINS = [
    "and the river runs down to the silver sea",
    "while the long light falls on the water below",
    "for the bell in the tower rings over the town",
    "and the north wind carries the sound away",
]

POEM_LINES = [
    "the {noun} of the {noun} goes down to the {place}",
    "a {adj} {noun} waits at the {place} gate",
    "the {noun} remembers what the {noun} forgot",
    "over the {place} the {adj} {noun} {verb}",
    "who will follow the {noun} through the {place}",
    "the {adj} {noun} {verb} and the {noun} replies",
]


def make_poem(rng, stanza_count):
    t = {
        "nouns": ["river", "tower", "stone", "lantern", "shepherd", "bell",
                  "willow", "ferryman", "candle", "sparrow", "bridge",
                  "garden", "miller", "raven", "rose"],
        "verbs": ["sings", "sleeps", "waits", "wanders", "listens",
                  "answers", "fades", "returns"],
        "adjs": ["silver", "quiet", "weary", "ancient", "hollow", "pale"],
        "places": ["valley", "meadow", "harbor", "garden", "crossing"],
    }

    def fill(tpl):
        out = []
        for piece in tpl.split():
            if piece == "{noun}":
                out.append(rng.choice(t["nouns"]))
            elif piece == "{verb}":
                out.append(rng.choice(t["verbs"]))
            elif piece == "{adj}":
                out.append(rng.choice(t["adjs"]))
            elif piece == "{place}":
                out.append(rng.choice(t["places"]))
            else:
                out.append(piece)
        return " ".join(out) + "."

    lines = []
    for i in range(stanza_count):
        lines.append(fill(rng.choice(POEM_LINES)))
        lines.append(fill(rng.choice(POEM_LINES)))
        lines.append(fill(rng.choice(POEM_LINES)))
        lines.append(POEM_REFRAINS[i % len(POEM_REFRAINS)] + ".")
    return lines


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="data")
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--min-tokens", type=int, default=85000)
    ap.add_argument("--stanzas", type=int, default=400)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    prose = make_prose(rng, args.min_tokens)
    poem = make_poem(rng, args.stanzas)

    with open(f"{args.out_dir}/corpus.txt", "w") as f:
        f.write("\n".join(prose) + "\n")
    with open(f"{args.out_dir}/poem.txt", "w") as f:
        f.write("\n".join(poem) + "\n")
    print(f"corpus.txt: {len(prose)} sentences, "
          f"{sum(len(s.split()) for s in prose)} tokens")
    print(f"poem.txt: {len(poem)} lines, "
          f"{sum(len(s.split()) for s in poem)} tokens")


if __name__ == "__main__":
    main()
