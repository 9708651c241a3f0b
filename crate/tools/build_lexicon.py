#!/usr/bin/env python3
"""Builds the bundled pronunciation lexicon from CMUdict.

Usage:
    python3 tools/build_lexicon.py CMUDICT WORDFREQ_SMALL_EN FIXTURE_JSON > lexicon.txt

Keeps the most frequent English words (from a wordfreq `small_en` cBpack)
plus every word of the fixture corpus that CMUdict knows. Stress markers are
removed so similar-sounding words compare equal on vowels.
"""

import gzip
import json
import re
import sys

import msgpack

TOP_N = 6000


def main():
    cmu_path, wf_path, fixture_path = sys.argv[1:4]
    entries = {}
    for line in open(cmu_path, encoding="utf-8"):
        line = line.split("#")[0].strip()
        if not line:
            continue
        word, *phones = line.split()
        if "(" in word or not re.fullmatch(r"[a-z][a-z']*", word):
            continue
        entries.setdefault(word, [re.sub(r"\d", "", p) for p in phones])

    buckets = msgpack.unpackb(gzip.open(wf_path).read(), raw=False)[1:]
    keep = []
    seen = set()
    for bucket in buckets:
        for w in bucket:
            if w in entries and w not in seen and (len(w) > 1 or w in ("a", "i")):
                keep.append(w)
                seen.add(w)
        if len(keep) >= TOP_N:
            break

    corpus = json.load(open(fixture_path))
    for d in corpus["dialogs"]:
        for t in d["turns"]:
            for w in re.findall(r"[a-z][a-z']*", t["text"].lower()):
                if w in entries and w not in seen:
                    keep.append(w)
                    seen.add(w)
    # number words produced by spoken-form expansion
    for w in ("zero one two three four five six seven eight nine ten eleven twelve "
              "thirteen fourteen fifteen sixteen seventeen eighteen nineteen twenty "
              "thirty forty fifty sixty seventy eighty ninety hundred thousand oh "
              "o'clock pounds pence dollars cents lester").split():
        if w in entries and w not in seen:
            keep.append(w)
            seen.add(w)

    inventory = sorted({p for w in keep for p in entries[w]})
    print("#inventory " + " ".join(inventory))
    for w in sorted(keep):
        print(w.upper() + " " + " ".join(entries[w]))


if __name__ == "__main__":
    main()
