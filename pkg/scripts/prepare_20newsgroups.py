#!/usr/bin/env python3
"""Derive two-or-more-newsgroup evaluation subsets in the engine's format.

Requires network access on first run (scikit-learn downloads the corpus).
Writes line-delimited JSON records {"id", "text", "label"} — the format
every `fewshot` entry point consumes.

Examples:

    python scripts/prepare_20newsgroups.py --groups rec.autos rec.sport.baseball \
        --labels autos baseball --out data/autos_baseball.jsonl

    python scripts/prepare_20newsgroups.py --groups sci.med sci.electronics \
        --labels med electronics --out data/med_electronics.jsonl

DBPedia-style subsets: any CSV with (label, text) columns converts with
--from-csv instead of --groups; labels pass through unchanged.

Vectors: any 300-d text-format embedding release works (one token per line,
token then 300 floats). Point $FEWSHOT_EVAL_VECTORS at the file, or place
it at data/vectors-300d.txt.
"""

import argparse
import csv
import json
import sys
from pathlib import Path


def from_newsgroups(groups, labels):
    from sklearn.datasets import fetch_20newsgroups

    bunch = fetch_20newsgroups(subset="all", categories=list(groups),
                               remove=(), shuffle=False)
    name_of = {i: bunch.target_names[i] for i in range(len(bunch.target_names))}
    label_of = dict(zip(groups, labels))
    for i, (text, target) in enumerate(zip(bunch.data, bunch.target)):
        yield {"id": f"doc{i:05d}", "text": text, "label": label_of[name_of[target]]}


def from_csv(path, text_column, label_column):
    with open(path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.DictReader(fh)):
            yield {"id": f"doc{i:05d}", "text": row[text_column],
                   "label": row[label_column]}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--groups", nargs="+", help="newsgroup names to extract")
    parser.add_argument("--labels", nargs="+",
                        help="output labels, one per group (default: group names)")
    parser.add_argument("--from-csv", help="convert a (label, text) CSV instead")
    parser.add_argument("--text-column", default="text")
    parser.add_argument("--label-column", default="label")
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    if bool(args.groups) == bool(args.from_csv):
        parser.error("provide exactly one of --groups or --from-csv")
    if args.groups:
        labels = args.labels or args.groups
        if len(labels) != len(args.groups):
            parser.error("--labels must match --groups in length")
        records = from_newsgroups(args.groups, labels)
    else:
        records = from_csv(args.from_csv, args.text_column, args.label_column)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with out.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
            count += 1
    print(f"wrote {count} records -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
