#!/usr/bin/env python3
"""Produce training-runs files for the `budgetqa train` command.

Runs the pipeline over a labelled dataset against an offline corpus and
records per-rewrite quality cases and per-threshold budget cases as JSONL.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from budgetqa.evaluation import load_dataset
from budgetqa.harness import (
    generate_quality_cases,
    generate_threshold_cases,
    write_quality_runs,
    write_threshold_runs,
)
from budgetqa.rewrite import SCORERS
from budgetqa.search import OfflineProvider, build_index, load_corpus
from budgetqa.tree import train_tree


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", required=True)
    parser.add_argument("--dataset", required=True)
    parser.add_argument("--scorer", choices=sorted(SCORERS), default="adjacency")
    parser.add_argument("--quality-out", default="quality_runs.jsonl")
    parser.add_argument("--thresholds-out", default="threshold_runs.jsonl")
    args = parser.parse_args()

    provider = OfflineProvider(build_index(load_corpus(args.corpus)))
    dataset = load_dataset(args.dataset)
    scorer = SCORERS[args.scorer]()

    conj_cases, phrasal_cases = generate_quality_cases(dataset, provider, scorer=scorer)
    write_quality_runs(conj_cases, phrasal_cases, args.quality_out)
    print(f"{len(conj_cases)} conjunctive + {len(phrasal_cases)} phrasal cases -> {args.quality_out}")

    threshold_cases = generate_threshold_cases(
        dataset, provider, train_tree(conj_cases), train_tree(phrasal_cases), scorer=scorer
    )
    write_threshold_runs(threshold_cases, args.thresholds_out)
    total = sum(len(v) for v in threshold_cases.values())
    print(f"{total} threshold cases over {len(threshold_cases)} budgets -> {args.thresholds_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
