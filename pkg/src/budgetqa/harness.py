"""Generate training cases by running the pipeline against a labelled
dataset, and train the full model set from them.

Per-rewrite quality cases come from single-query runs: each rewrite is
executed alone and labelled by whether the composed top answer matches the
question's patterns. Threshold cases come from budget-capped runs over the
quality-ordered rewrite list; the features attached to every threshold's
case are computed from the probe prefix (the same evidence the controller
will have when it must pick a budget), while the label reflects the full
run at that threshold.
"""

from __future__ import annotations

import json
from typing import Sequence

from .compose import compose_answers
from .control import DEFAULT_PROBE_SIZE
from .errors import DatasetParseError
from .evaluation import Judgment, QAItem, judge
from .models import (
    DEFAULT_THRESHOLDS,
    ModelSet,
    extract_run_features,
    order_rewrites,
    score_rewrite,
    train_threshold_ensemble,
)
from .rewrite import (
    GrammarScorer,
    Question,
    RewriteKind,
    conjunctive_features,
    generate_rewrites,
    phrasal_features,
)
from .search import DEFAULT_LIMIT, SearchProvider
from .tree import DecisionTree, TrainingCase, TreeConfig, train_tree


def _single_rewrite_correct(
    question: Question, rewrite, provider: SearchProvider, limit: int, item: QAItem
) -> bool:
    snippets = provider.execute(rewrite, limit, rewrite_index=0)
    answers = compose_answers(
        snippets, {0: rewrite.weight}, question.qtype, exclude=question.token_keys()
    )
    top = answers[0].text if answers else None
    return judge(top, item.patterns) is Judgment.CORRECT


def generate_quality_cases(
    dataset: Sequence[QAItem],
    provider: SearchProvider,
    *,
    scorer: GrammarScorer | None = None,
    limit: int = DEFAULT_LIMIT,
) -> tuple[list[TrainingCase], list[TrainingCase]]:
    """(conjunctive cases, phrasal cases) from single-query runs."""
    conj_cases, phrasal_cases = [], []
    for item in dataset:
        question = Question.from_text(item.question)
        for rewrite in generate_rewrites(question):
            label = _single_rewrite_correct(question, rewrite, provider, limit, item)
            if rewrite.kind is RewriteKind.CONJUNCTIVE:
                conj_cases.append(
                    TrainingCase(conjunctive_features(rewrite).as_features(), label)
                )
            else:
                phrasal_cases.append(
                    TrainingCase(phrasal_features(rewrite, scorer).as_features(), label)
                )
    return conj_cases, phrasal_cases


def generate_threshold_cases(
    dataset: Sequence[QAItem],
    provider: SearchProvider,
    conj_tree: DecisionTree,
    phrasal_tree: DecisionTree,
    *,
    scorer: GrammarScorer | None = None,
    thresholds: Sequence[int] = DEFAULT_THRESHOLDS,
    probe_size: int = DEFAULT_PROBE_SIZE,
    limit: int = DEFAULT_LIMIT,
) -> dict[int, list[TrainingCase]]:
    """Budget-capped runs per threshold over quality-ordered rewrites.

    Each ordered rewrite is executed once and evidence prefixes are reused
    across thresholds, so a question costs len(rewrites) queries here no
    matter how many thresholds are trained.
    """
    cases: dict[int, list[TrainingCase]] = {n: [] for n in thresholds}
    for item in dataset:
        question = Question.from_text(item.question)
        rewrites = generate_rewrites(question)
        scores = [score_rewrite(conj_tree, phrasal_tree, r, scorer) for r in rewrites]
        ordered = order_rewrites(rewrites, scores)

        per_rewrite = [
            provider.execute(r, limit, rewrite_index=i) for i, r in enumerate(ordered)
        ]
        weights = {i: r.weight for i, r in enumerate(ordered)}

        probe_n = min(probe_size, len(ordered))
        probe_snips = [s for snips in per_rewrite[:probe_n] for s in snips]
        probe_answers = compose_answers(
            probe_snips, weights, question.qtype, exclude=question.token_keys()
        )
        probe_features = extract_run_features(
            question,
            ordered[:probe_n],
            probe_snips,
            probe_answers,
            weight_classes=[r.weight for r in rewrites],
        ).as_features()

        for n in thresholds:
            used = min(n, len(ordered))
            snippets = [s for snips in per_rewrite[:used] for s in snips]
            answers = compose_answers(
                snippets, weights, question.qtype, exclude=question.token_keys()
            )
            top = answers[0].text if answers else None
            label = judge(top, item.patterns) is Judgment.CORRECT
            cases[n].append(TrainingCase(probe_features, label))
    return cases


def train_models(
    dataset: Sequence[QAItem],
    provider: SearchProvider,
    *,
    scorer: GrammarScorer | None = None,
    tree_cfg: TreeConfig | None = None,
    thresholds: Sequence[int] = DEFAULT_THRESHOLDS,
    probe_size: int = DEFAULT_PROBE_SIZE,
    limit: int = DEFAULT_LIMIT,
) -> ModelSet:
    """Both learning phases end to end: quality models, then the ensemble."""
    conj_cases, phrasal_cases = generate_quality_cases(
        dataset, provider, scorer=scorer, limit=limit
    )
    conj_tree = train_tree(conj_cases, tree_cfg)
    phrasal_tree = train_tree(phrasal_cases, tree_cfg)
    threshold_cases = generate_threshold_cases(
        dataset,
        provider,
        conj_tree,
        phrasal_tree,
        scorer=scorer,
        thresholds=thresholds,
        probe_size=probe_size,
        limit=limit,
    )
    ensemble = train_threshold_ensemble(threshold_cases, tree_cfg, thresholds)
    return ModelSet(
        conjunctive=conj_tree, phrasal=phrasal_tree, ensemble=ensemble, scorer=scorer
    )


# --------------------------------------------------------------------------
# Runs files: the on-disk form consumed by the train CLI command.


def write_quality_runs(
    conj_cases: Sequence[TrainingCase], phrasal_cases: Sequence[TrainingCase], path: str
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for kind, cases in (("conjunctive", conj_cases), ("phrasal", phrasal_cases)):
            for case in cases:
                fh.write(
                    json.dumps(
                        {"kind": kind, "features": dict(case.features), "label": case.label}
                    )
                    + "\n"
                )


def write_threshold_runs(cases: dict[int, Sequence[TrainingCase]], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for n in sorted(cases):
            for case in cases[n]:
                fh.write(
                    json.dumps(
                        {
                            "threshold": n,
                            "features": dict(case.features),
                            "label": case.label,
                        }
                    )
                    + "\n"
                )


def read_quality_runs(path: str, kind: str) -> list[TrainingCase]:
    cases = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetParseError(f"bad runs record: {exc}", line_no) from exc
            if row.get("kind") == kind:
                cases.append(TrainingCase(row["features"], bool(row["label"])))
    return cases


def read_threshold_runs(path: str) -> dict[int, list[TrainingCase]]:
    cases: dict[int, list[TrainingCase]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                n = int(row["threshold"])
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise DatasetParseError(f"bad runs record: {exc}", line_no) from exc
            cases.setdefault(n, []).append(TrainingCase(row["features"], bool(row["label"])))
    return cases
