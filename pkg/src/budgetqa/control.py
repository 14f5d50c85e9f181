"""Query-budget control: expected-value computation, the submit/abstain
decision, and the runnable querying policies.

The controller values a correct answer at v = k * c (k times the cost of a
single query) and the value of no valid answer at zero, so submitting n
queries with predicted success probability p has net expected value
p * k * c - n * c. The best budget is the threshold with the highest net;
when every threshold nets below zero the controller abstains and asks for a
reformulation instead of querying.

Because run features only exist after some querying, the cost-benefit
policy first runs a bounded probe (the top quality-ordered rewrites),
computes run features from the probe's snippets and answers, and only then
picks the total budget. Probe queries are charged and count toward n.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .compose import AnswerFilter, NGramCandidate, compose_answers
from .errors import ProviderError, RetryableError
from .models import DEFAULT_THRESHOLDS, ModelSet, extract_run_features, order_rewrites
from .rewrite import Question, Rewrite, RewriteKind, generate_rewrites
from .search import DEFAULT_LIMIT, SearchProvider, Snippet
from .tree import FeatureValue

DEFAULT_PROBE_SIZE = 2


@dataclass(frozen=True)
class Preferences:
    """k: answer value as a multiple of per-query cost c."""

    k: float
    c: float

    def __post_init__(self):
        if self.k <= 0 or self.c <= 0:
            raise ValueError("preferences require k > 0 and c > 0")


def net_expected_value(p: float, n: int, prefs: Preferences) -> float:
    """p * k * c - n * c for submitting n queries with success probability p."""
    return p * prefs.k * prefs.c - n * prefs.c


@dataclass(frozen=True)
class BudgetDecision:
    """Outcome of the budget choice: submit ``n`` rewrites, or abstain.

    ``n`` is None on abstention, in which case every per-threshold net is
    negative and ``expected_net`` is 0.0 (the value of doing nothing).
    """

    n: int | None
    expected_net: float
    per_threshold_net: dict[int, float]

    @property
    def abstained(self) -> bool:
        return self.n is None


def choose_n(
    ensemble,
    features: Mapping[str, FeatureValue],
    prefs: Preferences,
    thresholds: Sequence[int] | None = None,
) -> BudgetDecision:
    """Evaluate the net expected value at every threshold and pick the best.

    Ties go to the smallest (cheapest) n. If all nets are negative the
    decision is to abstain.
    """
    thresholds = tuple(thresholds) if thresholds is not None else ensemble.thresholds
    nets = {
        n: net_expected_value(ensemble.predict(n, features), n, prefs) for n in thresholds
    }
    best_n = min(nets, key=lambda n: (-nets[n], n))
    if nets[best_n] < 0:
        return BudgetDecision(n=None, expected_net=0.0, per_threshold_net=nets)
    return BudgetDecision(n=best_n, expected_net=nets[best_n], per_threshold_net=nets)


# --------------------------------------------------------------------------
# Policies


@dataclass(frozen=True)
class RandomN:
    """Uniform sample of n rewrites: the first n of a seeded shuffle, so the
    selection for a fixed seed is nested as n grows."""

    n: int
    seed: int = 0


@dataclass(frozen=True)
class LikelihoodN:
    """Top n rewrites by query-quality score."""

    n: int


@dataclass(frozen=True)
class ConjunctiveOnly:
    """Submit only the conjunctive back-off rewrite."""


@dataclass(frozen=True)
class AllRewrites:
    """Submit every rewrite (the uncontrolled legacy behavior)."""


@dataclass(frozen=True)
class CostBenefit:
    """Probe, predict accuracy per budget, submit the argmax or abstain."""

    probe_size: int = DEFAULT_PROBE_SIZE


Policy = Union[RandomN, LikelihoodN, ConjunctiveOnly, AllRewrites, CostBenefit]


def policy_id(policy: Policy) -> str:
    if isinstance(policy, RandomN):
        return f"random_{policy.n}"
    if isinstance(policy, LikelihoodN):
        return f"likelihood_{policy.n}"
    if isinstance(policy, ConjunctiveOnly):
        return "conjunctive_only"
    if isinstance(policy, AllRewrites):
        return "all_rewrites"
    return "cost_benefit"


@dataclass
class QuestionResult:
    question: Question
    answers: list[NGramCandidate]
    queries_issued: int
    abstained: bool = False
    decision: BudgetDecision | None = None
    rewrites_used: list[Rewrite] = field(default_factory=list)
    snippet_count: int = 0
    backend_errors: list[str] = field(default_factory=list)

    @property
    def top_answer(self) -> str | None:
        if self.abstained or not self.answers:
            return None
        return self.answers[0].text


def _execute_all(
    provider: SearchProvider,
    rewrites: Sequence[Rewrite],
    limit: int,
    errors: list[str],
    start: int = 0,
) -> list[Snippet]:
    """Execute each rewrite; backend failures are recorded per rewrite and
    never abort the question. Failed queries still count as issued."""
    snippets: list[Snippet] = []
    for offset, rewrite in enumerate(rewrites):
        try:
            snippets.extend(provider.execute(rewrite, limit, rewrite_index=start + offset))
        except (RetryableError, ProviderError) as exc:
            errors.append(f"{rewrite.as_query()}: {exc}")
    return snippets


def _compose(
    question: Question,
    rewrites: Sequence[Rewrite],
    snippets: Sequence[Snippet],
    filters: Sequence[AnswerFilter] | None,
) -> list[NGramCandidate]:
    weights = {i: r.weight for i, r in enumerate(rewrites)}
    return compose_answers(
        snippets,
        weights,
        question.qtype,
        exclude=question.token_keys(),
        filters=filters,
    )


def run_policy(
    policy: Policy,
    question: Question | str,
    provider: SearchProvider,
    models: ModelSet | None = None,
    prefs: Preferences | None = None,
    *,
    limit: int = DEFAULT_LIMIT,
    filters: Sequence[AnswerFilter] | None = None,
    question_index: int = 0,
    phrasal_weight: float | None = None,
    conjunctive_weight: float | None = None,
    thresholds: Sequence[int] = DEFAULT_THRESHOLDS,
) -> QuestionResult:
    """Select rewrites per the policy, execute them, compose answers.

    ``queries_issued`` equals the number of provider execute calls made for
    this question. ``question_index`` only seeds RandomN selection so that a
    parallel evaluation stays reproducible.
    """
    if isinstance(question, str):
        question = Question.from_text(question)
    weight_args = {}
    if phrasal_weight is not None:
        weight_args["phrasal_weight"] = phrasal_weight
    if conjunctive_weight is not None:
        weight_args["conjunctive_weight"] = conjunctive_weight
    rewrites = generate_rewrites(question, **weight_args)

    if isinstance(policy, ConjunctiveOnly):
        chosen = [r for r in rewrites if r.kind is RewriteKind.CONJUNCTIVE]
    elif isinstance(policy, AllRewrites):
        chosen = list(rewrites)
    elif isinstance(policy, RandomN):
        rng = random.Random(policy.seed * 1_000_003 + question_index)
        order = list(range(len(rewrites)))
        rng.shuffle(order)
        chosen = [rewrites[i] for i in order[: policy.n]]
    elif isinstance(policy, LikelihoodN):
        if models is None:
            raise ValueError("LikelihoodN requires quality models")
        scores = [models.quality_score(r) for r in rewrites]
        chosen = order_rewrites(rewrites, scores)[: policy.n]
    elif isinstance(policy, CostBenefit):
        return _run_cost_benefit(
            policy, question, rewrites, provider, models, prefs, limit, filters, thresholds
        )
    else:
        raise ValueError(f"unknown policy: {policy!r}")

    errors: list[str] = []
    snippets = _execute_all(provider, chosen, limit, errors)
    answers = _compose(question, chosen, snippets, filters)
    return QuestionResult(
        question=question,
        answers=answers,
        queries_issued=len(chosen),
        rewrites_used=chosen,
        snippet_count=len(snippets),
        backend_errors=errors,
    )


def _run_cost_benefit(
    policy: CostBenefit,
    question: Question,
    rewrites: Sequence[Rewrite],
    provider: SearchProvider,
    models: ModelSet | None,
    prefs: Preferences | None,
    limit: int,
    filters: Sequence[AnswerFilter] | None,
    thresholds: Sequence[int],
) -> QuestionResult:
    if models is None or models.ensemble is None:
        raise ValueError("CostBenefit requires quality models and a threshold ensemble")
    if prefs is None:
        raise ValueError("CostBenefit requires preferences")

    scores = [models.quality_score(r) for r in rewrites]
    ordered = order_rewrites(rewrites, scores)

    errors: list[str] = []
    probe_n = min(policy.probe_size, len(ordered))
    probe = ordered[:probe_n]
    probe_snippets = _execute_all(provider, probe, limit, errors)
    probe_answers = _compose(question, probe, probe_snippets, filters)
    features = extract_run_features(
        question,
        probe,
        probe_snippets,
        probe_answers,
        weight_classes=[r.weight for r in rewrites],
    )

    decision = choose_n(models.ensemble, features.as_features(), prefs, thresholds)
    if decision.abstained:
        return QuestionResult(
            question=question,
            answers=[],
            queries_issued=probe_n,
            abstained=True,
            decision=decision,
            rewrites_used=probe,
            snippet_count=len(probe_snippets),
            backend_errors=errors,
        )

    n_effective = min(decision.n, len(ordered))
    if n_effective > probe_n:
        chosen = ordered[:n_effective]
        extra = _execute_all(provider, ordered[probe_n:n_effective], limit, errors, start=probe_n)
        snippets = probe_snippets + extra
        queries = n_effective
    else:
        # Budget does not exceed the probe: evidence is the chosen prefix,
        # but the probe queries were already spent and stay charged.
        chosen = ordered[:n_effective]
        snippets = [s for s in probe_snippets if s.rewrite_index < n_effective]
        queries = probe_n

    answers = _compose(question, chosen, snippets, filters)
    return QuestionResult(
        question=question,
        answers=answers,
        queries_issued=queries,
        decision=decision,
        rewrites_used=chosen,
        snippet_count=len(snippets),
        backend_errors=errors,
    )
