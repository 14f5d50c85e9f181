"""Command-line interface.

Subcommands: index, ask, train, evaluate, gen-bench.
Exit codes: 0 success or abstain, 1 usage error, 2 data error, 3 backend error.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import bench, evaluation, harness
from .config import load_config
from .control import (
    AllRewrites,
    ConjunctiveOnly,
    CostBenefit,
    LikelihoodN,
    Policy,
    RandomN,
    run_policy,
)
from .errors import (
    BudgetQAError,
    ConfigError,
    DatasetParseError,
    IncompleteEnsemble,
    ProviderError,
    RetryableError,
)
from .models import ModelSet, save_ensemble, train_threshold_ensemble
from .search import DEFAULT_WINDOW, build_index, load_corpus, save_index
from .tree import describe_tree, save_tree, train_tree

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


@click.group()
def cli():
    """Factoid question answering with budgeted query submission."""


_config_option = click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")


def _policy_from_flags(policy: str, n: int | None, seed: int) -> Policy:
    if policy == "random":
        return RandomN(n=n or 1, seed=seed)
    if policy == "likelihood":
        return LikelihoodN(n=n or 3)
    if policy == "conjunctive":
        return ConjunctiveOnly()
    if policy == "all":
        return AllRewrites()
    return CostBenefit()


def _load_models(cfg) -> ModelSet | None:
    if not cfg.models_dir:
        return None
    return ModelSet.load_dir(cfg.models_dir, scorer=cfg.grammar_scorer())


@cli.command("index")
@click.option("--corpus", "corpus_path", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--window", type=int, default=None, help="Snippet window in words each side.")
def cmd_index(corpus_path: str, out_path: str, window: int | None):
    """Build the offline inverted index from a JSONL corpus."""
    docs = load_corpus(corpus_path)
    index = build_index(docs, window=window or DEFAULT_WINDOW)
    save_index(index, out_path)
    click.echo(f"indexed {len(docs)} documents -> {out_path}")


@cli.command("ask")
@click.argument("question")
@_config_option
@click.option("--policy", type=click.Choice(["random", "likelihood", "conjunctive", "all", "cost-benefit"]), default="all")
@click.option("--n", type=int, default=None, help="Budget for random/likelihood policies.")
@click.option("--seed", type=int, default=None)
@click.option("--k", type=float, default=None, help="Answer value as a multiple of query cost.")
@click.option("--c", type=float, default=None, help="Cost per query.")
@click.option("--corpus", "corpus_path", type=click.Path(), default=None)
@click.option("--index", "index_path", type=click.Path(), default=None)
@click.option("--models", "models_dir", type=click.Path(), default=None)
@click.option("--scorer", type=click.Choice(["default", "adjacency"]), default=None,
              help="Grammar scorer; must match the one used to build training runs.")
@click.option("--top", type=int, default=5, help="Ranked answers to print.")
def cmd_ask(question, config_path, policy, n, seed, k, c, corpus_path, index_path, models_dir,
            scorer, top):
    """Answer one question with the configured policy."""
    cfg = load_config(
        config_path, corpus=corpus_path, index=index_path, models_dir=models_dir, k=k, c=c,
        seed=seed, scorer=scorer,
    )
    provider = cfg.make_provider()
    models = _load_models(cfg)
    chosen = _policy_from_flags(policy, n, cfg.seed)
    if isinstance(chosen, CostBenefit):
        chosen = CostBenefit(probe_size=cfg.probe_size)
    result = run_policy(
        chosen,
        question,
        provider,
        models,
        cfg.preferences,
        limit=cfg.limit,
        filters=cfg.filter_table(),
        thresholds=cfg.thresholds,
        phrasal_weight=cfg.phrasal_weight,
        conjunctive_weight=cfg.conjunctive_weight,
    )

    if result.decision is not None:
        prefs = cfg.preferences
        click.echo("threshold  p(correct)  expected value  cost  net")
        for t in sorted(result.decision.per_threshold_net):
            net = result.decision.per_threshold_net[t]
            cost = t * prefs.c
            expected = net + cost
            p = expected / (prefs.k * prefs.c)
            click.echo(f"{t:>9}  {p:>10.3f}  {expected:>14.3f}  {cost:>4g}  {net:>8.3f}")

    if result.abstained:
        click.echo("status: ABSTAINED")
        click.echo(
            "No query budget has positive expected value. "
            "Please try reformulating the question."
        )
        click.echo(f"queries issued: {result.queries_issued}")
        return
    click.echo(f"status: ANSWERED  queries issued: {result.queries_issued}")
    if result.decision is not None:
        click.echo(f"chosen budget: {result.decision.n} (net {result.decision.expected_net:.3f})")
    for i, cand in enumerate(result.answers[:top], start=1):
        click.echo(f"{i:>2}. {cand.text}  (score {cand.score:g}, support {cand.support})")
    if not result.answers:
        click.echo("no answer candidates")


@cli.command("train")
@click.option("--runs", "runs_path", type=click.Path(), required=True, help="Training runs JSONL.")
@click.option("--kind", type=click.Choice(["quality-conj", "quality-phrasal", "thresholds"]), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--min-gain", type=float, default=None)
@click.option("--min-leaf", type=int, default=None)
def cmd_train(runs_path, kind, out_path, min_gain, min_leaf):
    """Train models from recorded runs and serialize them."""
    from .tree import TreeConfig

    cfg = TreeConfig(
        min_gain=min_gain if min_gain is not None else TreeConfig.min_gain,
        min_leaf=min_leaf if min_leaf is not None else TreeConfig.min_leaf,
    )
    if kind == "thresholds":
        cases = harness.read_threshold_runs(runs_path)
        ensemble = train_threshold_ensemble(cases, cfg)
        save_ensemble(ensemble, out_path)
        click.echo(f"trained {len(ensemble.trees)} threshold models -> {out_path}")
        for t in ensemble.thresholds:
            click.echo(f"-- threshold {t} --")
            click.echo(describe_tree(ensemble.trees[t]))
    else:
        which = "conjunctive" if kind == "quality-conj" else "phrasal"
        cases = harness.read_quality_runs(runs_path, which)
        tree = train_tree(cases, cfg)
        save_tree(tree, out_path)
        click.echo(f"trained {which} quality model on {len(cases)} cases -> {out_path}")
        click.echo(describe_tree(tree))


@cli.command("evaluate")
@click.option("--dataset", "dataset_path", type=click.Path(), required=True)
@_config_option
@click.option("--policy", type=click.Choice(["random", "likelihood", "conjunctive", "all", "cost-benefit"]), default="cost-benefit")
@click.option("--n", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--k", type=float, default=None)
@click.option("--c", type=float, default=None)
@click.option("--corpus", "corpus_path", type=click.Path(), default=None)
@click.option("--index", "index_path", type=click.Path(), default=None)
@click.option("--models", "models_dir", type=click.Path(), default=None)
@click.option("--scorer", type=click.Choice(["default", "adjacency"]), default=None,
              help="Grammar scorer; must match the one used to build training runs.")
@click.option("--sweep-k", "sweep_k_values", default=None, help="Comma-separated k values.")
@click.option("--sweep-n", "sweep_n_flag", is_flag=True, help="Random vs likelihood over the threshold set.")
@click.option("--seeds", default="0,1,2", help="Random-order seeds for --sweep-n.")
@click.option("--jobs", type=int, default=None, help="Parallel questions (default: cpu count, capped).")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write reports as JSONL.")
def cmd_evaluate(dataset_path, config_path, policy, n, seed, k, c, corpus_path, index_path,
                 models_dir, scorer, sweep_k_values, sweep_n_flag, seeds, jobs, out_path):
    """Evaluate a policy (or run a sweep) over a dataset."""
    cfg = load_config(
        config_path, corpus=corpus_path, index=index_path, models_dir=models_dir, k=k, c=c,
        seed=seed, scorer=scorer,
    )
    dataset = evaluation.load_dataset(dataset_path)
    if not dataset:
        raise DatasetParseError("dataset is empty")
    provider = cfg.make_provider()
    models = _load_models(cfg)
    if jobs is None:
        jobs = min(os.cpu_count() or 1, cfg.max_in_flight)

    reports = []
    if sweep_k_values:
        ks = [float(v) for v in sweep_k_values.split(",") if v.strip()]
        results = evaluation.sweep_k(
            dataset, provider, models, ks, cfg.c, limit=cfg.limit, jobs=jobs,
            thresholds=cfg.thresholds,
        )
        click.echo(evaluation.render_k_sweep(results))
        reports = [r for _, r in results]
    elif sweep_n_flag:
        seed_list = [int(s) for s in seeds.split(",") if s.strip()]
        rows = evaluation.sweep_n(
            dataset, provider, models, cfg.thresholds, seed_list, limit=cfg.limit, jobs=jobs
        )
        click.echo(evaluation.render_n_sweep(rows))
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                for row in rows:
                    fh.write(json.dumps(row) + "\n")
            click.echo(f"wrote {len(rows)} row(s) -> {out_path}")
    else:
        chosen = _policy_from_flags(policy, n, cfg.seed)
        if isinstance(chosen, CostBenefit):
            chosen = CostBenefit(probe_size=cfg.probe_size)
        report = evaluation.evaluate(
            chosen, dataset, provider, models, cfg.preferences,
            limit=cfg.limit, jobs=jobs, thresholds=cfg.thresholds,
        )
        click.echo(evaluation.render_reports([report]))
        reports = [report]
    if out_path and reports:
        evaluation.write_reports_jsonl(reports, out_path)
        click.echo(f"wrote {len(reports)} report(s) -> {out_path}")


@cli.command("gen-bench")
@click.option("--questions", type=int, default=100)
@click.option("--redundancy", type=int, default=3)
@click.option("--distractors", type=int, default=40)
@click.option("--seed", type=int, default=0)
@click.option("--out-corpus", type=click.Path(), required=True)
@click.option("--out-dataset", type=click.Path(), required=True)
def cmd_gen_bench(questions, redundancy, distractors, seed, out_corpus, out_dataset):
    """Generate a synthetic benchmark corpus and dataset."""
    from .search import save_corpus

    result = bench.generate_benchmark(
        questions, redundancy=redundancy, distractors=distractors, seed=seed
    )
    save_corpus(result.corpus, out_corpus)
    evaluation.dump_dataset(result.items, out_dataset)
    click.echo(
        f"{len(result.items)} questions, {len(result.corpus)} documents -> "
        f"{out_dataset}, {out_corpus}"
    )


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except (DatasetParseError, ConfigError, IncompleteEnsemble) as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except (RetryableError, ProviderError) as exc:
        click.echo(f"backend error: {exc}", err=True)
        return EXIT_BACKEND
    except (BudgetQAError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
