from hypothesis import given, settings
from hypothesis import strategies as st

from budgetqa.compose import (
    DEFAULT_FILTERS,
    NGramCandidate,
    applied_filter_names,
    compose_answers,
    filter_ngrams,
    load_filters,
    mine_ngrams,
    tile_ngrams,
)
from budgetqa.rewrite import QuestionType
from budgetqa.search import Snippet

from oracles import all_fixpoints, count_ngrams, stepwise_best_fixpoint

EMPTY = frozenset()


def _snip(text, idx=0):
    return Snippet(text=text, source_doc="d", rewrite_index=idx)


def _by_key(cands):
    return {c.key(): c for c in cands}


# --------------------------------------------------------------------------
# mine_ngrams


def test_single_snippet_all_ngrams_scored():
    cands = _by_key(mine_ngrams([_snip("John Wilkes Booth")], {0: 5.0}, stop=EMPTY))
    expected = {
        ("john",): 5.0,
        ("wilkes",): 5.0,
        ("booth",): 5.0,
        ("john", "wilkes"): 5.0,
        ("wilkes", "booth"): 5.0,
        ("john", "wilkes", "booth"): 5.0,
    }
    assert {k: c.score for k, c in cands.items()} == expected
    assert all(c.support == 1 for c in cands.values())


def test_scores_add_across_rewrites():
    snippets = [_snip("John Wilkes Booth", 0), _snip("John Wilkes Booth", 1)]
    cands = _by_key(mine_ngrams(snippets, {0: 5.0, 1: 1.0}, stop=EMPTY))
    assert cands[("john", "wilkes", "booth")].score == 6.0
    assert cands[("john", "wilkes", "booth")].support == 2


def test_question_tokens_are_excluded():
    cands = _by_key(
        mine_ngrams([_snip("Booth killed Abraham Lincoln")], {0: 5.0},
                    exclude=["killed", "abraham", "lincoln"], stop=EMPTY)
    )
    assert ("booth",) in cands
    assert all("killed" not in k and "abraham" not in k for k in cands)


def test_stopword_edged_ngrams_are_dropped():
    cands = _by_key(mine_ngrams([_snip("Booth was an actor")], {0: 1.0}))
    assert ("booth",) in cands and ("actor",) in cands
    assert ("booth", "was") not in cands
    assert ("was", "an", "actor") not in cands
    assert ("booth", "was", "an") not in cands


def test_majority_surface_form_reported():
    snippets = [_snip("the BOOTH story", 0), _snip("near Booth today", 0), _snip("near Booth now", 0)]
    cands = _by_key(mine_ngrams(snippets, {0: 1.0}))
    assert cands[("booth",)].tokens == ("Booth",)


def test_empty_snippets_empty_result():
    assert mine_ngrams([], {}) == []


_vocab = ["Booth", "bullet", "actor", "Wilkes", "the", "of", "President", "Ford's"]
_texts = st.lists(st.sampled_from(_vocab), min_size=1, max_size=8).map(" ".join)


@given(
    snips=st.lists(
        st.tuples(_texts, st.integers(min_value=0, max_value=2)), min_size=1, max_size=20
    )
)
@settings(deadline=None, max_examples=80)
def test_mining_matches_brute_force_oracle(snips):
    snippets = [_snip(text, idx) for text, idx in snips]
    weights = {0: 5.0, 1: 2.0, 2: 1.0}
    from budgetqa.text import default_stopwords

    stop = default_stopwords()
    mined = _by_key(mine_ngrams(snippets, weights))
    expected = count_ngrams(snippets, weights, stop=stop)
    assert {k: (c.score, c.support) for k, c in mined.items()} == expected


@given(
    snips=st.lists(
        st.tuples(_texts, st.integers(min_value=0, max_value=1)), min_size=2, max_size=12
    )
)
@settings(deadline=None, max_examples=40)
def test_mining_scores_are_exactly_additive_over_splits(snips):
    snippets = [_snip(text, idx) for text, idx in snips]
    weights = {0: 5.0, 1: 1.0}
    half = len(snippets) // 2
    whole = _by_key(mine_ngrams(snippets, weights))
    first = _by_key(mine_ngrams(snippets[:half], weights))
    second = _by_key(mine_ngrams(snippets[half:], weights))
    for key, cand in whole.items():
        total = (first[key].score if key in first else 0.0) + (
            second[key].score if key in second else 0.0
        )
        assert cand.score == total


# --------------------------------------------------------------------------
# filter_ngrams


def _cand(text, score=1.0, support=1):
    return NGramCandidate(tokens=tuple(text.split()), score=score, support=support)


def test_how_many_digits_beat_equal_scored_words():
    cands = [_cand("million people", 10.0), _cand("125 million", 10.0)]
    ranked = sorted(filter_ngrams(cands, QuestionType.HOW_MANY), key=lambda c: -c.score)
    assert ranked[0].text == "125 million"
    assert ranked[0].score > ranked[1].score


def test_who_boosts_capitals_and_demotes_dates():
    cands = [_cand("John Wilkes Booth", 10.0), _cand("April 14", 10.0)]
    out = {c.text: c.score for c in filter_ngrams(cands, QuestionType.WHO)}
    assert out["John Wilkes Booth"] == 20.0  # capital boost
    assert out["April 14"] < 10.0  # date and digit demotions beat the boost


def test_other_type_with_no_filters_is_identity():
    cands = [_cand("anything at all", 3.0), _cand("x 123", 2.0)]
    out = filter_ngrams(cands, QuestionType.OTHER)
    assert [(c.text, c.score) for c in out] == [(c.text, c.score) for c in cands]


def test_filtering_preserves_order_and_support():
    cands = [_cand("alpha", 5.0, support=2), _cand("Beta", 4.0, support=7), _cand("gamma", 3.0, support=1)]
    out = filter_ngrams(cands, QuestionType.WHO)
    assert [c.key() for c in out] == [c.key() for c in cands]
    assert [c.support for c in out] == [2, 7, 1]


def test_default_table_has_fifteen_filters():
    assert len(DEFAULT_FILTERS) == 15


def test_filters_loadable_from_config_file(tmp_path):
    path = tmp_path / "filters.json"
    path.write_text(
        '{"WHO": [{"name": "shouty", "pattern": "^[A-Z ]+$", "factor": 3.0}]}',
        encoding="utf-8",
    )
    table = load_filters(str(path))
    assert len(table) == 1
    out = filter_ngrams([_cand("LOUD NAME", 2.0)], QuestionType.WHO, table)
    assert out[0].score == 6.0


def test_applied_filter_names():
    names = applied_filter_names([_cand("John Booth", 1.0)], QuestionType.WHO)
    assert "who_capital_boost" in names


# --------------------------------------------------------------------------
# tile_ngrams


def test_paper_pair_tiles_into_full_name():
    cands = [_cand("John Wilkes", 5.0), _cand("Wilkes Booth", 5.0)]
    out = tile_ngrams(cands)
    assert out[0].text == "John Wilkes Booth"
    assert out[0].score == 10.0
    assert len(out) == 1


def test_disjoint_candidates_untouched_and_sorted():
    out = tile_ngrams([_cand("bullet", 3.0), _cand("actor", 2.0)])
    assert [c.text for c in out] == ["bullet", "actor"]


def test_subsumed_candidate_absorbed_without_token_change():
    out = tile_ngrams([_cand("John Wilkes Booth", 9.0), _cand("Wilkes Booth", 2.0)])
    assert [c.text for c in out] == ["John Wilkes Booth"]
    assert out[0].score == 11.0


def test_tiling_never_lowers_max_score():
    cands = [_cand("a b", 4.0), _cand("b c", 3.0), _cand("x", 9.0)]
    out = tile_ngrams(cands)
    assert max(c.score for c in out) >= 9.0


_keys = st.sampled_from(["a", "b", "c", "d"])
_tile_cands = st.lists(
    st.tuples(st.lists(_keys, min_size=1, max_size=3), st.integers(1, 20)),
    min_size=1,
    max_size=6,
).map(lambda items: [(tuple(k), float(s)) for k, s in items])


@given(_tile_cands)
@settings(deadline=None, max_examples=60)
def test_tiling_matches_stepwise_oracle_and_lands_on_reachable_fixpoint(cands):
    # distinct keys only: mining can never emit duplicates
    unique = {}
    for key, score in cands:
        unique.setdefault(key, score)
    cands = list(unique.items())

    produced = tile_ngrams([NGramCandidate(k, s, support=1) for k, s in cands])
    got = sorted((c.key(), c.score) for c in produced)

    oracle = stepwise_best_fixpoint(cands)
    assert got == sorted((k, s) for k, s in oracle)

    reachable = all_fixpoints(cands)
    assert tuple(sorted(got)) in reachable


@given(_tile_cands)
@settings(deadline=None, max_examples=40)
def test_tiled_answers_reconstructible_from_inputs(cands):
    unique = {}
    for key, score in cands:
        unique.setdefault(key, score)
    inputs = [NGramCandidate(k, s, support=1) for k, s in unique.items()]
    total_before = sum(c.score for c in inputs)
    out = tile_ngrams(inputs)
    # merging conserves total score, and every output key is a join of inputs
    assert abs(sum(c.score for c in out) - total_before) < 1e-9
    input_keys = set(unique)
    for cand in out:
        key = cand.key()
        if key in input_keys:
            continue
        # must contain at least one input key as a contiguous subsequence
        assert any(
            key[i : i + len(k)] == k
            for k in input_keys
            for i in range(len(key) - len(k) + 1)
        )


# --------------------------------------------------------------------------
# compose_answers


def test_compose_is_deterministic(lincoln_provider):
    from budgetqa.control import AllRewrites, run_policy

    first = run_policy(AllRewrites(), "Who killed Abraham Lincoln?", lincoln_provider)
    second = run_policy(AllRewrites(), "Who killed Abraham Lincoln?", lincoln_provider)
    assert [(c.text, c.score) for c in first.answers] == [
        (c.text, c.score) for c in second.answers
    ]


def test_compose_empty_snippets():
    assert compose_answers([], {}, QuestionType.WHO) == []


def test_support_conserved_through_filtering():
    cands = [_cand("John Booth", 4.0, support=3), _cand("april", 2.0, support=5)]
    out = filter_ngrams(cands, QuestionType.WHO)
    assert sum(c.support for c in out) == 8
