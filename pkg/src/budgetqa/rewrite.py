"""Question analysis and query rewrite generation.

A question is turned into a weighted set of search-engine queries: several
exact-phrase rewrites built by moving the (auxiliary) verb through the
remaining tokens, one passive construction when the main verb looks like a
past participle, and a single conjunctive back-off that ANDs every question
word. Phrasal rewrites carry an answer slot marking the side on which the
answer text is expected to appear in matching documents.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Protocol

from .errors import WrongRewriteKind
from .text import AUXILIARIES, default_stopwords, token_key, tokenize

DEFAULT_PHRASAL_WEIGHT = 5.0
DEFAULT_CONJUNCTIVE_WEIGHT = 1.0
DEFAULT_MAX_PHRASAL = 8


class QuestionType(Enum):
    WHO = "who"
    WHAT = "what"
    WHEN = "when"
    WHERE = "where"
    HOW_MANY = "how_many"
    HOW_LONG = "how_long"
    OTHER = "other"


class RewriteKind(Enum):
    PHRASAL = "phrasal"
    CONJUNCTIVE = "conjunctive"


class AnswerSlot(Enum):
    LEFT = "left"
    RIGHT = "right"
    NONE = "none"


@dataclass(frozen=True)
class Question:
    raw_text: str
    tokens: tuple[str, ...]
    qtype: QuestionType

    @classmethod
    def from_text(cls, text: str) -> "Question":
        tokens = tuple(tokenize(text))
        return cls(raw_text=text, tokens=tokens, qtype=classify_tokens(tokens))

    def token_keys(self) -> frozenset[str]:
        return frozenset(token_key(t) for t in self.tokens)


@dataclass(frozen=True)
class Rewrite:
    """One search-engine query derived from a question.

    ``parts`` is an ordered tuple of phrase strings. A phrasal rewrite has a
    single multi-word part; a conjunctive rewrite has one part per term (a
    part may itself be a short phrase, in which case it must match
    contiguously).
    """

    kind: RewriteKind
    parts: tuple[str, ...]
    answer_slot: AnswerSlot
    weight: float

    def as_query(self) -> str:
        """Serialize into engine query syntax: quoted phrases, bare terms."""
        rendered = []
        for part in self.parts:
            rendered.append(f'"{part}"' if " " in part else part)
        return " ".join(rendered)

    def all_words(self) -> list[str]:
        words: list[str] = []
        for part in self.parts:
            words.extend(part.split())
        return words


def classify_tokens(tokens: tuple[str, ...]) -> QuestionType:
    """Question type from the leading token(s)."""
    if not tokens:
        return QuestionType.OTHER
    head = token_key(tokens[0])
    if head == "who":
        return QuestionType.WHO
    if head == "when":
        return QuestionType.WHEN
    if head == "where":
        return QuestionType.WHERE
    if head == "what":
        return QuestionType.WHAT
    if head == "how" and len(tokens) > 1:
        second = token_key(tokens[1])
        if second == "many":
            return QuestionType.HOW_MANY
        if second == "long":
            return QuestionType.HOW_LONG
    return QuestionType.OTHER


def classify_question(q: Question) -> QuestionType:
    return classify_tokens(q.tokens)


_WH_STRIP = {
    QuestionType.WHO: 1,
    QuestionType.WHAT: 1,
    QuestionType.WHEN: 1,
    QuestionType.WHERE: 1,
    QuestionType.HOW_MANY: 2,
    QuestionType.HOW_LONG: 2,
    QuestionType.OTHER: 0,
}


def generate_rewrites(
    q: Question,
    *,
    phrasal_weight: float = DEFAULT_PHRASAL_WEIGHT,
    conjunctive_weight: float = DEFAULT_CONJUNCTIVE_WEIGHT,
    max_phrasal: int = DEFAULT_MAX_PHRASAL,
) -> list[Rewrite]:
    """All phrasal rewrites for a question plus the conjunctive back-off.

    The verb-placement scheme: drop the wh prefix, take the next token as the
    verb (an auxiliary when present), and emit one quoted phrase per insertion
    position of that verb among the remaining tokens. The phrase starting with
    the verb gets a LEFT answer slot, the others RIGHT. When the verb is a
    plain past form (ends in "ed") a passive construction
    "<rest> was <verb> by" is added as well. Phrasal output is capped at
    ``max_phrasal``; the conjunctive rewrite is always emitted, last.

    Sentence-initial capitalization carries no signal, so the first question
    token is lowercased before it enters any rewrite.
    """
    if phrasal_weight <= conjunctive_weight:
        raise ValueError("phrasal weight must exceed conjunctive weight")
    tokens = list(q.tokens)
    tokens[0] = tokens[0].lower()

    conjunctive = Rewrite(
        kind=RewriteKind.CONJUNCTIVE,
        parts=tuple(tokens),
        answer_slot=AnswerSlot.NONE,
        weight=conjunctive_weight,
    )
    if len(tokens) < 2:
        return [conjunctive]

    remaining = tokens[_WH_STRIP[q.qtype] :]
    phrases: list[tuple[str, AnswerSlot]] = []
    if remaining:
        verb, rest = remaining[0], remaining[1:]
        for i in range(len(rest) + 1):
            phrase_tokens = rest[:i] + [verb] + rest[i:]
            slot = AnswerSlot.LEFT if i == 0 else AnswerSlot.RIGHT
            phrases.append((" ".join(phrase_tokens), slot))
        if rest and verb.lower().endswith("ed") and verb.lower() not in AUXILIARIES:
            phrases.append((" ".join(rest + ["was", verb, "by"]), AnswerSlot.RIGHT))

    rewrites = [
        Rewrite(RewriteKind.PHRASAL, (phrase,), slot, phrasal_weight)
        for phrase, slot in phrases[:max_phrasal]
    ]
    rewrites.append(conjunctive)
    return rewrites


# --------------------------------------------------------------------------
# Rewrite features


@dataclass(frozen=True)
class ConjFeatures:
    longphrase: int
    longwd: int
    numcap: int
    numphrases: int
    numstop: int
    numwords: int
    pctstop: float

    def as_features(self) -> dict[str, float]:
        return {
            "longphrase": float(self.longphrase),
            "longwd": float(self.longwd),
            "numcap": float(self.numcap),
            "numphrases": float(self.numphrases),
            "numstop": float(self.numstop),
            "numwords": float(self.numwords),
            "pctstop": self.pctstop,
        }


@dataclass(frozen=True)
class PhrasalFeatures:
    numcap: int
    numstop: int
    pctstop: float
    primary_parses: int
    secondary_parses: int
    sgm: float

    def as_features(self) -> dict[str, float]:
        return {
            "numcap": float(self.numcap),
            "numstop": float(self.numstop),
            "pctstop": self.pctstop,
            "primary_parses": float(self.primary_parses),
            "secondary_parses": float(self.secondary_parses),
            "sgm": self.sgm,
        }


def _count_stats(words: list[str], stop: frozenset[str]) -> tuple[int, int, float, int]:
    numcap = sum(1 for w in words if w[:1].isupper())
    numstop = sum(1 for w in words if token_key(w) in stop)
    numwords = len(words)
    pctstop = numstop / numwords if numwords else 0.0
    return numcap, numstop, pctstop, numwords


def conjunctive_features(r: Rewrite, stop: frozenset[str] | None = None) -> ConjFeatures:
    """The seven count features, computable for any rewrite kind."""
    stop = stop if stop is not None else default_stopwords()
    words = r.all_words()
    numcap, numstop, pctstop, numwords = _count_stats(words, stop)
    return ConjFeatures(
        longphrase=max((len(p.split()) for p in r.parts), default=0),
        longwd=max((len(w) for w in words), default=0),
        numcap=numcap,
        numphrases=len(r.parts),
        numstop=numstop,
        numwords=numwords,
        pctstop=pctstop,
    )


class GrammarScorer(Protocol):
    """Pluggable stand-in for a statistical parser.

    Implementations must be safe for concurrent read-only use and return
    ``(primary_parses, secondary_parses, sgm)`` for a phrase, with sgm the
    grammaticality score.
    """

    def score(self, phrase: str) -> tuple[int, int, float]: ...


def _looks_verbal(key: str) -> bool:
    return key in AUXILIARIES or key.endswith("ed") or key.endswith("ing")


class HeuristicGrammarScorer:
    """Default scorer: penalize stop-word density and verbless fragments."""

    def __init__(self, pctstop_penalty: float = 0.5, frag_penalty: float = 0.25):
        self.pctstop_penalty = pctstop_penalty
        self.frag_penalty = frag_penalty

    def score(self, phrase: str) -> tuple[int, int, float]:
        words = phrase.split()
        stop = default_stopwords()
        numstop = sum(1 for w in words if token_key(w) in stop)
        pctstop = numstop / len(words) if words else 0.0
        sgm = 1.0 - self.pctstop_penalty * pctstop
        if not any(_looks_verbal(token_key(w)) for w in words):
            sgm -= self.frag_penalty
        return 1, 0, min(1.0, max(0.0, sgm))


_DETERMINERS = frozenset({"the", "a", "an", "this", "that", "these", "those"})
_AUX_LIKE = AUXILIARIES | frozenset({"has", "have", "had", "will", "would", "can", "could"})


class AdjacencyGrammarScorer:
    """Word-order-sensitive scorer.

    Counts implausible adjacencies so that the verb-insertion variants of one
    question, which share every count feature, still receive distinct
    grammaticality scores. Violations: a leading auxiliary, a determiner
    followed directly by an auxiliary or past form, two adjacent auxiliaries,
    and a past form not introduced by an auxiliary (unless phrase-initial).
    The violation count is exposed as secondary_parses.
    """

    def __init__(self, violation_penalty: float = 0.35):
        self.violation_penalty = violation_penalty

    def score(self, phrase: str) -> tuple[int, int, float]:
        keys = [token_key(w) for w in phrase.split()]
        violations = 0
        if keys and keys[0] in _AUX_LIKE:
            violations += 1
        for prev, cur in zip(keys, keys[1:]):
            if prev in _DETERMINERS and (cur in _AUX_LIKE or cur.endswith("ed")):
                violations += 1
            elif prev in _AUX_LIKE and cur in _AUX_LIKE:
                violations += 1
            elif cur.endswith("ed") and cur not in _AUX_LIKE and prev not in _AUX_LIKE:
                if prev not in _DETERMINERS:  # determiner case already counted
                    violations += 1
        sgm = max(0.0, 1.0 - self.violation_penalty * violations)
        return 1, violations, sgm


class StubGrammarScorer:
    """Returns a fixed triple; used in tests and as a wiring check."""

    def __init__(self, primary: int = 1, secondary: int = 0, sgm: float = 0.5):
        self.triple = (primary, secondary, sgm)

    def score(self, phrase: str) -> tuple[int, int, float]:
        return self.triple


SCORERS = {
    "default": HeuristicGrammarScorer,
    "adjacency": AdjacencyGrammarScorer,
}


def phrasal_features(
    r: Rewrite,
    scorer: GrammarScorer | None = None,
    stop: frozenset[str] | None = None,
) -> PhrasalFeatures:
    """Count features plus parse-derived features for a phrasal rewrite."""
    if r.kind is not RewriteKind.PHRASAL:
        raise WrongRewriteKind("phrasal features require a PHRASAL rewrite")
    stop = stop if stop is not None else default_stopwords()
    scorer = scorer if scorer is not None else HeuristicGrammarScorer()
    words = r.all_words()
    numcap, numstop, pctstop, _ = _count_stats(words, stop)
    primary, secondary, sgm = scorer.score(r.parts[0])
    return PhrasalFeatures(
        numcap=numcap,
        numstop=numstop,
        pctstop=pctstop,
        primary_parses=primary,
        secondary_parses=secondary,
        sgm=sgm,
    )
