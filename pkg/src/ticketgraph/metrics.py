"""Ranking and answer-quality metrics.

All functions are pure, bounded in [0, 1], and defined for degenerate
inputs (empty rankings, empty strings) so the harness can run them over
arbitrary data. Text metrics tokenize by lowercasing and splitting on
non-alphanumeric characters.
"""

from __future__ import annotations

import math
import re
from collections import Counter

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# ROUGE-L weights recall over precision.
ROUGE_BETA = 1.2

# METEOR fragmentation penalty parameters: penalty = gamma * (chunks/m)^beta.
METEOR_GAMMA = 0.5
METEOR_BETA = 3.0


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def reciprocal_rank(ranking: list[str], gold: set[str]) -> float:
    for position, item in enumerate(ranking, start=1):
        if item in gold:
            return 1.0 / position
    return 0.0


def mrr(rankings: list[list[str]], gold_sets: list[set[str]]) -> float:
    """Mean reciprocal rank of the first relevant item; 0 when absent."""
    if len(rankings) != len(gold_sets):
        raise ValueError("rankings and gold sets must align")
    if not rankings:
        return 0.0
    total = sum(reciprocal_rank(r, g) for r, g in zip(rankings, gold_sets))
    return total / len(rankings)


def hit_at_k(ranking: list[str], gold: set[str], k: int) -> float:
    return 1.0 if any(item in gold for item in ranking[:k]) else 0.0


def recall_at_k(rankings: list[list[str]], gold_sets: list[set[str]], k: int) -> float:
    """Fraction of queries with at least one relevant item in the top k."""
    if len(rankings) != len(gold_sets):
        raise ValueError("rankings and gold sets must align")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not rankings:
        return 0.0
    total = sum(hit_at_k(r, g, k) for r, g in zip(rankings, gold_sets))
    return total / len(rankings)


def ndcg_single(ranking: list[str], gold: set[str], k: int) -> float:
    """Binary-gain NDCG@k for one query.

    A duplicated item in the ranking gains only at its first position, so
    the result stays within [0, 1] even for ill-formed rankings.
    """
    if not gold:
        return 0.0
    seen: set[str] = set()
    dcg = 0.0
    for position, item in enumerate(ranking[:k], start=1):
        if item in gold and item not in seen:
            seen.add(item)
            dcg += 1.0 / math.log2(position + 1)
    ideal = sum(
        1.0 / math.log2(position + 1)
        for position in range(1, min(k, len(gold)) + 1)
    )
    return dcg / ideal if ideal > 0 else 0.0


def ndcg_at_k(rankings: list[list[str]], gold_sets: list[set[str]], k: int) -> float:
    if len(rankings) != len(gold_sets):
        raise ValueError("rankings and gold sets must align")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not rankings:
        return 0.0
    total = sum(ndcg_single(r, g, k) for r, g in zip(rankings, gold_sets))
    return total / len(rankings)


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: str, reference: str, max_n: int = 4) -> float:
    """BLEU with uniform n-gram weights and brevity penalty.

    Add-one smoothing applies only to orders with zero matches (or no
    n-grams at all), so identical strings score exactly 1.0. Zero unigram
    overlap scores exactly 0.0.
    """
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0

    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_counts = _ngram_counts(cand, n)
        ref_counts = _ngram_counts(ref, n)
        total = sum(cand_counts.values())
        matched = sum(
            min(count, ref_counts[gram]) for gram, count in cand_counts.items()
        )
        if n == 1 and matched == 0:
            return 0.0
        if matched == 0 or total == 0:
            precision = (matched + 1.0) / (total + 1.0)
        else:
            precision = matched / total
        log_sum += math.log(precision) / max_n

    if len(cand) >= len(ref):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(ref) / len(cand))
    return brevity * math.exp(log_sum)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0] * (len(b) + 1)
        for j, other in enumerate(b, start=1):
            if token == other:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[-1]


def rouge_l(candidate: str, reference: str, beta: float = ROUGE_BETA) -> float:
    """Longest-common-subsequence F-measure."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    beta_sq = beta * beta
    return (1 + beta_sq) * precision * recall / (recall + beta_sq * precision)


def _align_unigrams(cand: list[str], ref: list[str]) -> list[tuple[int, int]]:
    # Greedy in-order matching: each candidate token takes the earliest
    # unused reference occurrence of itself.
    used: set[int] = set()
    positions: dict[str, list[int]] = {}
    for j, token in enumerate(ref):
        positions.setdefault(token, []).append(j)
    alignment: list[tuple[int, int]] = []
    for i, token in enumerate(cand):
        for j in positions.get(token, ()):
            if j not in used:
                used.add(j)
                alignment.append((i, j))
                break
    return alignment


def meteor_simple(candidate: str, reference: str) -> float:
    """Exact-match METEOR: unigram F-mean with a fragmentation penalty.

    No stemming or synonym stage; greedy earliest-position alignment. The
    simplified form is reported as "meteor_simple" wherever it appears.
    """
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    alignment = _align_unigrams(cand, ref)
    m = len(alignment)
    if m == 0:
        return 0.0
    precision = m / len(cand)
    recall = m / len(ref)
    f_mean = 10.0 * precision * recall / (recall + 9.0 * precision)
    chunks = 1
    for (ci, rj), (pi, pj) in zip(alignment[1:], alignment[:-1]):
        if ci != pi + 1 or rj != pj + 1:
            chunks += 1
    penalty = METEOR_GAMMA * (chunks / m) ** METEOR_BETA
    return f_mean * (1.0 - penalty)
