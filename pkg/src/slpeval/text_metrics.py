"""Back-translation text metrics: BLEU-1..4, CHRF, ROUGE-L, and WER.

All metrics take id-aligned hypothesis/reference corpora and report
percentages. BLEU pools n-gram counts over the corpus (no smoothing: a zero
precision at any order zeroes the score). CHRF pools character n-gram counts
per order and averages the per-order F-scores. ROUGE-L averages per-sentence
LCS F1. WER is token-level Levenshtein with unit costs, with the full
substitution/deletion/insertion decomposition and per-sentence alignment
traces retained, so rates above 100 are possible and expected for verbose
hypotheses.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

__all__ = [
    "EditOp",
    "SentenceEdits",
    "TextScore",
    "TokenizedCorpus",
    "WerBreakdown",
    "bleu_corpus",
    "chrf",
    "length_error_correlation",
    "rouge_l",
    "text_scores",
    "tokenize",
    "top_error_words",
    "wer",
]

CHRF_MAX_ORDER = 6
CHRF_BETA = 2.0

#: one aligned token pair: (op, ref_token, hyp_token); absent side is None
EditOp = tuple[str, str | None, str | None]


def tokenize(sentence: str) -> list[str]:
    """Lowercase and split on whitespace runs; punctuation stays attached."""
    return sentence.lower().split()


@dataclass(frozen=True)
class TokenizedCorpus:
    raw: tuple[str, ...]
    sentences: tuple[tuple[str, ...], ...]

    @classmethod
    def from_raw(cls, sentences: list[str]) -> "TokenizedCorpus":
        return cls(
            raw=tuple(sentences),
            sentences=tuple(tuple(tokenize(s)) for s in sentences),
        )

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class SentenceEdits:
    substitutions: int
    deletions: int
    insertions: int
    ref_tokens: int
    ops: tuple[EditOp, ...]

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions


@dataclass(frozen=True)
class WerBreakdown:
    substitutions: int
    deletions: int
    insertions: int
    ref_tokens: int
    rate: float
    per_sentence: tuple[SentenceEdits, ...]


@dataclass(frozen=True)
class TextScore:
    bleu: tuple[float, float, float, float]
    chrf: float
    rouge: float
    wer: WerBreakdown


def _check_paired(hyps: TokenizedCorpus, refs: TokenizedCorpus) -> None:
    if len(hyps) != len(refs):
        raise ValueError(f"corpus sizes differ: {len(hyps)} hypotheses vs {len(refs)} references")
    if len(refs) == 0:
        raise ValueError("empty corpus")


def _ngram_counts(tokens: tuple[str, ...], n: int) -> Counter:
    return Counter(tokens[i : i + n] for i in range(len(tokens) - n + 1))


def bleu_corpus(
    hyps: TokenizedCorpus, refs: TokenizedCorpus, max_n: int = 4
) -> tuple[float, ...]:
    """Corpus BLEU-1..max_n as percentages.

    BLEU-n is the geometric mean of the clipped modified precisions of orders
    1..n times the brevity penalty exp(1 - r/c) when the hypothesis corpus is
    shorter than the reference corpus.
    """
    if not 1 <= max_n <= 4:
        raise ValueError(f"max_n must be in 1..4, got {max_n}")
    _check_paired(hyps, refs)

    matched = [0] * max_n
    total = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps.sentences, refs.sentences):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            hyp_counts = _ngram_counts(hyp, n)
            if not hyp_counts:
                continue
            ref_counts = _ngram_counts(ref, n)
            total[n - 1] += sum(hyp_counts.values())
            matched[n - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in hyp_counts.items()
            )

    precisions = [m / t if t else 0.0 for m, t in zip(matched, total)]
    brevity = 1.0 if hyp_len >= ref_len or hyp_len == 0 else math.exp(1.0 - ref_len / hyp_len)

    scores = []
    for n in range(1, max_n + 1):
        if any(p == 0.0 for p in precisions[:n]):
            scores.append(0.0)
        else:
            log_mean = sum(math.log(p) for p in precisions[:n]) / n
            scores.append(100.0 * brevity * math.exp(log_mean))
    return tuple(scores)


def _char_stream(sentence: str) -> str:
    # whitespace is excluded from the character stream entirely
    return "".join(sentence.split())


def chrf(hyps: TokenizedCorpus, refs: TokenizedCorpus) -> float:
    """Character n-gram F-beta averaged over orders 1..6, beta = 2.

    Precision and recall per order come from corpus-pooled counts. Orders
    with no n-grams on either side (corpora shorter than the order) do not
    enter the average.
    """
    _check_paired(hyps, refs)
    per_order = []
    for n in range(1, CHRF_MAX_ORDER + 1):
        matched = 0
        total_hyp = 0
        total_ref = 0
        for hyp, ref in zip(hyps.raw, refs.raw):
            hyp_counts = _ngram_counts(tuple(_char_stream(hyp)), n)
            ref_counts = _ngram_counts(tuple(_char_stream(ref)), n)
            total_hyp += sum(hyp_counts.values())
            total_ref += sum(ref_counts.values())
            matched += sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
        if total_hyp == 0 and total_ref == 0:
            continue
        precision = matched / total_hyp if total_hyp else 0.0
        recall = matched / total_ref if total_ref else 0.0
        beta_sq = CHRF_BETA * CHRF_BETA
        denom = beta_sq * precision + recall
        per_order.append((1 + beta_sq) * precision * recall / denom if denom > 0 else 0.0)
    if not per_order:
        raise ValueError("empty corpora: no character n-grams on either side")
    return 100.0 * sum(per_order) / len(per_order)


def _lcs_length(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for tok_a in a:
        cur = [0]
        for j, tok_b in enumerate(b):
            if tok_a == tok_b:
                cur.append(prev[j] + 1)
            else:
                cur.append(max(prev[j + 1], cur[-1]))
        prev = cur
    return prev[-1]


def rouge_l(hyps: TokenizedCorpus, refs: TokenizedCorpus) -> float:
    """Sentence-level LCS F1 over tokens, arithmetic-averaged, as a percentage."""
    _check_paired(hyps, refs)
    f_sum = 0.0
    for hyp, ref in zip(hyps.sentences, refs.sentences):
        if not hyp and not ref:
            f_sum += 1.0
            continue
        lcs = _lcs_length(hyp, ref)
        precision = lcs / len(hyp) if hyp else 0.0
        recall = lcs / len(ref) if ref else 0.0
        if precision + recall > 0:
            f_sum += 2.0 * precision * recall / (precision + recall)
    return 100.0 * f_sum / len(hyps)


def _align_sentence(hyp: tuple[str, ...], ref: tuple[str, ...]) -> SentenceEdits:
    rows = len(ref) + 1
    cols = len(hyp) + 1
    dist = [[0] * cols for _ in range(rows)]
    for i in range(1, rows):
        dist[i][0] = i
    for j in range(1, cols):
        dist[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            if ref[i - 1] == hyp[j - 1]:
                dist[i][j] = dist[i - 1][j - 1]
            else:
                dist[i][j] = 1 + min(dist[i - 1][j - 1], dist[i - 1][j], dist[i][j - 1])

    # backtrace; on cost ties prefer substitution, then deletion, then insertion
    ops: list[EditOp] = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and dist[i][j] == dist[i - 1][j - 1]:
            ops.append(("match", ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + 1:
            ops.append(("sub", ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            ops.append(("del", ref[i - 1], None))
            i -= 1
        else:
            ops.append(("ins", None, hyp[j - 1]))
            j -= 1
    ops.reverse()
    counts = Counter(op for op, _, _ in ops)
    return SentenceEdits(
        substitutions=counts["sub"],
        deletions=counts["del"],
        insertions=counts["ins"],
        ref_tokens=len(ref),
        ops=tuple(ops),
    )


def wer(hyps: TokenizedCorpus, refs: TokenizedCorpus) -> WerBreakdown:
    """Word error rate with full error decomposition and alignment traces."""
    _check_paired(hyps, refs)
    per_sentence = tuple(
        _align_sentence(hyp, ref) for hyp, ref in zip(hyps.sentences, refs.sentences)
    )
    subs = sum(s.substitutions for s in per_sentence)
    dels = sum(s.deletions for s in per_sentence)
    ins = sum(s.insertions for s in per_sentence)
    ref_tokens = sum(s.ref_tokens for s in per_sentence)
    if ref_tokens == 0:
        raise ValueError("empty reference corpus: no reference tokens")
    return WerBreakdown(
        substitutions=subs,
        deletions=dels,
        insertions=ins,
        ref_tokens=ref_tokens,
        rate=100.0 * (subs + dels + ins) / ref_tokens,
        per_sentence=per_sentence,
    )


def top_error_words(breakdown: WerBreakdown, k: int) -> list[tuple[str, int]]:
    """Reference tokens most often substituted or deleted.

    Sorted by descending count, ties lexicographically; the top ``k`` returned.
    """
    counts: Counter[str] = Counter()
    for sentence in breakdown.per_sentence:
        for op, ref_token, _ in sentence.ops:
            if op in ("sub", "del"):
                counts[ref_token] += 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


def length_error_correlation(
    ref_lengths: list[int], rates: list[float]
) -> float | None:
    """Pearson correlation between reference length and per-sentence error rate.

    Returns None (absent) when fewer than two points or either variable has
    zero variance.
    """
    if len(ref_lengths) != len(rates):
        raise ValueError("length/rate lists differ in size")
    n = len(ref_lengths)
    if n < 2:
        return None
    mean_x = sum(ref_lengths) / n
    mean_y = sum(rates) / n
    dx = [x - mean_x for x in ref_lengths]
    dy = [y - mean_y for y in rates]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        return None
    cov = sum(a * b for a, b in zip(dx, dy))
    return cov / math.sqrt(var_x * var_y)


def text_scores(hyps: TokenizedCorpus, refs: TokenizedCorpus) -> TextScore:
    """All four text metrics over one id-aligned corpus pair."""
    bleu = bleu_corpus(hyps, refs, max_n=4)
    return TextScore(
        bleu=bleu,  # type: ignore[arg-type]
        chrf=chrf(hyps, refs),
        rouge=rouge_l(hyps, refs),
        wer=wer(hyps, refs),
    )
