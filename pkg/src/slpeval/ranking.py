"""Leaderboard ranking via Pareto dominance over the nine-metric score vectors.

Every metric is first mapped to a minimization objective: text metrics and
the higher-is-better pose metric are negated, error rates pass through, and
the hand-travel ratio becomes distance from its optimum of 1, so over- and
under-articulation are penalized symmetrically. One entrant dominates another
if it is at least as good in every objective and strictly better in at least
one; fronts are peeled iteratively and never favour a single metric.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "CANONICAL_METRICS",
    "ObjectiveVector",
    "Ranking",
    "ScoreVector",
    "dominance_matrix",
    "dominates",
    "pareto_fronts",
    "to_objectives",
]

#: leaderboard column order
CANONICAL_METRICS = (
    "BLEU-1",
    "BLEU-2",
    "BLEU-3",
    "BLEU-4",
    "CHRF",
    "ROUGE",
    "WER",
    "DTW-MJE",
    "Total Distance",
)

_HIGHER_IS_BETTER = frozenset({"BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4", "CHRF", "ROUGE"})
_LOWER_IS_BETTER = frozenset({"WER", "DTW-MJE"})


@dataclass(frozen=True)
class ScoreVector:
    """One entrant's values for the canonical metric set, in canonical order."""

    entrant: str
    values: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        names = tuple(name for name, _ in self.values)
        if names != CANONICAL_METRICS:
            got = set(names)
            want = set(CANONICAL_METRICS)
            missing = sorted(want - got)
            extra = sorted(got - want)
            detail = []
            if missing:
                detail.append(f"missing {missing}")
            if extra:
                detail.append(f"unknown {extra}")
            raise ValueError(
                f"score vector for {self.entrant!r} must carry exactly the canonical "
                f"metrics {list(CANONICAL_METRICS)}" + (": " + ", ".join(detail) if detail else "")
            )

    @classmethod
    def from_metrics(cls, entrant: str, metrics: dict[str, float]) -> "ScoreVector":
        """Build from a name→value mapping, normalizing to canonical order."""
        missing = [name for name in CANONICAL_METRICS if name not in metrics]
        extra = [name for name in metrics if name not in CANONICAL_METRICS]
        if missing or extra:
            raise ValueError(
                f"score vector for {entrant!r}: missing {missing}, unknown {extra}"
            )
        return cls(
            entrant=entrant,
            values=tuple((name, float(metrics[name])) for name in CANONICAL_METRICS),
        )

    def as_dict(self) -> dict[str, float]:
        return dict(self.values)


@dataclass(frozen=True)
class ObjectiveVector:
    """Canonical metrics recast so that lower is better in every component."""

    objectives: tuple[float, ...]


@dataclass(frozen=True)
class Ranking:
    """Pareto fronts; front 0 is non-dominated, entrants keep input order."""

    fronts: tuple[tuple[str, ...], ...]


def to_objectives(score: ScoreVector) -> ObjectiveVector:
    objectives = []
    for name, value in score.values:
        if name in _HIGHER_IS_BETTER:
            objectives.append(-value)
        elif name in _LOWER_IS_BETTER:
            objectives.append(value)
        else:  # hand-travel ratio: optimum is 1
            objectives.append(abs(1.0 - value))
    return ObjectiveVector(objectives=tuple(objectives))


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """True iff ``a`` is no worse everywhere and strictly better somewhere."""
    if len(a.objectives) != len(b.objectives):
        raise ValueError(
            f"objective lengths differ: {len(a.objectives)} vs {len(b.objectives)}"
        )
    strictly_better = False
    for x, y in zip(a.objectives, b.objectives):
        if x > y:
            return False
        if x < y:
            strictly_better = True
    return strictly_better


def pareto_fronts(entries: list[ScoreVector]) -> Ranking:
    """Partition entrants into fronts by iterative non-dominated peeling."""
    if not entries:
        raise ValueError("at least one score vector is required")
    objectives = [to_objectives(entry) for entry in entries]
    remaining = list(range(len(entries)))
    fronts: list[tuple[str, ...]] = []
    while remaining:
        front = [
            i
            for i in remaining
            if not any(dominates(objectives[j], objectives[i]) for j in remaining if j != i)
        ]
        fronts.append(tuple(entries[i].entrant for i in front))
        front_set = set(front)
        remaining = [i for i in remaining if i not in front_set]
    return Ranking(fronts=tuple(fronts))


def dominance_matrix(entries: list[ScoreVector]) -> tuple[tuple[bool, ...], ...]:
    """Pairwise matrix in input order: cell [i][j] means i dominates j."""
    objectives = [to_objectives(entry) for entry in entries]
    return tuple(
        tuple(i != j and dominates(objectives[i], objectives[j]) for j in range(len(entries)))
        for i in range(len(entries))
    )
