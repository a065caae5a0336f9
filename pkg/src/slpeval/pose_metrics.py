"""Pose-based evaluation metrics.

Two corpus-level numbers summarize a system's pose output: the mean joint
error under dynamic-time-warping alignment (lower is better, 0 for a perfect
prediction) and the hand-travel ratio against the reference (1 is optimal;
values below 1 indicate under-articulated, "regressed to the mean" motion).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pose import PoseSequence

__all__ = [
    "AlignmentPath",
    "PoseScore",
    "ZeroReferenceTravelError",
    "corpus_pose_metrics",
    "dtw_align",
    "dtw_mje",
    "frame_distance",
    "hand_travel",
    "total_distance_ratio",
]

#: reference hand travel below this is treated as "static" and excluded
ZERO_TRAVEL_EPSILON = 1e-9


class ZeroReferenceTravelError(ValueError):
    """Reference hands never move, so the travel ratio is undefined."""


@dataclass(frozen=True)
class AlignmentPath:
    """A monotone warping path over (prediction frame, reference frame) cells.

    The path starts at ``(0, 0)``, ends at ``(P-1, R-1)``, and each step
    advances one index or both. ``total_cost`` is the frame-distance sum over
    the visited cells.
    """

    steps: tuple[tuple[int, int], ...]
    total_cost: float


@dataclass(frozen=True)
class PoseScore:
    """Corpus pose metrics; ``total_distance_ratio`` is None when every
    reference was excluded for having (near-)zero hand travel."""

    dtw_mje: float
    total_distance_ratio: float | None
    excluded_ids: tuple[str, ...] = field(default=())


def frame_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Mean Euclidean distance between corresponding keypoints of two frames."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"frame shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b, axis=-1).mean())


def _cost_matrix(pred: np.ndarray, ref: np.ndarray) -> np.ndarray:
    # row-wise to keep the (R, K, 3) temporary small for long sequences
    p, r = pred.shape[0], ref.shape[0]
    cost = np.empty((p, r), dtype=np.float64)
    for i in range(p):
        cost[i] = np.linalg.norm(pred[i][None, :, :] - ref, axis=2).mean(axis=1)
    return cost


def dtw_align(pred: PoseSequence, ref: PoseSequence) -> AlignmentPath:
    """Minimum-cost monotone alignment between two sequences.

    Steps are {advance prediction, advance reference, advance both}. Among
    equal-cost paths the shortest wins, with ties broken deterministically:
    diagonal first, then prediction-advance, then reference-advance.
    """
    if pred.num_keypoints != ref.num_keypoints:
        raise ValueError(
            f"keypoint counts differ: {pred.num_keypoints} vs {ref.num_keypoints}"
        )
    cost = _cost_matrix(pred.frames, ref.frames)
    p, r = cost.shape

    acc = np.full((p, r), np.inf)
    length = np.zeros((p, r), dtype=np.intp)
    back = np.full((p, r), -1, dtype=np.int8)  # 0 diagonal, 1 pred-advance, 2 ref-advance
    acc[0, 0] = cost[0, 0]
    length[0, 0] = 1
    for i in range(p):
        for j in range(r):
            if i == 0 and j == 0:
                continue
            best_key = None
            best_move = -1
            for move, (pi, pj) in enumerate(((i - 1, j - 1), (i - 1, j), (i, j - 1))):
                if pi < 0 or pj < 0:
                    continue
                key = (acc[pi, pj], length[pi, pj])
                if best_key is None or key < best_key:
                    best_key = key
                    best_move = move
            acc[i, j] = best_key[0] + cost[i, j]
            length[i, j] = best_key[1] + 1
            back[i, j] = best_move

    steps = [(p - 1, r - 1)]
    i, j = p - 1, r - 1
    while (i, j) != (0, 0):
        move = back[i, j]
        if move == 0:
            i, j = i - 1, j - 1
        elif move == 1:
            i -= 1
        else:
            j -= 1
        steps.append((i, j))
    steps.reverse()
    return AlignmentPath(steps=tuple(steps), total_cost=float(acc[p - 1, r - 1]))


def dtw_mje(pred: PoseSequence, ref: PoseSequence) -> float:
    """Alignment cost divided by the number of aligned frame pairs."""
    path = dtw_align(pred, ref)
    return path.total_cost / len(path.steps)


def hand_travel(seq: PoseSequence) -> float:
    """Total 3D distance travelled by the hand keypoints across the sequence."""
    hands = seq.frames[:, seq.layout.hand_indices, :]
    if hands.shape[0] < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(hands, axis=0), axis=2).sum())


def total_distance_ratio(pred: PoseSequence, ref: PoseSequence) -> float:
    """Predicted hand travel normalized by reference hand travel (1 is optimal)."""
    ref_travel = hand_travel(ref)
    if ref_travel < ZERO_TRAVEL_EPSILON:
        raise ZeroReferenceTravelError(
            f"reference {ref.id!r} hand travel {ref_travel:g} is below {ZERO_TRAVEL_EPSILON:g}"
        )
    return hand_travel(pred) / ref_travel


def corpus_pose_metrics(preds: list[PoseSequence], refs: list[PoseSequence]) -> PoseScore:
    """Aggregate per-sequence metrics over an id-paired corpus.

    DTW-MJE averages over all sequences; the travel ratio averages over the
    sequences whose reference actually moves, the rest are reported excluded.
    """
    if len(preds) != len(refs):
        raise ValueError(f"corpus sizes differ: {len(preds)} predictions vs {len(refs)} references")
    if not refs:
        raise ValueError("empty corpus")
    for pred, ref in zip(preds, refs):
        if pred.id != ref.id:
            raise ValueError(f"id mismatch: prediction {pred.id!r} paired with reference {ref.id!r}")

    mje_sum = 0.0
    ratio_sum = 0.0
    ratio_count = 0
    excluded: list[str] = []
    for pred, ref in zip(preds, refs):
        mje_sum += dtw_mje(pred, ref)
        try:
            ratio_sum += total_distance_ratio(pred, ref)
            ratio_count += 1
        except ZeroReferenceTravelError:
            excluded.append(ref.id)

    ratio = ratio_sum / ratio_count if ratio_count else None
    return PoseScore(
        dtw_mje=mje_sum / len(preds),
        total_distance_ratio=ratio,
        excluded_ids=tuple(excluded),
    )
