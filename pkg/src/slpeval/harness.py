"""Evaluation harness: end-to-end runs, submission validation, and reports.

This module owns the file-level orchestration. ``evaluate`` turns manifests
and sentence files into a :class:`MetricReport`; ``render_report`` turns a
report into structured JSON, a leaderboard-style table, or CSV;
``validate_submission`` checks a submission against the reference manifest
and the phase quota rules.

Reports are deterministic: provenance carries the tool version, a config
echo, and a digest of the input bytes instead of a wall-clock timestamp, so
evaluating the same inputs twice yields byte-identical structured output.
"""

from __future__ import annotations

import hashlib
import json
import shlex
import subprocess
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .manifest import SubmissionManifest, load_manifest, load_sentence_file
from .pose import (
    DEFAULT_LAYOUT,
    DegenerateTorsoError,
    KeypointLayout,
    PoseFormatError,
    PoseSequence,
    normalize_sequence,
    parse_layout,
    parse_pose_file,
    validate_sequence,
)
from .pose_metrics import PoseScore, corpus_pose_metrics
from .text_metrics import (
    TextScore,
    TokenizedCorpus,
    length_error_correlation,
    text_scores,
    top_error_words,
)

__all__ = [
    "DEVELOPMENT_RULES",
    "TEST_RULES",
    "EvaluationConfig",
    "EvaluationError",
    "MetricReport",
    "PhaseRules",
    "ReportDiagnostics",
    "SubmissionRecord",
    "ValidationReport",
    "duration_ratio",
    "evaluate",
    "format_record",
    "load_history",
    "render_report",
    "run_backtranslation",
    "submission_digest",
    "validate_submission",
]

TOP_ERROR_WORD_COUNT = 10


class EvaluationError(RuntimeError):
    """A hard failure while evaluating; the message names the offending file."""


@dataclass(frozen=True)
class PhaseRules:
    """Submission quota for one challenge phase."""

    phase: str
    max_per_day: int | None
    max_total: int


DEVELOPMENT_RULES = PhaseRules(phase="development", max_per_day=100, max_total=3000)
TEST_RULES = PhaseRules(phase="test", max_per_day=None, max_total=3)


@dataclass(frozen=True)
class SubmissionRecord:
    timestamp: datetime
    phase: str
    digest: str


def load_history(text: str) -> list[SubmissionRecord]:
    """Parse the append-only submission log: ``iso-timestamp<TAB>phase<TAB>digest``."""
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"history line {lineno}: expected 3 tab-separated fields, got {line!r}")
        try:
            stamp = datetime.fromisoformat(parts[0])
        except ValueError:
            raise ValueError(f"history line {lineno}: bad timestamp {parts[0]!r}") from None
        records.append(SubmissionRecord(timestamp=stamp, phase=parts[1], digest=parts[2]))
    return records


def format_record(record: SubmissionRecord) -> str:
    return f"{record.timestamp.isoformat()}\t{record.phase}\t{record.digest}\n"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _utc_date(stamp: datetime):
    if stamp.tzinfo is None:
        return stamp.date()
    return stamp.astimezone(timezone.utc).date()


def _quota_violations(
    rules: PhaseRules, history: list[SubmissionRecord], now: datetime
) -> list[str]:
    same_phase = [rec for rec in history if rec.phase == rules.phase]
    violations = []
    if len(same_phase) >= rules.max_total:
        violations.append(
            f"submission quota exceeded: {len(same_phase)} prior {rules.phase}-phase "
            f"submissions, limit {rules.max_total}"
        )
    if rules.max_per_day is not None:
        today = _utc_date(now)
        todays = [rec for rec in same_phase if _utc_date(rec.timestamp) == today]
        if len(todays) >= rules.max_per_day:
            violations.append(
                f"daily quota exceeded: {len(todays)} {rules.phase}-phase submissions "
                f"on {today.isoformat()}, limit {rules.max_per_day}"
            )
    return violations


def _check_manifest_files(
    manifest: SubmissionManifest, base_dir: Path, layout: KeypointLayout, role: str
) -> list[str]:
    violations = []
    for entry in manifest:
        path = _resolve(base_dir, entry.pose_path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as err:
            violations.append(f"{role} {entry.id!r}: cannot read {path}: {err}")
            continue
        try:
            seq = parse_pose_file(text, id=entry.id, layout=layout)
        except PoseFormatError as err:
            violations.append(f"{role} {entry.id!r}: {path}: {err}")
            continue
        for problem in validate_sequence(seq, layout):
            violations.append(f"{role} {entry.id!r}: {path}: {problem}")
    return violations


def validate_submission(
    pred_manifest_path: Path,
    ref_manifest_path: Path,
    rules: PhaseRules,
    history: list[SubmissionRecord],
    now: datetime | None = None,
    layout: KeypointLayout = DEFAULT_LAYOUT,
) -> ValidationReport:
    """Check id coverage, pose file health, and submission quotas.

    Violations are data, not exceptions; the submission log is never
    mutated here (recording an accepted submission is the caller's append).
    """
    now = now if now is not None else datetime.now(timezone.utc)
    pred_manifest = load_manifest(pred_manifest_path.read_text(encoding="utf-8"))
    ref_manifest = load_manifest(ref_manifest_path.read_text(encoding="utf-8"))

    violations: list[str] = []
    pred_ids = set(pred_manifest.ids)
    ref_ids = set(ref_manifest.ids)
    for missing in sorted(ref_ids - pred_ids):
        violations.append(f"prediction missing id {missing!r}")
    for extra in sorted(pred_ids - ref_ids):
        violations.append(f"prediction has unknown id {extra!r}")

    violations.extend(
        _check_manifest_files(pred_manifest, pred_manifest_path.parent, layout, "prediction")
    )
    violations.extend(
        _check_manifest_files(ref_manifest, ref_manifest_path.parent, layout, "reference")
    )
    violations.extend(_quota_violations(rules, history, now))
    return ValidationReport(violations=tuple(violations))


def submission_digest(manifest_path: Path) -> str:
    """Digest of a submission: manifest bytes plus every referenced pose file."""
    hasher = hashlib.sha256()
    data = manifest_path.read_bytes()
    hasher.update(len(data).to_bytes(8, "big"))
    hasher.update(data)
    manifest = load_manifest(manifest_path.read_text(encoding="utf-8"))
    for entry in manifest:
        path = _resolve(manifest_path.parent, entry.pose_path)
        try:
            pose_bytes = path.read_bytes()
        except OSError:
            continue
        hasher.update(entry.id.encode())
        hasher.update(len(pose_bytes).to_bytes(8, "big"))
        hasher.update(pose_bytes)
    return hasher.hexdigest()


@dataclass(frozen=True)
class EvaluationConfig:
    """Inputs of one evaluation run; at least one metric family must be fed."""

    pred_manifest: Path | None = None
    ref_manifest: Path | None = None
    hypothesis_file: Path | None = None
    backtranslate_command: str | None = None
    reference_text: Path | None = None
    layout_file: Path | None = None
    normalize: bool = True
    output_format: str = "structured"

    def __post_init__(self) -> None:
        has_pose = self.pred_manifest is not None and self.ref_manifest is not None
        has_text = self.hypothesis_file is not None or self.backtranslate_command is not None
        if not has_pose and not has_text:
            raise ValueError(
                "evaluation needs pose inputs (--pred and --ref) or text inputs (--hyp)"
            )
        if self.hypothesis_file is not None and self.backtranslate_command is not None:
            raise ValueError(
                "pass either a hypothesis file or a back-translation command, not both"
            )
        if self.backtranslate_command is not None and self.pred_manifest is None:
            raise ValueError(
                "back-translation needs a prediction manifest to supply pose files"
            )


@dataclass(frozen=True)
class ReportDiagnostics:
    duration_ratio: float | None = None
    length_error_correlation: float | None = None
    top_error_words: tuple[tuple[str, int], ...] = ()
    excluded_sequences: tuple[str, ...] = ()


@dataclass(frozen=True)
class MetricReport:
    pose: PoseScore | None
    text: TextScore | None
    diagnostics: ReportDiagnostics
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc: dict = {"provenance": self.provenance}
        if self.pose is not None:
            doc["pose"] = {
                "dtw_mje": self.pose.dtw_mje,
                "total_distance": self.pose.total_distance_ratio,
                "excluded_ids": list(self.pose.excluded_ids),
            }
        if self.text is not None:
            doc["text"] = {
                "bleu1": self.text.bleu[0],
                "bleu2": self.text.bleu[1],
                "bleu3": self.text.bleu[2],
                "bleu4": self.text.bleu[3],
                "chrf": self.text.chrf,
                "rouge": self.text.rouge,
                "wer": {
                    "rate": self.text.wer.rate,
                    "substitutions": self.text.wer.substitutions,
                    "deletions": self.text.wer.deletions,
                    "insertions": self.text.wer.insertions,
                    "ref_tokens": self.text.wer.ref_tokens,
                },
            }
        doc["diagnostics"] = {
            "duration_ratio": self.diagnostics.duration_ratio,
            "length_error_correlation": self.diagnostics.length_error_correlation,
            "top_error_words": [[word, count] for word, count in self.diagnostics.top_error_words],
            "excluded_sequences": list(self.diagnostics.excluded_sequences),
        }
        return doc


def duration_ratio(preds: list[PoseSequence], refs: list[PoseSequence]) -> float:
    """Mean over paired sequences of prediction length over reference length."""
    if len(preds) != len(refs):
        raise ValueError(f"corpus sizes differ: {len(preds)} vs {len(refs)}")
    if not refs:
        raise ValueError("empty corpus")
    total = 0.0
    for pred, ref in zip(preds, refs):
        if pred.id != ref.id:
            raise ValueError(f"id mismatch: {pred.id!r} paired with {ref.id!r}")
        if ref.num_frames == 0:
            raise ValueError(f"reference {ref.id!r} has no frames")
        total += pred.num_frames / ref.num_frames
    return total / len(preds)


def run_backtranslation(command: str, pose_paths: list[Path]) -> list[str]:
    """Run a user-supplied pose-to-text command over a list of pose files.

    Line protocol: the command receives one pose file path per stdin line and
    must emit exactly one sentence per line on stdout, in the same order.
    """
    argv = shlex.split(command)
    if not argv:
        raise EvaluationError("back-translation command is empty")
    payload = "".join(f"{path}\n" for path in pose_paths)
    try:
        proc = subprocess.run(argv, input=payload, capture_output=True, text=True, check=False)
    except OSError as err:
        raise EvaluationError(f"back-translation command failed to start: {err}") from err
    if proc.returncode != 0:
        detail = proc.stderr.strip().splitlines()
        suffix = f": {detail[0]}" if detail else ""
        raise EvaluationError(
            f"back-translation command exited with status {proc.returncode}{suffix}"
        )
    sentences = proc.stdout.splitlines()
    if len(sentences) != len(pose_paths):
        raise EvaluationError(
            f"back-translation produced {len(sentences)} sentences "
            f"for {len(pose_paths)} pose files"
        )
    return sentences


def _resolve(base_dir: Path, pose_path: str) -> Path:
    path = Path(pose_path)
    return path if path.is_absolute() else base_dir / path


def _load_corpus(
    manifest_path: Path, layout: KeypointLayout, normalize: bool
) -> tuple[SubmissionManifest, dict[str, PoseSequence]]:
    manifest = load_manifest(manifest_path.read_text(encoding="utf-8"))
    sequences: dict[str, PoseSequence] = {}
    for entry in manifest:
        path = _resolve(manifest_path.parent, entry.pose_path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as err:
            raise EvaluationError(f"{path}: {err}") from err
        try:
            seq = parse_pose_file(text, id=entry.id, layout=layout)
        except PoseFormatError as err:
            raise EvaluationError(f"{path}: {err}") from err
        problems = validate_sequence(seq, layout)
        if problems:
            raise EvaluationError(f"{path}: {problems[0]}")
        if normalize:
            try:
                seq = normalize_sequence(seq)
            except (DegenerateTorsoError, ValueError) as err:
                raise EvaluationError(f"{path}: {err}") from err
        sequences[entry.id] = seq
    return manifest, sequences


def _input_digest(config: EvaluationConfig) -> str:
    hasher = hashlib.sha256()
    for role, path in (
        ("pred", config.pred_manifest),
        ("ref", config.ref_manifest),
        ("hyp", config.hypothesis_file),
        ("ref-text", config.reference_text),
        ("layout", config.layout_file),
    ):
        if path is None:
            continue
        data = Path(path).read_bytes()
        hasher.update(role.encode())
        hasher.update(len(data).to_bytes(8, "big"))
        hasher.update(data)
        if role in ("pred", "ref"):
            manifest = load_manifest(Path(path).read_text(encoding="utf-8"))
            for entry in manifest:
                pose_bytes = _resolve(Path(path).parent, entry.pose_path).read_bytes()
                hasher.update(entry.id.encode())
                hasher.update(len(pose_bytes).to_bytes(8, "big"))
                hasher.update(pose_bytes)
    if config.backtranslate_command is not None:
        command = config.backtranslate_command.encode()
        hasher.update(b"backtranslate")
        hasher.update(len(command).to_bytes(8, "big"))
        hasher.update(command)
    hasher.update(b"normalize" if config.normalize else b"raw")
    return hasher.hexdigest()


def evaluate(config: EvaluationConfig) -> MetricReport:
    """Run every metric the config provides inputs for.

    Pose metrics need both manifests; text metrics need hypothesis sentences
    (a file, or a back-translation command run over the prediction pose
    files) plus reference sentences (from ``reference_text`` or the
    reference manifest's third field). Any parse or validation failure
    aborts with the first offending file named.
    """
    layout = DEFAULT_LAYOUT
    if config.layout_file is not None:
        layout = parse_layout(Path(config.layout_file).read_text(encoding="utf-8"))

    pose_score: PoseScore | None = None
    ratio: float | None = None
    pred_manifest: SubmissionManifest | None = None
    ref_manifest: SubmissionManifest | None = None
    if config.pred_manifest is not None and config.ref_manifest is not None:
        pred_manifest, pred_seqs = _load_corpus(config.pred_manifest, layout, config.normalize)
        ref_manifest, ref_seqs = _load_corpus(config.ref_manifest, layout, config.normalize)
        missing = [i for i in ref_manifest.ids if i not in pred_seqs]
        extra = [i for i in pred_manifest.ids if i not in ref_seqs]
        if missing or extra:
            offender = missing[0] if missing else extra[0]
            raise EvaluationError(
                f"{config.pred_manifest}: id set mismatch with reference manifest "
                f"(first offender {offender!r})"
            )
        refs = [ref_seqs[i] for i in ref_manifest.ids]
        preds = [pred_seqs[i] for i in ref_manifest.ids]
        pose_score = corpus_pose_metrics(preds, refs)
        ratio = duration_ratio(preds, refs)
    elif config.ref_manifest is not None:
        ref_manifest = load_manifest(Path(config.ref_manifest).read_text(encoding="utf-8"))

    text_score: TextScore | None = None
    correlation: float | None = None
    frequent_errors: tuple[tuple[str, int], ...] = ()
    if config.hypothesis_file is not None or config.backtranslate_command is not None:
        if config.hypothesis_file is not None:
            text_source = str(config.hypothesis_file)
            hyp_map = load_sentence_file(
                Path(config.hypothesis_file).read_text(encoding="utf-8")
            )
        else:
            text_source = str(config.pred_manifest)
            if pred_manifest is None:
                pred_manifest = load_manifest(
                    Path(config.pred_manifest).read_text(encoding="utf-8")
                )
            pose_paths = [
                _resolve(Path(config.pred_manifest).parent, entry.pose_path)
                for entry in pred_manifest
            ]
            sentences = run_backtranslation(config.backtranslate_command, pose_paths)
            hyp_map = dict(zip(pred_manifest.ids, sentences))
        if config.reference_text is not None:
            ref_map = load_sentence_file(Path(config.reference_text).read_text(encoding="utf-8"))
        elif ref_manifest is not None:
            ref_map = {
                entry.id: entry.reference_sentence
                for entry in ref_manifest
                if entry.reference_sentence is not None
            }
            if len(ref_map) != len(ref_manifest):
                raise EvaluationError(
                    f"{config.ref_manifest}: manifest lacks reference sentences; "
                    "pass a reference text file instead"
                )
        else:
            raise EvaluationError(
                f"{text_source}: no reference sentences available "
                "(need --ref-text or a reference manifest with sentences)"
            )
        missing_ids = [i for i in ref_map if i not in hyp_map]
        extra_ids = [i for i in hyp_map if i not in ref_map]
        if missing_ids or extra_ids:
            offender = missing_ids[0] if missing_ids else extra_ids[0]
            raise EvaluationError(
                f"{text_source}: hypothesis ids do not match reference ids "
                f"(first offender {offender!r})"
            )
        ids = list(ref_map)
        hyps = TokenizedCorpus.from_raw([hyp_map[i] for i in ids])
        refs_text = TokenizedCorpus.from_raw([ref_map[i] for i in ids])
        text_score = text_scores(hyps, refs_text)
        frequent_errors = tuple(top_error_words(text_score.wer, TOP_ERROR_WORD_COUNT))
        scored = [
            (s.ref_tokens, 100.0 * s.errors / s.ref_tokens)
            for s in text_score.wer.per_sentence
            if s.ref_tokens > 0
        ]
        correlation = length_error_correlation(
            [length for length, _ in scored], [rate for _, rate in scored]
        )

    report = MetricReport(
        pose=pose_score,
        text=text_score,
        diagnostics=ReportDiagnostics(
            duration_ratio=ratio,
            length_error_correlation=correlation,
            top_error_words=frequent_errors,
            excluded_sequences=pose_score.excluded_ids if pose_score else (),
        ),
        provenance={
            "tool": "slpeval",
            "version": __version__,
            "input_digest": _input_digest(config),
            "config": {
                "pred_manifest": str(config.pred_manifest) if config.pred_manifest else None,
                "ref_manifest": str(config.ref_manifest) if config.ref_manifest else None,
                "hypothesis_file": str(config.hypothesis_file) if config.hypothesis_file else None,
                "backtranslate_command": config.backtranslate_command,
                "reference_text": str(config.reference_text) if config.reference_text else None,
                "layout_file": str(config.layout_file) if config.layout_file else None,
                "normalize": config.normalize,
            },
        },
    )
    return report


_TEXT_COLUMNS = (
    ("BLEU-1", "bleu1", "{:.2f}"),
    ("BLEU-2", "bleu2", "{:.2f}"),
    ("BLEU-3", "bleu3", "{:.2f}"),
    ("BLEU-4", "bleu4", "{:.2f}"),
    ("CHRF", "chrf", "{:.2f}"),
    ("ROUGE", "rouge", "{:.2f}"),
    ("WER", "wer", "{:.2f}"),
)
_POSE_COLUMNS = (
    ("DTW-MJE", "dtw_mje", "{:.4f}"),
    ("Total Distance", "total_distance", "{:.3f}"),
)


def _report_cells(report: MetricReport) -> list[tuple[str, str]]:
    cells: list[tuple[str, str]] = []
    if report.text is not None:
        values = {
            "bleu1": report.text.bleu[0],
            "bleu2": report.text.bleu[1],
            "bleu3": report.text.bleu[2],
            "bleu4": report.text.bleu[3],
            "chrf": report.text.chrf,
            "rouge": report.text.rouge,
            "wer": report.text.wer.rate,
        }
        for header, key, fmt in _TEXT_COLUMNS:
            cells.append((header, fmt.format(values[key])))
    if report.pose is not None:
        cells.append(("DTW-MJE", "{:.4f}".format(report.pose.dtw_mje)))
        ratio = report.pose.total_distance_ratio
        cells.append(("Total Distance", "{:.3f}".format(ratio) if ratio is not None else "n/a"))
    return cells


def _diagnostic_cells(report: MetricReport) -> list[tuple[str, str]]:
    diag = report.diagnostics
    cells: list[tuple[str, str]] = []
    if diag.duration_ratio is not None:
        cells.append(("Duration Ratio", "{:.3f}".format(diag.duration_ratio)))
    if report.text is not None:
        corr = diag.length_error_correlation
        cells.append(
            ("Length-Error Correlation", "{:.3f}".format(corr) if corr is not None else "n/a")
        )
    return cells


def render_report(report: MetricReport, format: str = "structured") -> str:
    """Render a report; the three formats share one source of numbers."""
    if format == "structured":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    cells = _report_cells(report)
    diags = _diagnostic_cells(report)
    if format == "csv":
        all_cells = cells + diags
        header = ",".join(name.lower().replace(" ", "_").replace("-", "_") for name, _ in all_cells)
        row = ",".join(value for _, value in all_cells)
        return header + "\n" + row + "\n"
    if format == "table":
        widths = [max(len(name), len(value)) for name, value in cells]
        header = "  ".join(name.ljust(w) for (name, _), w in zip(cells, widths))
        row = "  ".join(value.ljust(w) for (_, value), w in zip(cells, widths))
        lines = [header.rstrip(), row.rstrip()]
        if diags:
            lines.append("")
            for name, value in diags:
                lines.append(f"{name}: {value}")
        diag = report.diagnostics
        if diag.top_error_words:
            lines.append(
                "Top error words: "
                + ", ".join(f"{word} ({count})" for word, count in diag.top_error_words)
            )
        if diag.excluded_sequences:
            lines.append("Excluded sequences: " + ", ".join(diag.excluded_sequences))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")
