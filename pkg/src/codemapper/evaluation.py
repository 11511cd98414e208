"""Evaluation harness: score predicted mappings against ground truth.

Datasets are JSON Lines (one record per line, schema "codemapper-eval-v1",
documented in docs/dataset-format.md). Outcomes follow the exact-match /
partial-overlap / character-distance scheme, with deletions accounted
separately.
"""

import hashlib
import json
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from codemapper.gitio import GitGateway, RepoError
from codemapper.pipeline import map_region
from codemapper.regions import (
    DELETED,
    CharacterRange,
    DeletedRegion,
    Region,
    Target,
    to_abs_interval,
)
from codemapper.selector import SelectionConfig

DATASET_SCHEMA = "codemapper-eval-v1"
REPORT_SCHEMA = "codemapper-report-v1"


class DatasetError(ValueError):
    """A dataset line could not be parsed; carries the line number."""


class FileMismatch(ValueError):
    """Predicted and expected regions live in different files."""


@dataclass(frozen=True)
class EvalRecord:
    """One ground-truth mapping task."""

    repo: str
    source: Region
    target_commit: str
    expected: Target
    tags: tuple[str, ...] = ()
    name: str = ""


class OutcomeKind(Enum):
    EXACT = "exact"
    PARTIAL_OVERLAP = "partial_overlap"
    NO_OVERLAP = "no_overlap"
    CORRECT_DELETION = "correct_deletion"
    WRONG_DELETION = "wrong_deletion"
    MISSED_DELETION = "missed_deletion"


# Outcomes that count as an exact identification and as overlapping.
_EXACT_KINDS = {OutcomeKind.EXACT, OutcomeKind.CORRECT_DELETION}
_OVERLAP_KINDS = _EXACT_KINDS | {OutcomeKind.PARTIAL_OVERLAP}


@dataclass(frozen=True)
class EvalOutcome:
    kind: OutcomeKind
    recall: float
    precision: float
    f1: float
    char_distance: int | None = None

    @property
    def is_exact(self) -> bool:
        return self.kind in _EXACT_KINDS

    @property
    def is_overlap(self) -> bool:
        return self.kind in _OVERLAP_KINDS


@dataclass(frozen=True)
class RecordResult:
    record: EvalRecord
    predicted: Target | None
    outcome: EvalOutcome | None
    error: str | None = None


# -- metrics -------------------------------------------------------------------


def overlap_metrics(
    predicted: Region, expected: Region, target_text: str
) -> tuple[float, float, float]:
    """(recall, precision, f1) from character-set overlap (zero-safe)."""
    if predicted.file != expected.file:
        raise FileMismatch(f"{predicted.file!r} vs {expected.file!r}")
    predicted_iv = to_abs_interval(target_text, predicted.range)
    expected_iv = to_abs_interval(target_text, expected.range)
    common = predicted_iv.intersection_size(expected_iv)
    if common == 0:
        return 0.0, 0.0, 0.0
    recall = common / len(expected_iv)
    precision = common / len(predicted_iv)
    f1 = 2 * recall * precision / (recall + precision)
    return recall, precision, f1


def char_distance(predicted: Region, expected: Region, target_text: str) -> int:
    """|i - i'| + |j - j'| over absolute start/end offsets."""
    if predicted.file != expected.file:
        raise FileMismatch(f"{predicted.file!r} vs {expected.file!r}")
    predicted_iv = to_abs_interval(target_text, predicted.range)
    expected_iv = to_abs_interval(target_text, expected.range)
    return abs(predicted_iv.start - expected_iv.start) + abs(
        predicted_iv.end - expected_iv.end
    )


def classify_outcome(predicted: Target, expected: Target, target_text: str) -> EvalOutcome:
    predicted_deleted = isinstance(predicted, DeletedRegion)
    expected_deleted = isinstance(expected, DeletedRegion)
    if predicted_deleted and expected_deleted:
        return EvalOutcome(OutcomeKind.CORRECT_DELETION, 1.0, 1.0, 1.0)
    if predicted_deleted:
        return EvalOutcome(OutcomeKind.WRONG_DELETION, 0.0, 0.0, 0.0)
    if expected_deleted:
        return EvalOutcome(OutcomeKind.MISSED_DELETION, 0.0, 0.0, 0.0)
    try:
        recall, precision, f1 = overlap_metrics(predicted, expected, target_text)
    except FileMismatch:
        return EvalOutcome(OutcomeKind.NO_OVERLAP, 0.0, 0.0, 0.0)
    if recall == precision == 1.0:
        return EvalOutcome(OutcomeKind.EXACT, 1.0, 1.0, 1.0)
    if f1 == 0.0:
        return EvalOutcome(OutcomeKind.NO_OVERLAP, 0.0, 0.0, 0.0)
    distance = char_distance(predicted, expected, target_text)
    return EvalOutcome(
        OutcomeKind.PARTIAL_OVERLAP, recall, precision, f1, char_distance=distance
    )


# -- dataset IO ----------------------------------------------------------------


def _range_from_json(obj, where: str) -> CharacterRange:
    try:
        return CharacterRange(obj["l1"], obj["c1"], obj["l2"], obj["c2"])
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"{where}: bad range fields: {exc}") from exc


def record_from_json(obj: dict, where: str = "record") -> EvalRecord:
    try:
        source = obj["source"]
        region = Region(
            source["commit"], source["file"], _range_from_json(source, where)
        )
        expected_obj = obj["expected"]
        expected: Target
        if expected_obj == "deleted":
            expected = DELETED
        else:
            expected = Region(
                obj["target_commit"],
                expected_obj.get("file", source["file"]),
                _range_from_json(expected_obj, where),
            )
        return EvalRecord(
            repo=obj["repo"],
            source=region,
            target_commit=obj["target_commit"],
            expected=expected,
            tags=tuple(obj.get("tags", ())),
            name=obj.get("name", ""),
        )
    except DatasetError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetError(f"{where}: {exc}") from exc


def record_to_json(record: EvalRecord) -> dict:
    expected = "deleted"
    if isinstance(record.expected, Region):
        rng = record.expected.range
        expected = {
            "file": record.expected.file,
            "l1": rng.l1,
            "c1": rng.c1,
            "l2": rng.l2,
            "c2": rng.c2,
        }
    rng = record.source.range
    obj = {
        "schema": DATASET_SCHEMA,
        "repo": record.repo,
        "source": {
            "commit": record.source.commit,
            "file": record.source.file,
            "l1": rng.l1,
            "c1": rng.c1,
            "l2": rng.l2,
            "c2": rng.c2,
        },
        "target_commit": record.target_commit,
        "expected": expected,
        "tags": list(record.tags),
    }
    if record.name:
        obj["name"] = record.name
    return obj


def load_dataset(path) -> list[EvalRecord]:
    """Parse a JSONL dataset; parse errors are fatal with line numbers."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            records.append(record_from_json(obj, where=f"{path}:{lineno}"))
    return records


def dump_dataset(records, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record_to_json(record)) + "\n")


# -- evaluation ----------------------------------------------------------------


@dataclass
class Aggregates:
    records: int = 0
    scored: int = 0
    errors: int = 0
    overlap_count: int = 0
    exact_count: int = 0
    mean_char_distance: float | None = None
    mean_recall: float = 0.0
    mean_precision: float = 0.0
    mean_f1: float = 0.0

    @property
    def overlap_rate(self) -> float:
        return self.overlap_count / self.scored if self.scored else 0.0

    @property
    def exact_rate(self) -> float:
        return self.exact_count / self.scored if self.scored else 0.0

    def to_json(self) -> dict:
        return {
            "records": self.records,
            "scored": self.scored,
            "errors": self.errors,
            "overlap_count": self.overlap_count,
            "overlap_rate": self.overlap_rate,
            "exact_count": self.exact_count,
            "exact_rate": self.exact_rate,
            "mean_char_distance": self.mean_char_distance,
            "mean_recall": self.mean_recall,
            "mean_precision": self.mean_precision,
            "mean_f1": self.mean_f1,
        }


def aggregate(results) -> Aggregates:
    """Permutation-invariant aggregates over record results.

    Character distance is averaged over partial overlaps only.
    """
    agg = Aggregates(records=len(results))
    outcomes = [r.outcome for r in results if r.outcome is not None]
    agg.scored = len(outcomes)
    agg.errors = sum(1 for r in results if r.error is not None)
    if not outcomes:
        return agg
    agg.overlap_count = sum(1 for o in outcomes if o.is_overlap)
    agg.exact_count = sum(1 for o in outcomes if o.is_exact)
    distances = [o.char_distance for o in outcomes if o.char_distance is not None]
    if distances:
        agg.mean_char_distance = sum(distances) / len(distances)
    agg.mean_recall = sum(o.recall for o in outcomes) / len(outcomes)
    agg.mean_precision = sum(o.precision for o in outcomes) / len(outcomes)
    agg.mean_f1 = sum(o.f1 for o in outcomes) / len(outcomes)
    return agg


@dataclass
class EvalReport:
    config: SelectionConfig
    results: list[RecordResult]
    aggregates: Aggregates
    by_tag: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "config": {
                "context_lines": self.config.context_lines,
                "use_diff": self.config.use_diff,
                "use_refinement": self.config.use_refinement,
                "use_movement": self.config.use_movement,
                "use_search": self.config.use_search,
                "use_context": self.config.use_context,
            },
            "aggregates": self.aggregates.to_json(),
            "by_tag": {tag: agg.to_json() for tag, agg in self.by_tag.items()},
            "records": [_result_to_json(result) for result in self.results],
        }


def _target_to_json(target: Target | None):
    if target is None:
        return None
    if isinstance(target, DeletedRegion):
        return "deleted"
    rng = target.range
    return {
        "commit": target.commit,
        "file": target.file,
        "l1": rng.l1,
        "c1": rng.c1,
        "l2": rng.l2,
        "c2": rng.c2,
    }


def _result_to_json(result: RecordResult) -> dict:
    out = {
        "name": result.record.name,
        "repo": result.record.repo,
        "tags": list(result.record.tags),
        "predicted": _target_to_json(result.predicted),
        "expected": _target_to_json(result.record.expected),
    }
    if result.outcome is not None:
        out["outcome"] = {
            "kind": result.outcome.kind.value,
            "recall": result.outcome.recall,
            "precision": result.outcome.precision,
            "f1": result.outcome.f1,
            "char_distance": result.outcome.char_distance,
        }
    if result.error is not None:
        out["error"] = result.error
    return out


def _resolve_repo(repo: str, base_dir, cache_dir) -> str:
    if "://" in repo or repo.endswith(".git"):
        cache_root = Path(cache_dir) if cache_dir else Path.home() / ".cache" / "codemapper"
        cache_root.mkdir(parents=True, exist_ok=True)
        clone = cache_root / hashlib.sha1(repo.encode()).hexdigest()[:16]
        if not clone.exists():
            subprocess.run(
                ["git", "clone", "--quiet", repo, str(clone)],
                check=True,
                capture_output=True,
            )
        return str(clone)
    path = Path(repo)
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    return str(path)


def evaluate_record(
    record: EvalRecord,
    config: SelectionConfig,
    base_dir=None,
    cache_dir=None,
    git_bin=None,
) -> RecordResult:
    try:
        repo = _resolve_repo(record.repo, base_dir, cache_dir)
        result = map_region(repo, record.source, record.target_commit, config, git_bin)
        predicted = result.target
        if isinstance(record.expected, Region):
            gateway = GitGateway(repo, git_bin)
            target_text = gateway.file_content(
                gateway.rev_parse(record.target_commit), record.expected.file
            )
        else:
            target_text = ""
        outcome = classify_outcome(predicted, record.expected, target_text)
        return RecordResult(record, predicted, outcome)
    except (RepoError, OSError, ValueError) as exc:
        return RecordResult(record, None, None, error=f"{type(exc).__name__}: {exc}")


def evaluate(
    records,
    config: SelectionConfig | None = None,
    *,
    jobs: int = 1,
    base_dir=None,
    cache_dir=None,
    git_bin=None,
) -> EvalReport:
    """Evaluate every record; per-record errors are recorded, not fatal."""
    config = config or SelectionConfig()

    def run(record):
        return evaluate_record(record, config, base_dir, cache_dir, git_bin)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, records))
    else:
        results = [run(record) for record in records]

    by_tag: dict[str, list[RecordResult]] = {}
    for result in results:
        for tag in result.record.tags:
            by_tag.setdefault(tag, []).append(result)
    return EvalReport(
        config=config,
        results=results,
        aggregates=aggregate(results),
        by_tag={tag: aggregate(rs) for tag, rs in sorted(by_tag.items())},
    )


ABLATION_VARIANTS = (
    ("full", {}),
    ("no_diff", {"use_diff": False}),
    ("no_refinement", {"use_refinement": False}),
    ("no_movement", {"use_movement": False}),
    ("no_search", {"use_search": False}),
    ("no_context", {"use_context": False}),
)


def ablation_matrix(records, base_config=None, **kwargs) -> dict[str, EvalReport]:
    """One evaluation run per disabled component."""
    base_config = base_config or SelectionConfig()
    matrix = {}
    for name, overrides in ABLATION_VARIANTS:
        matrix[name] = evaluate(records, replace(base_config, **overrides), **kwargs)
    return matrix


def context_sweep(records, sizes, base_config=None, **kwargs) -> dict[int, EvalReport]:
    """One evaluation run per context size."""
    base_config = base_config or SelectionConfig()
    return {
        size: evaluate(
            records,
            replace(base_config, context_lines=size, use_context=size > 0),
            **kwargs,
        )
        for size in sizes
    }
