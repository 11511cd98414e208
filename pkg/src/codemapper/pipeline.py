"""End-to-end mapping of one source region to a target commit."""

import time
from dataclasses import dataclass

from codemapper.candidates import (
    Candidate,
    ParsedReport,
    dedup_candidates,
    extract_diff_candidates,
)
from codemapper.diffparse import parse_line_diff, parse_word_diff
from codemapper.gitio import FILE_DELETED, GitGateway, Granularity
from codemapper.movement import detect_movements
from codemapper.regions import DELETED, Region, Target, extract_text, to_abs_interval
from codemapper.search import search_text
from codemapper.selector import SelectionConfig, select_target


@dataclass(frozen=True)
class PhaseTimings:
    candidates_s: float
    selection_s: float
    total_s: float


@dataclass(frozen=True)
class MappingResult:
    source: Region
    target_commit: str
    target: Target
    target_file: str | None
    candidates: tuple[Candidate, ...]
    reason: str | None
    timings: PhaseTimings

    @property
    def is_deleted(self) -> bool:
        return self.target_file is None or not isinstance(self.target, Region)

    @property
    def selected(self) -> Candidate | None:
        """Ranked head, i.e. the candidate that became the target."""
        return self.candidates[0] if self.candidates else None


def map_region(
    repo,
    source: Region,
    target_commit: str,
    config: SelectionConfig | None = None,
    git_bin: str | None = None,
) -> MappingResult:
    """Map `source` to its corresponding region at `target_commit`.

    Phase 1 gathers candidates from diff extraction, movement detection and
    text search; phase 2 picks the most similar one. The result's candidate
    list is ranked best-first with similarities filled in.
    """
    config = config or SelectionConfig()
    gateway = GitGateway(repo, git_bin)
    source_sha = gateway.rev_parse(source.commit)
    target_sha = gateway.rev_parse(target_commit)

    source_text = gateway.file_content(source_sha, source.file)
    to_abs_interval(source_text, source.range)  # fail fast on a bad region

    started = time.perf_counter()
    resolved = gateway.resolve_target_file(source_sha, source.file, target_sha)
    if resolved is FILE_DELETED:
        now = time.perf_counter()
        return MappingResult(
            source=source,
            target_commit=target_sha,
            target=DELETED,
            target_file=None,
            candidates=(),
            reason="file_deleted",
            timings=PhaseTimings(now - started, 0.0, now - started),
        )

    target_text = gateway.file_content(target_sha, resolved)
    reports = gateway.diff_texts(
        source_text,
        target_text,
        source_file=source.file,
        target_file=resolved,
        context_lines=config.diff_context_lines,
    )
    parsed = tuple(
        ParsedReport(
            report.config,
            tuple(
                parse_line_diff(report)
                if report.config.granularity is Granularity.LINE
                else parse_word_diff(report)
            ),
        )
        for report in reports
    )
    line_reports = [p for p in parsed if p.config.granularity is Granularity.LINE]

    candidates: list[Candidate] = []
    if config.use_diff:
        candidates.extend(
            extract_diff_candidates(
                parsed,
                source.range,
                source_text,
                target_text,
                resolved,
                target_sha,
                refine=config.use_refinement,
            )
        )
    if config.use_movement:
        for report in line_reports:
            candidates.extend(
                detect_movements(
                    source.range,
                    source_text,
                    report.hunks,
                    target_text,
                    resolved,
                    target_sha,
                )
            )
    if config.use_search:
        candidates.extend(
            search_text(
                extract_text(source_text, source.range),
                resolved,
                target_sha,
                target_text,
            )
        )
    candidates = dedup_candidates(candidates)
    phase1_done = time.perf_counter()

    reference_hunks = line_reports[0].hunks if line_reports else ()
    target, ranked = select_target(
        source.range, source_text, candidates, config, reference_hunks, target_text
    )
    finished = time.perf_counter()

    return MappingResult(
        source=source,
        target_commit=target_sha,
        target=target,
        target_file=resolved,
        candidates=tuple(ranked),
        reason=None,
        timings=PhaseTimings(
            phase1_done - started, finished - phase1_done, finished - started
        ),
    )
