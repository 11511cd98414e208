"""Phase 2: score candidates with context-aware Levenshtein similarity and
select the target region.

Context is up to N unchanged lines above and below a region, judged against
the line-level diff; movement candidates are scored without context because
relocated code usually has different surroundings.
"""

from dataclasses import dataclass, replace

from codemapper.candidates import ORIGIN_PRIORITY, Candidate
from codemapper.diffparse import Hunk
from codemapper.regions import DELETED, CharacterRange, Target, extract_text
from codemapper.similarity import levenshtein_similarity


@dataclass(frozen=True)
class SelectionConfig:
    """Pipeline tuning knobs; every component toggle defaults to on.

    `diff_context_lines` pads diff hunks with unchanged lines and exists
    only to probe the pipeline's sensitivity to that setting; 0 keeps hunks
    as pure change blocks.
    """

    context_lines: int = 15
    use_diff: bool = True
    use_refinement: bool = True
    use_movement: bool = True
    use_search: bool = True
    use_context: bool = True
    diff_context_lines: int = 0

    @property
    def effective_context(self) -> int:
        return self.context_lines if self.use_context else 0


def changed_lines(hunks, side: str) -> frozenset[int]:
    if side == "source":
        return frozenset(line for hunk in hunks for line in hunk.source_lines())
    return frozenset(
        line
        for hunk in hunks
        for line in range(hunk.target_start, hunk.target_end + 1)
    )


def _real_line_count(text: str, lines: list[str]) -> int:
    # split() leaves a trailing "" pseudo-line when the text ends in \n
    return len(lines) - 1 if text.endswith("\n") and len(lines) > 1 else len(lines)


def _flanking_unchanged(
    file_text: str, first: int, last: int, changed: frozenset[int], n: int
) -> tuple[list[str], list[str]]:
    lines = file_text.split("\n")
    count = _real_line_count(file_text, lines)
    above: list[str] = []
    line = first - 1
    while line >= 1 and len(above) < n:
        if line not in changed:
            above.append(lines[line - 1])
        line -= 1
    above.reverse()
    below: list[str] = []
    line = last + 1
    while line <= count and len(below) < n:
        if line not in changed:
            below.append(lines[line - 1])
        line += 1
    return above, below


def add_context(
    rng: CharacterRange, file_text: str, hunks, n: int, side: str = "source"
) -> str:
    """Region text widened by up to n unchanged lines on each side.

    Lines inside changed blocks are skipped, not merely truncated, so the
    context reflects code that survives on both sides of the diff.
    """
    above, below = _flanking_unchanged(
        file_text, rng.l1, rng.l2, changed_lines(hunks, side), n
    )
    return "\n".join(above + [extract_text(file_text, rng)] + below)


def surrounding_context(
    first: int, last: int, file_text: str, hunks, n: int, side: str
) -> str:
    """Unchanged lines around a line span, without the span itself."""
    above, below = _flanking_unchanged(
        file_text, first, last, changed_lines(hunks, side), n
    )
    return "\n".join(above + below)


def _deletion_site_context(hunk: Hunk, target_text: str, hunks, n: int) -> str:
    # For an empty target block, target_end/target_start delimit the
    # insertion point, so the flanks around them are the deletion site.
    return surrounding_context(
        hunk.target_start, hunk.target_end, target_text, hunks, n, side="target"
    )


def _rank_key(candidate: Candidate):
    position = (
        (float("inf"),) * 4
        if candidate.is_deleted
        else candidate.region.range.as_tuple()
    )
    return (
        -(candidate.similarity or 0.0),
        1 if candidate.is_deleted else 0,
        ORIGIN_PRIORITY[candidate.origin],
        position,
    )


def select_target(
    source_range: CharacterRange,
    source_text: str,
    candidates: list[Candidate],
    config: SelectionConfig,
    hunks,
    target_text: str,
) -> tuple[Target, list[Candidate]]:
    """Highest-similarity candidate wins; exact ties go to non-deleted
    candidates, then origin priority (diff > movement > search), then the
    earliest target position. An empty candidate set means deletion."""
    if not candidates:
        return DELETED, []
    n = config.effective_context

    src_with_ctx = add_context(source_range, source_text, hunks, n, side="source")
    src_plain = extract_text(source_text, source_range)
    src_ctx_only = surrounding_context(
        source_range.l1, source_range.l2, source_text, hunks, n, side="source"
    )

    scored: list[Candidate] = []
    for cand in candidates:
        if cand.is_deleted:
            if n == 0:
                score = 0.0
            else:
                hunk = cand.source_hunk
                site = (
                    _deletion_site_context(hunk, target_text, hunks, n)
                    if hunk is not None
                    else ""
                )
                score = levenshtein_similarity(src_ctx_only, site)
        elif cand.movement_detected:
            score = levenshtein_similarity(
                src_plain, extract_text(target_text, cand.region.range)
            )
        else:
            cand_ctx = add_context(
                cand.region.range, target_text, hunks, n, side="target"
            )
            score = levenshtein_similarity(src_with_ctx, cand_ctx)
        scored.append(replace(cand, similarity=score))

    ranked = sorted(scored, key=_rank_key)
    return ranked[0].region, ranked
