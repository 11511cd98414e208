"""Detection of cut-and-paste relocations that line diffs report as
delete-plus-add.

A region qualifies only when the line-level diff marks every one of its
lines as deleted; candidates come from hunks whose added lines contain the
region's lines as a consecutive block, either verbatim (vertical movement)
or equal up to leading/trailing whitespace (horizontal movement).
"""

from enum import Enum

from codemapper.candidates import Candidate, Origin
from codemapper.diffparse import OpKind
from codemapper.regions import CharacterRange, Region


class MovementKind(Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


def region_fully_deleted(source_range, hunks) -> bool:
    deleted = {
        op.source_line
        for hunk in hunks
        for op in hunk.ops
        if op.kind is OpKind.DELETE
    }
    return all(
        line in deleted for line in range(source_range.l1, source_range.l2 + 1)
    )


def detect_movements(
    source_range: CharacterRange,
    source_text: str,
    hunks,
    target_text: str,
    target_file: str,
    target_commit: str,
) -> list[Candidate]:
    source_lines = source_text.split("\n")
    if source_range.l2 > len(source_lines):
        return []
    if not region_fully_deleted(source_range, hunks):
        return []

    block = source_lines[source_range.l1 - 1 : source_range.l2]
    stripped_block = [line.strip() for line in block]
    target_lines = target_text.split("\n")
    size = len(block)

    candidates: list[Candidate] = []
    for hunk in hunks:
        if hunk.target_is_empty or hunk.target_end > len(target_lines):
            continue
        added = target_lines[hunk.target_start - 1 : hunk.target_end]
        for offset in range(len(added) - size + 1):
            window = added[offset : offset + size]
            line = hunk.target_start + offset
            if window == block:
                kind = MovementKind.VERTICAL
            elif [w.strip() for w in window] == stripped_block:
                kind = MovementKind.HORIZONTAL
            else:
                continue
            if kind is MovementKind.VERTICAL:
                rng = CharacterRange(
                    line, source_range.c1, line + size - 1, source_range.c2
                )
            else:
                rng = _whitespace_shifted_range(block, window, line, source_range)
            if rng is not None:
                candidates.append(
                    Candidate(Region(target_commit, target_file, rng), Origin.MOVEMENT)
                )
    return candidates


def _whitespace_shifted_range(block, window, first_line, source_range):
    """Column bounds of a horizontally moved block.

    The endpoints are located by their offset inside the stripped content of
    the boundary lines, so re-indentation does not shift them off the text.
    """
    stripped_first = block[0].strip()
    stripped_last = block[-1].strip()
    if not stripped_first or not stripped_last:
        return None

    lead_src_first = len(block[0]) - len(block[0].lstrip())
    lead_tgt_first = len(window[0]) - len(window[0].lstrip())
    off_start = min(
        max(source_range.c1 - 1 - lead_src_first, 0), len(stripped_first) - 1
    )
    c1 = lead_tgt_first + off_start + 1

    lead_src_last = len(block[-1]) - len(block[-1].lstrip())
    lead_tgt_last = len(window[-1]) - len(window[-1].lstrip())
    off_end = min(max(source_range.c2 - 1 - lead_src_last, 0), len(stripped_last) - 1)
    c2 = lead_tgt_last + off_end + 1

    last_line = first_line + len(block) - 1
    if (first_line, c1) > (last_line, c2):
        return None
    return CharacterRange(first_line, c1, last_line, c2)
