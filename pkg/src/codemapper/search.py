"""Exact-occurrence text search in the target file."""

from codemapper.candidates import Candidate, Origin
from codemapper.regions import AbsInterval, OutOfBounds, Region, range_of_interval


def search_text(
    source_region_text: str,
    target_file: str,
    target_commit: str,
    target_text: str,
) -> list[Candidate]:
    """One search candidate per exact occurrence, overlapping ones included,
    in ascending position order."""
    if not source_region_text:
        return []
    candidates: list[Candidate] = []
    pos = target_text.find(source_region_text)
    while pos != -1:
        try:
            rng = range_of_interval(
                target_text, AbsInterval(pos, pos + len(source_region_text))
            )
        except OutOfBounds:
            rng = None  # pattern starting or ending on a newline
        if rng is not None:
            candidates.append(
                Candidate(Region(target_commit, target_file, rng), Origin.SEARCH)
            )
        pos = target_text.find(source_region_text, pos + 1)
    return candidates
