"""Target selection: context assembly, scoring, tie-breaking."""

import random

from codemapper.candidates import Candidate, Origin
from codemapper.diffparse import Hunk
from codemapper.regions import DELETED, Region, make_range
from codemapper.selector import SelectionConfig, add_context, select_target


def text(lines):
    return "".join(line + "\n" for line in lines)


class TestAddContext:
    FILE = text([f"l{i}" for i in range(1, 11)])

    def test_zero_context_is_region_text(self):
        rng = make_range(5, 1, 5, 2)
        assert add_context(rng, self.FILE, (), 0) == "l5"

    def test_file_top_truncates(self):
        rng = make_range(1, 1, 1, 2)
        got = add_context(rng, self.FILE, (), 15)
        assert got.startswith("l1\n")
        assert got == "\n".join([f"l{i}" for i in range(1, 11)])

    def test_changed_lines_are_skipped(self):
        # two changed lines directly above the region
        hunks = (Hunk(3, 4, 3, 4),)
        rng = make_range(5, 1, 5, 2)
        got = add_context(rng, self.FILE, hunks, 2, side="source")
        assert got == "l1\nl2\nl5\nl6\nl7"

    def test_target_side_uses_target_blocks(self):
        hunks = (Hunk(3, 4, 3, 5),)
        rng = make_range(6, 1, 6, 2)
        got = add_context(rng, self.FILE, hunks, 2, side="target")
        assert got == "l1\nl2\nl6\nl7\nl8"

    def test_partial_line_region(self):
        rng = make_range(5, 2, 5, 2)
        got = add_context(rng, self.FILE, (), 1)
        assert got == "l4\n5\nl6"


def diff_cand(rng, similarity=None):
    return Candidate(Region("tc", "f.py", rng), Origin.DIFF, similarity)


class TestSelectTarget:
    SOURCE = text(["a", "b", "region text", "c", "d"])

    def run(self, candidates, target_text, config=None, hunks=()):
        return select_target(
            make_range(3, 1, 3, 11),
            self.SOURCE,
            candidates,
            config or SelectionConfig(),
            hunks,
            target_text,
        )

    def test_empty_candidates_mean_deleted(self):
        target, ranked = self.run([], self.SOURCE)
        assert target is DELETED and ranked == []

    def test_single_candidate_wins_regardless_of_score(self):
        target_text = text(["a", "b", "entirely different", "c", "d"])
        cand = Candidate(Region("tc", "f.py", make_range(3, 1, 3, 18)), Origin.DIFF)
        target, ranked = self.run([cand], target_text)
        assert target == cand.region
        assert ranked[0].similarity is not None

    def test_priority_breaks_exact_ties(self):
        # Offset-shifted diff candidate and identical search candidate both
        # score 1.0; the diff one wins by origin priority.
        target_text = text(["inserted", "a", "b", "region text", "c", "d"])
        hunks = (Hunk(1, 0, 1, 1),)
        rng = make_range(4, 1, 4, 11)
        cands = [
            Candidate(Region("tc", "f.py", rng), Origin.SEARCH),
            Candidate(Region("tc", "f.py", rng), Origin.DIFF),
        ]
        target, ranked = self.run(cands, target_text, hunks=hunks)
        assert ranked[0].origin is Origin.DIFF
        assert ranked[0].similarity == 1.0

    def test_movement_scored_without_context(self):
        # The moved text matches exactly, while its new context differs; the
        # movement candidate must still score 1.0 and win.
        target_text = text(["x", "y", "other stuff", "region text", "w"])
        move = Candidate(Region("tc", "f.py", make_range(4, 1, 4, 11)), Origin.MOVEMENT)
        diff = Candidate(Region("tc", "f.py", make_range(3, 1, 3, 11)), Origin.DIFF)
        target, ranked = self.run([move, diff], target_text)
        assert ranked[0].origin is Origin.MOVEMENT
        assert ranked[0].similarity == 1.0

    def test_deleted_loses_ties_to_real_candidates(self):
        target_text = text(["a", "b", "region text", "c", "d"])
        real = Candidate(Region("tc", "f.py", make_range(3, 1, 3, 11)), Origin.DIFF)
        gone = Candidate(DELETED, Origin.DIFF, source_hunk=Hunk(3, 3, 3, 2))
        target, ranked = self.run([real, gone], target_text)
        assert target == real.region

    def test_selection_invariant_under_permutation(self):
        target_text = text(["a", "b", "region texx", "c", "d", "region text"])
        cands = [
            diff_cand(make_range(3, 1, 3, 11)),
            Candidate(Region("tc", "f.py", make_range(6, 1, 6, 11)), Origin.SEARCH),
            Candidate(DELETED, Origin.DIFF, source_hunk=Hunk(3, 3, 3, 2)),
        ]
        rng = random.Random(5)
        baseline = None
        for _ in range(10):
            shuffled = list(cands)
            rng.shuffle(shuffled)
            target, ranked = self.run(shuffled, target_text)
            key = (repr(target), [repr(c.region) for c in ranked])
            if baseline is None:
                baseline = key
            assert key == baseline

    def test_scores_lie_in_unit_interval(self):
        target_text = text(["a", "zzz", "region text", "c"])
        cands = [
            diff_cand(make_range(2, 1, 2, 3)),
            diff_cand(make_range(3, 1, 3, 11)),
        ]
        _, ranked = self.run(cands, target_text)
        assert all(0.0 <= c.similarity <= 1.0 for c in ranked)

    def test_exact_context_match_scores_one(self):
        target_text = self.SOURCE
        cand = diff_cand(make_range(3, 1, 3, 11))
        _, ranked = self.run([cand], target_text)
        assert ranked[0].similarity == 1.0

    def test_rank_order_is_monotone_in_score(self):
        target_text = text(["a", "b", "region texq", "c", "d", "unrelated junk"])
        cands = [
            diff_cand(make_range(3, 1, 3, 11)),
            diff_cand(make_range(6, 1, 6, 14)),
        ]
        _, ranked = self.run(cands, target_text)
        scores = [c.similarity for c in ranked]
        assert scores == sorted(scores, reverse=True)

    def test_selection_invariant_under_monotone_score_transform(self):
        # Ranking depends only on the score ORDER: rescaling every score with
        # a strictly increasing function never changes the chosen candidate.
        from codemapper.selector import _rank_key

        cands = [
            diff_cand(make_range(3, 1, 3, 11), similarity=0.91),
            diff_cand(make_range(6, 1, 6, 14), similarity=0.35),
            Candidate(Region("tc", "f.py", make_range(1, 1, 1, 1)), Origin.SEARCH, 0.66),
        ]
        baseline = min(cands, key=_rank_key).region
        for transform in (lambda s: s**3, lambda s: 0.5 * s + 0.1, lambda s: s / 7):
            rescored = [
                Candidate(c.region, c.origin, transform(c.similarity)) for c in cands
            ]
            assert min(rescored, key=_rank_key).region == baseline


class TestDeletedScoring:
    def test_true_deletion_beats_nothing(self):
        source = text(["a", "b", "gone", "c", "d"])
        target_text = text(["a", "b", "c", "d"])
        hunks = (Hunk(3, 3, 3, 2),)
        gone = Candidate(DELETED, Origin.DIFF, source_hunk=hunks[0])
        target, ranked = select_target(
            make_range(3, 1, 3, 4), source, [gone], SelectionConfig(), hunks, target_text
        )
        assert target is DELETED
        assert ranked[0].similarity == 1.0  # surroundings match exactly

    def test_context_off_zeroes_deleted_score(self):
        source = text(["a", "b", "gone", "c", "d"])
        target_text = text(["a", "b", "c", "d"])
        hunks = (Hunk(3, 3, 3, 2),)
        gone = Candidate(DELETED, Origin.DIFF, source_hunk=hunks[0])
        config = SelectionConfig(use_context=False)
        target, ranked = select_target(
            make_range(3, 1, 3, 4), source, [gone], config, hunks, target_text
        )
        assert target is DELETED  # still the only candidate
        assert ranked[0].similarity == 0.0
