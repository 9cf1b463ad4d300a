import random

import pytest
from hypothesis import given, strategies as st

from claimeval.backends import TokenOverlapScorer
from claimeval.data import Claim, ClaimSet
from claimeval.errors import DataError
from claimeval.set_metrics import (
    claimwise_coverage,
    claimwise_focus,
    concat_claims,
    coverage,
    empty_prediction_scores,
    f_fact,
    focus,
    redundancy,
    score_set,
)

ALIGNER = TokenOverlapScorer()


def make_set(texts, doc_id="d1", origin="gold", prefix=None):
    prefix = prefix if prefix is not None else origin
    claims = tuple(
        Claim(claim_id=f"{prefix}-{i}", doc_id=doc_id, text=t, origin=origin)
        for i, t in enumerate(texts)
    )
    return ClaimSet(doc_id=doc_id, origin=origin, claims=claims)


class TestConcatClaims:
    def test_singleton(self):
        assert concat_claims(make_set(["A is B."])) == "A is B."

    def test_punctuation_repair(self):
        assert concat_claims(make_set(["A is B.", "C is D"])) == "A is B. C is D."

    def test_length_is_sum_plus_separators(self):
        texts = ["One fact.", "Two facts.", "Three facts."]
        joined = concat_claims(make_set(texts))
        assert len(joined) == sum(len(t) for t in texts) + len(texts) - 1

    def test_empty_set_is_an_error(self):
        with pytest.raises(DataError):
            concat_claims(make_set([], origin="m1"))


class TestFocusCoverage:
    def test_identical_sets_score_one(self):
        gold = make_set(["Alpha won.", "Beta lost."])
        pred = make_set(["Alpha won.", "Beta lost."], origin="m1")
        assert focus(gold, pred, ALIGNER) == 1.0
        assert coverage(gold, pred, ALIGNER) == 1.0

    def test_half_on_topic(self):
        gold = make_set(["Alpha won the game."])
        pred = make_set(["Alpha won the game.", "Zebras munch quietly."], origin="m1")
        assert focus(gold, pred, ALIGNER) == 0.5

    def test_coverage_half_covered(self):
        gold = make_set(["Alpha won.", "Beta lost.", "Gamma drew.", "Delta quit."])
        pred = make_set(["Alpha won.", "Beta lost."], origin="m1")
        assert coverage(gold, pred, ALIGNER) == 0.5

    def test_empty_arguments_raise(self):
        gold = make_set(["Alpha won."])
        empty = ClaimSet(doc_id="d1", origin="m1", claims=())
        with pytest.raises(DataError, match="undefined"):
            focus(gold, empty, ALIGNER)
        with pytest.raises(DataError, match="undefined"):
            coverage(gold, empty, ALIGNER)

    def test_claimwise_values(self):
        gold = make_set(["Alpha won.", "Beta lost."])
        inside = Claim(claim_id="x", doc_id="d1", text="Alpha won.", origin="m1")
        outside = Claim(claim_id="y", doc_id="d1", text="Quoll sings.", origin="m1")
        assert claimwise_focus(gold, inside, ALIGNER) == 1.0
        assert claimwise_focus(gold, outside, ALIGNER) == 0.0
        pred = make_set(["Alpha won."], origin="m1")
        assert claimwise_coverage(inside, pred, ALIGNER) == 1.0
        assert claimwise_coverage(outside, pred, ALIGNER) == 0.0

    def test_focus_is_mean_of_claimwise(self):
        gold = make_set(["Alpha won the game.", "Beta lost badly."])
        pred = make_set(
            ["Alpha won.", "Beta lost the game.", "Unrelated stuff entirely."],
            origin="m1",
        )
        values = [claimwise_focus(gold, c, ALIGNER) for c in pred.claims]
        assert focus(gold, pred, ALIGNER) == sum(values) / len(values)

    def test_appending_contained_claim_moves_focus_toward_one(self):
        # focus is a running mean, so adding a score-1 claim never lowers it
        gold = make_set(["Alpha won the game.", "Beta lost badly."])
        texts = ["Alpha won.", "Mostly unrelated ramble here.", "Beta lost the game."]
        contained = "Beta badly won."  # tokens all inside concat(gold)
        for k in range(1, len(texts) + 1):
            base = focus(gold, make_set(texts[:k], origin="m1"), ALIGNER)
            grown = focus(gold, make_set(texts[:k] + [contained], origin="m1"), ALIGNER)
            assert grown >= base
            assert grown >= min(base, 1.0)

    def test_focus_invariant_under_prediction_permutation(self):
        gold = make_set(["Alpha won the game.", "Beta lost badly."])
        texts = ["Alpha won.", "Beta lost the game.", "Gamma something else."]
        base = focus(gold, make_set(texts, origin="m1"), ALIGNER)
        rng = random.Random(3)
        for _ in range(5):
            shuffled = texts[:]
            rng.shuffle(shuffled)
            assert focus(gold, make_set(shuffled, origin="m1"), ALIGNER) == base


class TestDuality:
    def test_coverage_equals_swapped_focus_on_random_corpora(self):
        rng = random.Random(11)
        vocabulary = [f"w{i}" for i in range(30)]
        for _ in range(300):
            gold_texts = [
                " ".join(rng.sample(vocabulary, rng.randint(1, 6))) + "."
                for _ in range(rng.randint(1, 4))
            ]
            pred_texts = [
                " ".join(rng.sample(vocabulary, rng.randint(1, 6))) + "."
                for _ in range(rng.randint(1, 4))
            ]
            gold = make_set(gold_texts)
            pred = make_set(pred_texts, origin="m1")
            swapped_gold = make_set(pred_texts, prefix="sg")
            swapped_pred = make_set(gold_texts, origin="m1", prefix="sp")
            assert coverage(gold, pred, ALIGNER) == focus(swapped_gold, swapped_pred, ALIGNER)


class TestRedundancy:
    def test_duplicated_claims_score_one(self):
        pred = make_set(["Alpha won the game.", "Alpha won the game."], origin="m1")
        assert redundancy(pred, ALIGNER) == 1.0

    def test_disjoint_claims_score_zero(self):
        pred = make_set(["Alpha won.", "Zebra sleeps."], origin="m1")
        assert redundancy(pred, ALIGNER) == 0.0

    def test_singleton_is_absent_not_zero(self):
        assert redundancy(make_set(["Alpha won."], origin="m1"), ALIGNER) is None


class TestFFact:
    def test_reported_pair(self):
        assert f_fact(0.58, 0.63) == pytest.approx(0.61, abs=0.01)

    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_harmonic_identity(self, x):
        assert f_fact(x, x) == pytest.approx(x)

    def test_zero_branch(self):
        assert f_fact(0.0, 0.9) == 0.0
        assert f_fact(0.0, 0.0) == 0.0

    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_bounds_and_inequalities(self, foc, cov):
        value = f_fact(foc, cov)
        assert 0.0 <= value <= 1.0
        assert value <= (foc + cov) / 2 + 1e-12
        assert value <= 2 * min(foc, cov) + 1e-12

    def test_out_of_range_rejected(self):
        with pytest.raises(DataError):
            f_fact(1.2, 0.5)
        with pytest.raises(DataError):
            f_fact(0.5, -0.1)


class TestScoreSet:
    def test_decomposition_is_exact(self):
        gold = make_set(["Alpha won the game.", "Beta lost badly.", "Gamma drew."])
        pred = make_set(
            ["Alpha won.", "Beta lost.", "Totally unrelated words here."], origin="m1"
        )
        scores = score_set(gold, pred, ALIGNER)
        cw_f = list(scores.claimwise_focus.values())
        cw_c = list(scores.claimwise_coverage.values())
        assert scores.focus == sum(cw_f) / len(cw_f)
        assert scores.coverage == sum(cw_c) / len(cw_c)
        assert scores.f_fact == f_fact(scores.focus, scores.coverage)
        assert scores.redundancy is not None

    def test_matches_standalone_operations(self):
        gold = make_set(["Alpha won the game.", "Beta lost badly."])
        pred = make_set(["Alpha won.", "Beta lost the game."], origin="m1")
        scores = score_set(gold, pred, ALIGNER)
        assert scores.focus == focus(gold, pred, ALIGNER)
        assert scores.coverage == coverage(gold, pred, ALIGNER)
        assert scores.redundancy == redundancy(pred, ALIGNER)

    def test_toss_filter_drops_claims_from_premises(self):
        gold = make_set(["Alpha won.", "Rogue fact."])
        pred = make_set(["Alpha won.", "Rogue fact."], origin="m1")
        flags = {"m1-0": 1, "m1-1": 0}
        tossed = score_set(
            gold, pred, ALIGNER, toss_non_decontextualized=True, decontext_flags=flags
        )
        kept = score_set(gold, pred, ALIGNER)
        assert kept.coverage == 1.0
        # premise shrank to "Alpha won." so the rogue gold claim is uncovered
        assert tossed.coverage == 0.5
        # focus side is unaffected by the toss filter
        assert tossed.focus == kept.focus
        assert tossed.redundancy is None  # single claim left in premise

    def test_empty_prediction_marker(self):
        gold = make_set(["Alpha won."])
        scores = empty_prediction_scores("d1", "m1", gold)
        assert scores.no_prediction is True
        assert scores.focus == scores.coverage == scores.f_fact == 0.0
        assert scores.redundancy is None
        assert scores.claimwise_coverage == {"gold-0": 0.0}
