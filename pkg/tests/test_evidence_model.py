import math

import numpy as np
import pytest

from evidence_model import (
    combine_log10_lr,
    evaluate,
    log10_lr,
    log10_to_scientific,
    log_lik_coded,
    log_lik_random,
    odds_to_probability,
    posterior_odds,
    prior_odds,
    scientific_to_log10,
    summarize,
    summarize_signals,
    sweep,
    timing_log10_factor,
)
from schemas import (
    CodedModel,
    DomainError,
    MatchSummary,
    PriorParams,
    RandomModel,
    SignalObservation,
)


def _bridge_oracle(n: int, m: int, h: int, p: float) -> float:
    return m * math.log10(p) + (n - m) * math.log10(1 - p) + math.log10((n + 1) * math.comb(n, h))


class TestSummaries:
    def test_counts_matches_positives_and_exclusions(self):
        observations = [
            SignalObservation(expected=1, observed=1),
            SignalObservation(expected=0, observed=0),
            SignalObservation(expected=0, observed=1),
            SignalObservation(expected=None, observed=1),
        ]
        assert summarize(observations) == MatchSummary(n=3, m=2, positives=2, excluded=1)

    def test_empty(self):
        assert summarize([]) == MatchSummary(n=0, m=0, positives=0)

    def test_vectorized_matches_loop(self):
        rng = np.random.default_rng(7)
        expected = rng.integers(0, 2, 50)
        observed = rng.integers(0, 2, 50)
        loop = summarize(SignalObservation(int(e), int(o)) for e, o in zip(expected, observed))
        assert summarize_signals(expected, observed) == loop

    def test_vectorized_rejects_length_mismatch(self):
        with pytest.raises(DomainError):
            summarize_signals([0, 1], [1])

    @pytest.mark.parametrize("observed", [2, -1])
    def test_observation_rejects_non_binary(self, observed):
        with pytest.raises(DomainError):
            SignalObservation(expected=1, observed=observed)

    def test_summary_invariants(self):
        with pytest.raises(DomainError):
            MatchSummary(n=3, m=4, positives=0)
        with pytest.raises(DomainError):
            MatchSummary(n=3, m=0, positives=4)


class TestLikelihoods:
    def test_coded_closed_form(self):
        summary = MatchSummary(n=85, m=83, positives=45)
        expected = 83 * math.log(0.9) + 2 * math.log(0.1)
        assert log_lik_coded(summary, CodedModel(0.9)) == pytest.approx(expected, rel=1e-14)

    def test_empty_sequence(self):
        summary = MatchSummary(n=0, m=0, positives=0)
        assert log_lik_coded(summary, CodedModel(0.9)) == 0.0
        assert log_lik_random(summary, RandomModel(q_max=0.1)) == pytest.approx(math.log(0.1))
        assert log_lik_random(summary, RandomModel(q_max=0.1, normalize=True)) == pytest.approx(0.0, abs=1e-12)

    def test_normalizing_shifts_by_log_q_max(self):
        summary = MatchSummary(n=267, m=201, positives=85)
        coded = CodedModel(0.8)
        plain = log10_lr(summary, coded, RandomModel(q_max=0.1))
        normalized = log10_lr(summary, coded, RandomModel(q_max=0.1, normalize=True))
        assert normalized == pytest.approx(plain - math.log10(1 / 0.1), abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
    def test_coded_model_domain(self, p):
        with pytest.raises(DomainError):
            CodedModel(p)

    @pytest.mark.parametrize("q_max", [0.0, 1.01])
    def test_random_model_domain(self, q_max):
        with pytest.raises(DomainError):
            RandomModel(q_max=q_max)


class TestLikelihoodRatio:
    def test_bridge_headline_matches_big_integer_oracle(self):
        value = log10_lr(MatchSummary(n=85, m=83, positives=45), CodedModel(0.9), RandomModel(q_max=1.0))
        oracle = _bridge_oracle(85, 83, 45, 0.9)
        assert abs(value - oracle) <= 1e-9 * abs(oracle)
        assert value == pytest.approx(20.6, abs=0.05)

    def test_baseball_headline(self):
        value = log10_lr(MatchSummary(n=267, m=201, positives=85), CodedModel(0.8), RandomModel(q_max=0.1))
        assert value == pytest.approx(30.53, abs=0.05)

    def test_zero_events(self):
        summary = MatchSummary(n=0, m=0, positives=0)
        assert log10_lr(summary, CodedModel(0.9), RandomModel(q_max=1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_all_mismatches_favour_random(self):
        summary = MatchSummary(n=20, m=0, positives=10)
        assert log10_lr(summary, CodedModel(0.9), RandomModel()) < 0

    @pytest.mark.parametrize("p", [0.51, 0.6, 0.8, 0.9, 0.99])
    @pytest.mark.parametrize("random", [RandomModel(), RandomModel(q_max=0.1), RandomModel(q_max=0.1, normalize=True)])
    def test_strictly_increasing_in_matches(self, p, random):
        values = [log10_lr(MatchSummary(n=85, m=m, positives=45), CodedModel(p), random) for m in range(86)]
        assert all(right > left for left, right in zip(values, values[1:]))


class TestOdds:
    def test_even_prior_over_ten_codes_is_minus_one(self):
        assert prior_odds(PriorParams(psi=0.5, m_codes=10)) == -1.0

    def test_posterior_is_lr_minus_one(self):
        prior = PriorParams(psi=0.5, m_codes=10)
        for value in (0.0, 3.25, 20.60185, -4.5):
            assert posterior_odds(value, prior) == value - 1

    def test_single_code_prior(self):
        assert prior_odds(PriorParams(psi=0.2, m_codes=1)) == pytest.approx(math.log10(0.25))

    @pytest.mark.parametrize("psi,m_codes", [(0.0, 10), (1.0, 10), (0.5, 0)])
    def test_prior_domain(self, psi, m_codes):
        with pytest.raises(DomainError):
            PriorParams(psi=psi, m_codes=m_codes)

    def test_probability_from_odds(self):
        assert odds_to_probability(0.0) == 0.5
        assert odds_to_probability(1.0) == pytest.approx(10 / 11)
        assert odds_to_probability(-1.0) == pytest.approx(1 / 11)
        assert odds_to_probability(400.0) == 1.0
        assert odds_to_probability(-400.0) == 0.0


class TestTiming:
    def test_one_bang_in_six_of_thirty_seconds_is_factor_five(self):
        assert 10 ** timing_log10_factor(1, 6.0, 30.0) == pytest.approx(5.0, abs=1e-12)

    def test_factor_scales_with_bangs(self):
        assert timing_log10_factor(85, 6.0, 30.0) == pytest.approx(85 * math.log10(5.0))

    def test_zero_bangs(self):
        assert timing_log10_factor(0, 6.0, 30.0) == 0.0

    @pytest.mark.parametrize("bangs,window,frame", [(-1, 6.0, 30.0), (1, 0.0, 30.0), (1, 40.0, 30.0)])
    def test_domain(self, bangs, window, frame):
        with pytest.raises(DomainError):
            timing_log10_factor(bangs, window, frame)


class TestSweep:
    summary = MatchSummary(n=85, m=83, positives=45)

    def test_grid_over_p(self):
        rows = sweep(self.summary, "p", 0.6, 0.99, 5, CodedModel(0.9), RandomModel())
        assert [row.value for row in rows] == pytest.approx(list(np.linspace(0.6, 0.99, 5)))
        for row in rows:
            assert row.log10_lr == pytest.approx(_bridge_oracle(85, 83, 45, row.value), rel=1e-9)

    def test_higher_p_raises_lr_up_to_match_rate(self):
        # the coded likelihood peaks at p = m / n = 83 / 85
        rising = sweep(self.summary, "p", 0.9, 0.97, 8, CodedModel(0.9), RandomModel())
        assert all(b.log10_lr > a.log10_lr for a, b in zip(rising, rising[1:]))
        falling = sweep(self.summary, "p", 0.98, 0.99, 3, CodedModel(0.9), RandomModel())
        assert all(b.log10_lr < a.log10_lr for a, b in zip(falling, falling[1:]))

    def test_balanced_summary_over_three_points(self):
        summary = MatchSummary(n=10, m=5, positives=5)
        rows = sweep(summary, "p", 0.5, 0.7, 3, CodedModel(0.9), RandomModel())
        assert [row.value for row in rows] == pytest.approx([0.5, 0.6, 0.7])
        for row, p in zip(rows, (0.5, 0.6, 0.7)):
            expected = 5 * math.log10(p) + 5 * math.log10(1 - p) + math.log10(11 * 252)
            assert row.log10_lr == pytest.approx(expected, rel=1e-12)
        assert rows[0].log10_lr == pytest.approx(math.log10(2772 / 1024), rel=1e-12)
        assert rows[0].log10_lr > rows[1].log10_lr > rows[2].log10_lr

    def test_reversed_bounds_are_sorted(self):
        rows = sweep(self.summary, "q_max", 1.0, 0.1, 4, CodedModel(0.9), RandomModel())
        values = [row.value for row in rows]
        assert values == sorted(values)
        # a smaller q_max shrinks the random likelihood
        assert rows[0].log10_lr > rows[-1].log10_lr

    def test_degenerate_two_step_grid(self):
        rows = sweep(self.summary, "p", 0.9, 0.9, 2, CodedModel(0.5), RandomModel())
        assert len(rows) == 2
        assert rows[0] == rows[1]

    def test_rejects_unknown_parameter_and_short_grid(self):
        with pytest.raises(DomainError):
            sweep(self.summary, "psi", 0.1, 0.9, 3, CodedModel(0.9), RandomModel())
        with pytest.raises(DomainError):
            sweep(self.summary, "p", 0.1, 0.9, 1, CodedModel(0.9), RandomModel())

    def test_out_of_domain_grid_point(self):
        with pytest.raises(DomainError):
            sweep(self.summary, "p", 0.5, 1.0, 3, CodedModel(0.9), RandomModel())


class TestScientific:
    @pytest.mark.parametrize("value", [20.60185, 30.53, 0.0, -3.7, 1234.5678, 0.999999999])
    def test_round_trip(self, value):
        text = log10_to_scientific(value)
        assert scientific_to_log10(text) == pytest.approx(value, abs=1e-6)

    def test_format(self):
        assert log10_to_scientific(0.0) == "1.0000000E+00"
        assert log10_to_scientific(-2.0) == "1.0000000E-02"
        assert log10_to_scientific(math.log10(4e19)) == "4.0000000E+19"


class TestEvaluate:
    def test_report_fields_are_consistent(self):
        summary = MatchSummary(n=267, m=201, positives=85)
        report = evaluate(
            summary,
            CodedModel(0.8),
            RandomModel(q_max=0.1),
            prior=PriorParams(psi=0.5, m_codes=10),
            timing=(1, 6.0, 30.0),
        )
        assert report.log10_lr == report.log10_lik_coded - report.log10_lik_random
        assert report.lr_scientific.endswith("E+30")
        assert float(report.lr_scientific.split("E")[0]) == pytest.approx(3.4, abs=0.1)
        assert report.posterior.log10_posterior_odds == report.log10_lr - 1
        assert report.timing.log10_lr_with_timing == pytest.approx(report.log10_lr + math.log10(5.0))

    def test_optional_blocks_absent_by_default(self):
        report = evaluate(MatchSummary(n=10, m=8, positives=6), CodedModel(0.9), RandomModel())
        assert report.posterior is None
        assert report.timing is None
        assert "model" in report.to_dict()


class TestCombine:
    def test_sum_of_groups(self):
        coded, random = CodedModel(0.8), RandomModel(q_max=0.1)
        x = log10_lr(MatchSummary(n=30, m=25, positives=10), coded, random)
        y = log10_lr(MatchSummary(n=40, m=31, positives=12), coded, random)
        assert combine_log10_lr([x, y]) == x + y

    def test_empty(self):
        assert combine_log10_lr([]) == 0.0
