"""The enumeration oracle, checked against an independent in-test enumeration."""

from fractions import Fraction

import pytest

from moebius_bell.exact import exact_expectations, exact_handedness
from moebius_bell.experiment import (
    ExperimentSpec,
    Fatigue,
    FixedP,
    Mode,
    NonlocalOptimal,
    PlateSide,
    PolicyError,
    ScriptedAlice,
    SidedP,
    run_experiment,
)
from moebius_bell.measure import (
    ACCEPT,
    REJECT,
    AliceDecision,
    alice_measure,
    bob_measure,
    nonlocal_reject_direction,
)
from moebius_bell.stats import PairCounts, Verdict, bell_report, pair_index
from moebius_bell.strip import B_LETTERS, all_configs

GRID = [k / 10 for k in range(11)]


def _oracle_conditional_tables():
    """Direct enumeration of the 16 servings x 2 Bob letters, split by branch.

    Returns (accept_correlators, reject_correlators) as exact Fractions,
    conditioning each pair average on the branch. Written independently of
    the production enumeration: plain loops over the measurement primitives.
    """
    tallies = {
        "accept": [[0, Fraction(0)] for _ in range(4)],
        "reject": [[0, Fraction(0)] for _ in range(4)],
    }
    for config in all_configs():
        for _side in (PlateSide.LEFT, PlateSide.RIGHT):
            for bob_letter in B_LETTERS:
                bob_value = bob_measure(config, bob_letter).value
                accepted = alice_measure(config, ACCEPT)
                pair = pair_index(accepted.letter, bob_letter)
                tallies["accept"][pair][0] += 1
                tallies["accept"][pair][1] += accepted.value * bob_value
                rejected = alice_measure(config, REJECT)
                pair = pair_index(rejected.letter, bob_letter)
                tallies["reject"][pair][0] += 1
                tallies["reject"][pair][1] += rejected.value * bob_value
    accept = tuple(Fraction(total, n) for n, total in tallies["accept"])
    reject = tuple(Fraction(total, n) for n, total in tallies["reject"])
    return accept, reject


class TestConditionalTables:
    def test_acceptance_gives_perfect_correlations(self):
        accept, _ = _oracle_conditional_tables()
        assert accept == (1, 1, 1, -1)

    def test_rejection_gives_null_correlations(self):
        _, reject = _oracle_conditional_tables()
        assert reject == (0, 0, 0, 0)

    def test_each_correlator_interpolates_between_the_branches(self):
        accept, _ = _oracle_conditional_tables()
        for p in (0.0, 0.3, 0.75, 1.0):
            expectations = exact_expectations(FixedP(p))
            for pair in range(4):
                assert expectations.correlators[pair] == Fraction(p) * accept[pair]


class TestLinearLaw:
    @pytest.mark.parametrize("p", GRID)
    def test_s_equals_four_p_exactly(self, p):
        expectations = exact_expectations(FixedP(p))
        assert expectations.s == 4 * Fraction(p)
        assert float(expectations.s) == 4 * p

    @pytest.mark.parametrize("p", GRID)
    def test_marginals_vanish_exactly(self, p):
        expectations = exact_expectations(FixedP(p))
        assert expectations.marginals == (0, 0, 0, 0)

    def test_pairs_are_equiprobable_for_every_p(self):
        for p in (0.0, 0.2, 1.0):
            expectations = exact_expectations(FixedP(p))
            assert expectations.pair_probability == (
                Fraction(1, 4),
                Fraction(1, 4),
                Fraction(1, 4),
                Fraction(1, 4),
            )

    def test_threshold_at_one_half(self):
        assert float(exact_expectations(FixedP(0.5)).s) == 2.0
        for p in GRID:
            s = exact_expectations(FixedP(p)).s
            assert (s > 2) == (p > 0.5)


class TestNonlocalCeiling:
    @pytest.mark.parametrize("p", GRID)
    def test_s_is_four_for_every_p(self, p):
        expectations = exact_expectations(NonlocalOptimal(p), Mode.NONLOCAL)
        assert expectations.s == 4
        assert expectations.marginals == (0, 0, 0, 0)

    def test_oracle_agrees_with_a_direct_enumeration(self):
        # Independent check at p = 0: every rejection walks the optimal
        # direction, so each pair's product is its target in every serving.
        for config in all_configs():
            for bob_letter in B_LETTERS:
                direction = nonlocal_reject_direction(config, bob_letter)
                alice = alice_measure(config, AliceDecision(False, direction))
                bob = bob_measure(config, bob_letter)
                target = -1 if pair_index(alice.letter, bob_letter) == 3 else 1
                assert alice.value * bob.value == target


class TestSidedExact:
    def test_reference_sided_values(self):
        left = exact_expectations(SidedP(0.9, 0.6), side=PlateSide.LEFT)
        right = exact_expectations(SidedP(0.9, 0.6), side=PlateSide.RIGHT)
        overall = exact_expectations(SidedP(0.9, 0.6))
        assert float(left.s) == 3.6
        assert float(right.s) == 2.4
        assert float(overall.s) == 3.0
        assert overall.s == 2 * (Fraction(0.9) + Fraction(0.6))

    def test_exact_handedness_report(self):
        report = exact_handedness(SidedP(0.9, 0.6))
        assert report.verdict is Verdict.LEFT_BIASED
        assert report.left.s_value == 3.6
        assert report.right.s_value == 2.4
        assert report.difference == float(Fraction(0.9) - Fraction(0.6))
        assert report.difference_stderr == 0.0

    def test_symmetric_sides_are_inconclusive(self):
        report = exact_handedness(SidedP(0.7, 0.7))
        assert report.difference == 0.0
        assert report.verdict is Verdict.INCONCLUSIVE


class TestPolicyGuards:
    def test_fatigue_cannot_be_enumerated(self):
        with pytest.raises(PolicyError):
            exact_expectations(Fatigue(0.5, 10.0))

    def test_scripted_cannot_be_enumerated(self):
        with pytest.raises(PolicyError):
            exact_expectations(ScriptedAlice((True,)))

    def test_mode_pairings(self):
        with pytest.raises(PolicyError):
            exact_expectations(FixedP(0.5), Mode.NONLOCAL)
        with pytest.raises(PolicyError):
            exact_expectations(NonlocalOptimal(0.5), Mode.STANDARD)


class TestMonteCarloAgainstOracle:
    def test_grid_within_five_sigma(self):
        for p in GRID:
            exact_s = float(exact_expectations(FixedP(p)).s)
            log = run_experiment(ExperimentSpec(100_000, 7, FixedP(p)))
            report = bell_report(PairCounts.from_log(log))
            if report.s_stderr == 0.0:
                assert report.s_value == exact_s
            else:
                assert abs(report.s_value - exact_s) <= 5 * report.s_stderr, p

    def test_degenerate_variance_at_p_one(self):
        for n in (100, 10_000):
            log = run_experiment(ExperimentSpec(n, 3, FixedP(1.0)))
            report = bell_report(PairCounts.from_log(log))
            assert report.s_value == 4.0
            assert report.s_stderr == 0.0

    def test_exact_report_marks_itself(self):
        report = exact_expectations(FixedP(0.5)).bell_report()
        assert report.exact
        assert report.defined
        assert report.s_value == 2.0
        assert report.s_stderr == 0.0
        assert report.to_dict()["exact"] is True
