"""Measurement rules: accept/reject, Bob's readout, the sequential walk, signalling."""

import pytest

from moebius_bell.measure import (
    ACCEPT,
    REJECT,
    AliceDecision,
    WalkState,
    alice_measure,
    bob_measure,
    nonlocal_reject_direction,
    product_target,
    sequential_measure,
    suggested_letter,
)
from moebius_bell.strip import (
    A_CELLS,
    B_LETTERS,
    Letter,
    N_CELLS,
    Orientation,
    ServingConfig,
    all_configs,
    symbol_at,
)

NORMAL = Orientation.NORMAL
UPSIDE_DOWN = Orientation.UPSIDE_DOWN
REFERENCE = ServingConfig(2, NORMAL)  # front A'-, B'+ left, B- right


class TestSuggestedLetter:
    def test_reference_serving_suggests_a_prime(self):
        assert suggested_letter(REFERENCE) is Letter.A_PRIME

    def test_front_zero_suggests_a(self):
        assert suggested_letter(ServingConfig(0, NORMAL)) is Letter.A

    def test_identical_for_both_orientations(self):
        for front in A_CELLS:
            assert suggested_letter(ServingConfig(front, NORMAL)) is suggested_letter(
                ServingConfig(front, UPSIDE_DOWN)
            )


class TestAliceMeasure:
    def test_accept_reads_the_front_cell(self):
        assert alice_measure(REFERENCE, ACCEPT) == (Letter.A_PRIME, -1)

    def test_reject_walks_clockwise_to_the_other_a_letter(self):
        assert alice_measure(REFERENCE, REJECT) == (Letter.A, +1)

    def test_reject_upside_down_flips_the_outcome(self):
        assert alice_measure(ServingConfig(2, UPSIDE_DOWN), REJECT) == (Letter.A, -1)

    def test_accept_is_orientation_independent(self):
        for front in A_CELLS:
            assert alice_measure(ServingConfig(front, NORMAL), ACCEPT) == alice_measure(
                ServingConfig(front, UPSIDE_DOWN), ACCEPT
            )

    def test_reject_is_orientation_antisymmetric(self):
        for front in A_CELLS:
            normal = alice_measure(ServingConfig(front, NORMAL), REJECT)
            flipped = alice_measure(ServingConfig(front, UPSIDE_DOWN), REJECT)
            assert normal.letter is flipped.letter
            assert normal.value == -flipped.value

    def test_reject_letter_is_the_other_a_type(self):
        for config in all_configs():
            assert alice_measure(config, REJECT).letter is suggested_letter(config).other()

    def test_decision_validation(self):
        with pytest.raises(ValueError):
            AliceDecision(True, +1)
        with pytest.raises(ValueError):
            AliceDecision(False, 2)


class TestBobMeasure:
    def test_reference_values(self):
        assert bob_measure(REFERENCE, Letter.B) == (Letter.B, -1)
        assert bob_measure(REFERENCE, Letter.B_PRIME) == (Letter.B_PRIME, +1)

    def test_front_zero_b_neighbour(self):
        assert bob_measure(ServingConfig(0, NORMAL), Letter.B) == (Letter.B, +1)

    def test_a_type_letter_rejected(self):
        with pytest.raises(ValueError):
            bob_measure(REFERENCE, Letter.A)

    def test_orientation_independent(self):
        for front in A_CELLS:
            for letter in B_LETTERS:
                assert bob_measure(ServingConfig(front, NORMAL), letter) == bob_measure(
                    ServingConfig(front, UPSIDE_DOWN), letter
                )


class TestAcceptedProductTable:
    def test_exhaustive_products(self):
        # Whenever Alice accepts, the pair's product is +1, except (A', B')
        # which is -1 - in every one of the 8 x 2 cases.
        for config in all_configs():
            alice = alice_measure(config, ACCEPT)
            for letter in B_LETTERS:
                bob = bob_measure(config, letter)
                assert alice.value * bob.value == product_target(alice.letter, letter)

    def test_target_table(self):
        assert product_target(Letter.A, Letter.B) == +1
        assert product_target(Letter.A, Letter.B_PRIME) == +1
        assert product_target(Letter.A_PRIME, Letter.B) == +1
        assert product_target(Letter.A_PRIME, Letter.B_PRIME) == -1
        with pytest.raises(ValueError):
            product_target(Letter.B, Letter.B)


class TestRejectedIndependence:
    def test_rejected_values_balanced_given_any_bob_outcome(self):
        # Over the 16 equiprobable servings, conditioning on Bob's letter and
        # outcome leaves Alice's rejected value split evenly between +1 and -1.
        for letter in B_LETTERS:
            for bob_value in (+1, -1):
                rejected = [
                    alice_measure(config, REJECT).value
                    for config in all_configs()
                    for _side in ("left", "right")
                    if bob_measure(config, letter).value == bob_value
                ]
                assert len(rejected) == 8
                assert rejected.count(+1) == rejected.count(-1) == 4


class TestSequentialWalk:
    def test_reference_order_dependence(self):
        start = WalkState(2, NORMAL)

        first, state = sequential_measure(start, Letter.A_PRIME)
        second, state = sequential_measure(state, Letter.A)
        assert (first.value, second.value) == (-1, +1)
        assert state.position == 0

        first, state = sequential_measure(start, Letter.A)
        second, state = sequential_measure(state, Letter.A_PRIME)
        assert (first.value, second.value) == (+1, +1)
        assert state.position == 6

    def test_remeasuring_is_repeatable(self):
        state = WalkState(2, NORMAL)
        for _ in range(3):
            result, state = sequential_measure(state, Letter.A_PRIME)
            assert result == (Letter.A_PRIME, -1)
            assert state == WalkState(2, NORMAL)

    def test_order_matters_from_every_start_state(self):
        # Exhaustive over the 8 start states: the (A, A') value pair always
        # differs between the two measurement orders on this strip.
        for front in A_CELLS:
            for orientation in Orientation:
                start = WalkState(front, orientation)
                a_first, state = sequential_measure(start, Letter.A)
                ap_second, _ = sequential_measure(state, Letter.A_PRIME)
                ap_first, state = sequential_measure(start, Letter.A_PRIME)
                a_second, _ = sequential_measure(state, Letter.A)
                order_one = (a_first.value, ap_second.value)
                order_two = (a_second.value, ap_first.value)
                assert order_one != order_two, (front, orientation)

    def test_alternating_measurements_return_after_four_moves(self):
        for front in A_CELLS:
            for orientation in Orientation:
                state = WalkState(front, orientation)
                for _ in range(4):
                    other = symbol_at(state.position).letter.other()
                    _, state = sequential_measure(state, other)
                assert state == WalkState(front, orientation)

    def test_b_type_letter_rejected(self):
        with pytest.raises(ValueError):
            sequential_measure(WalkState(2, NORMAL), Letter.B)

    def test_walk_must_stand_on_an_a_cell(self):
        with pytest.raises(ValueError):
            sequential_measure(WalkState(1, NORMAL), Letter.A)


class TestNonlocalDirection:
    def _brute_force(self, config, bob_letter):
        # Independent oracle: try both directions, keep those whose landing
        # sign multiplies with Bob's outcome to the pair target.
        alice_letter = suggested_letter(config).other()
        bob_value = bob_measure(config, bob_letter).value
        target = product_target(alice_letter, bob_letter)
        return [
            d
            for d in (+1, -1)
            if symbol_at((config.front_cell + 2 * d) % N_CELLS).sign * bob_value == target
        ]

    def test_reference_directions(self):
        assert nonlocal_reject_direction(REFERENCE, Letter.B) == +1
        assert symbol_at((2 + 2) % N_CELLS).sign * bob_measure(REFERENCE, Letter.B).value == +1
        assert nonlocal_reject_direction(REFERENCE, Letter.B_PRIME) == -1

    def test_exactly_one_direction_works_everywhere(self):
        for config in all_configs():
            for letter in B_LETTERS:
                candidates = self._brute_force(config, letter)
                assert len(candidates) == 1, (config, letter)
                assert nonlocal_reject_direction(config, letter) == candidates[0]

    def test_a_type_letter_rejected(self):
        with pytest.raises(ValueError):
            nonlocal_reject_direction(REFERENCE, Letter.A)

    def test_directed_rejection_hits_the_target_product(self):
        for config in all_configs():
            for letter in B_LETTERS:
                direction = nonlocal_reject_direction(config, letter)
                alice = alice_measure(config, AliceDecision(False, direction))
                bob = bob_measure(config, letter)
                assert alice.value * bob.value == product_target(alice.letter, letter)
