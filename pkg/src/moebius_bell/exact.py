"""Exact expectations by enumeration of the finite outcome space.

For history-free policies every trial is an independent draw from a finite
distribution: 8 configurations x 2 plate sides x 2 Bob letters, with the
accept/reject split weighted by the acceptance probability. Enumerating it
with rational weights gives the conditional correlators, the marginals and
the Bell average exactly; in particular S equals 4p to full precision of
the rational weights, with p taken as the exact binary value of the float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .experiment import (
    FixedP,
    Mode,
    NonlocalOptimal,
    PlateSide,
    PolicyError,
    SidedP,
)
from .measure import (
    ACCEPT,
    REJECT,
    AliceDecision,
    alice_measure,
    bob_measure,
    nonlocal_reject_direction,
)
from .stats import (
    BellReport,
    CorrelatorEstimate,
    HandednessReport,
    PAIR_CHSH_SIGNS,
    handedness_from_reports,
    pair_index,
)
from .strip import A_LETTERS, B_LETTERS, Letter, all_configs

EnumerablePolicy = FixedP | SidedP | NonlocalOptimal


@dataclass(frozen=True)
class ExactExpectations:
    """Conditional correlators, marginals and Bell average, all exact rationals."""

    correlators: tuple[Fraction, Fraction, Fraction, Fraction]
    pair_probability: tuple[Fraction, Fraction, Fraction, Fraction]
    marginals: tuple[Fraction, Fraction, Fraction, Fraction]
    s: Fraction

    @property
    def p_hat(self) -> Fraction:
        return self.s / 4

    def bell_report(self) -> BellReport:
        correlators = tuple(CorrelatorEstimate(float(c), 0.0, 0) for c in self.correlators)
        marginals = tuple(CorrelatorEstimate(float(m), 0.0, 0) for m in self.marginals)
        return BellReport(
            correlators=correlators,
            marginals=marginals,
            s_value=float(self.s),
            s_stderr=0.0,
            p_hat=float(self.s / 4),
            violation_z=None,
            n_trials=0,
            exact=True,
        )


def _accept_fraction(policy: EnumerablePolicy, side: PlateSide) -> Fraction:
    if isinstance(policy, SidedP):
        p = policy.p_left if side is PlateSide.LEFT else policy.p_right
    else:
        p = policy.p
    return Fraction(p)


def exact_expectations(
    policy: EnumerablePolicy, mode: Mode = Mode.STANDARD, side: PlateSide | None = None
) -> ExactExpectations:
    """Enumerate the outcome space under a history-free policy.

    ``side`` restricts the enumeration to servings on one plate side (used
    for the per-side Bell averages behind handedness inference).
    """
    if not isinstance(policy, (FixedP, SidedP, NonlocalOptimal)):
        raise PolicyError(f"{type(policy).__name__} cannot be enumerated exactly")
    if mode is Mode.NONLOCAL and not isinstance(policy, NonlocalOptimal):
        raise PolicyError("nonlocal enumeration requires the NonlocalOptimal policy")
    if mode is Mode.STANDARD and isinstance(policy, NonlocalOptimal):
        raise PolicyError("NonlocalOptimal only makes sense in nonlocal mode")

    sides = (side,) if side is not None else (PlateSide.LEFT, PlateSide.RIGHT)
    pair_weight = [Fraction(0)] * 4
    pair_weighted_sum = [Fraction(0)] * 4
    marginal_weight = [Fraction(0)] * 4
    marginal_weighted_sum = [Fraction(0)] * 4

    def tally(weight: Fraction, alice_letter: Letter, alice_value: int, bob_letter: Letter, bob_value: int) -> None:
        if weight == 0:
            return
        pair = pair_index(alice_letter, bob_letter)
        pair_weight[pair] += weight
        pair_weighted_sum[pair] += weight * alice_value * bob_value
        a_obs = A_LETTERS.index(alice_letter)
        b_obs = 2 + B_LETTERS.index(bob_letter)
        marginal_weight[a_obs] += weight
        marginal_weighted_sum[a_obs] += weight * alice_value
        marginal_weight[b_obs] += weight
        marginal_weighted_sum[b_obs] += weight * bob_value

    for config in all_configs():
        for plate_side in sides:
            serving_weight = Fraction(1, 8) / len(sides)
            p_accept = _accept_fraction(policy, plate_side)
            accepted_result = alice_measure(config, ACCEPT)
            for bob_letter in B_LETTERS:
                branch_weight = serving_weight / 2
                bob_value = bob_measure(config, bob_letter).value
                tally(
                    branch_weight * p_accept,
                    accepted_result.letter,
                    accepted_result.value,
                    bob_letter,
                    bob_value,
                )
                if mode is Mode.NONLOCAL:
                    direction = nonlocal_reject_direction(config, bob_letter)
                    rejected_result = alice_measure(config, AliceDecision(False, direction))
                else:
                    rejected_result = alice_measure(config, REJECT)
                tally(
                    branch_weight * (1 - p_accept),
                    rejected_result.letter,
                    rejected_result.value,
                    bob_letter,
                    bob_value,
                )

    correlators = tuple(
        s / w if w else Fraction(0) for s, w in zip(pair_weighted_sum, pair_weight)
    )
    marginals = tuple(
        s / w if w else Fraction(0) for s, w in zip(marginal_weighted_sum, marginal_weight)
    )
    total = sum(pair_weight)
    pair_probability = tuple(w / total for w in pair_weight)
    s = sum(sign * c for sign, c in zip(PAIR_CHSH_SIGNS, correlators))
    return ExactExpectations(
        correlators=correlators,
        pair_probability=pair_probability,
        marginals=marginals,
        s=s,
    )


def exact_handedness(
    policy: EnumerablePolicy, mode: Mode = Mode.STANDARD, sigma_threshold: float = 3.0
) -> HandednessReport:
    """Per-side exact Bell reports and the difference verdict."""
    left = exact_expectations(policy, mode, side=PlateSide.LEFT).bell_report()
    right = exact_expectations(policy, mode, side=PlateSide.RIGHT).bell_report()
    return handedness_from_reports(left, right, sigma_threshold)
