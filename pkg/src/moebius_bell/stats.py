"""Correlator bookkeeping, the Bell statistic, and handedness inference.

The four measured pairs are indexed (A,B), (A',B), (A,B'), (A',B') and enter
the Bell combination with signs +, +, +, -. Counts and product sums are kept
as plain integers so that incremental accumulation, sharded merging, and
batch recomputation from an exported log all land on bit-identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .experiment import PlateSide, TrialLog, TrialRecord
from .strip import A_LETTERS, B_LETTERS, Letter

PAIR_LABELS = ("ab", "a_prime_b", "ab_prime", "a_prime_b_prime")
PAIR_CHSH_SIGNS = (1, 1, 1, -1)
OBSERVABLE_LABELS = ("a", "a_prime", "b", "b_prime")
CLASSICAL_BOUND = 2.0


def pair_index(alice_letter: Letter, bob_letter: Letter) -> int:
    return A_LETTERS.index(alice_letter) + 2 * B_LETTERS.index(bob_letter)


@dataclass
class PairCounts:
    """Per-pair counts and product sums, plus per-observable marginals."""

    pair_n: list[int] = field(default_factory=lambda: [0, 0, 0, 0])
    pair_sum: list[int] = field(default_factory=lambda: [0, 0, 0, 0])
    marginal_n: list[int] = field(default_factory=lambda: [0, 0, 0, 0])
    marginal_sum: list[int] = field(default_factory=lambda: [0, 0, 0, 0])

    @property
    def n_trials(self) -> int:
        return sum(self.pair_n)

    def add_record(self, record: TrialRecord) -> "PairCounts":
        """Fold one trial in: one pair bucket, both marginal buckets."""
        pair = pair_index(record.alice_letter, record.bob_letter)
        product = record.alice_value * record.bob_value
        self.pair_n[pair] += 1
        self.pair_sum[pair] += product
        a_obs = A_LETTERS.index(record.alice_letter)
        b_obs = 2 + B_LETTERS.index(record.bob_letter)
        self.marginal_n[a_obs] += 1
        self.marginal_sum[a_obs] += record.alice_value
        self.marginal_n[b_obs] += 1
        self.marginal_sum[b_obs] += record.bob_value
        return self

    def merge(self, other: "PairCounts") -> "PairCounts":
        """Associative, commutative combine of two shards."""
        return PairCounts(
            pair_n=[a + b for a, b in zip(self.pair_n, other.pair_n)],
            pair_sum=[a + b for a, b in zip(self.pair_sum, other.pair_sum)],
            marginal_n=[a + b for a, b in zip(self.marginal_n, other.marginal_n)],
            marginal_sum=[a + b for a, b in zip(self.marginal_sum, other.marginal_sum)],
        )

    @classmethod
    def from_log(cls, log: TrialLog) -> "PairCounts":
        pair = log.alice_letter.astype(np.int64) + 2 * log.bob_choice.astype(np.int64)
        products = log.alice_value.astype(np.int64) * log.bob_value.astype(np.int64)
        pair_n = np.bincount(pair, minlength=4)
        pair_sum = np.bincount(pair, weights=products, minlength=4)
        a_obs = log.alice_letter.astype(np.int64)
        b_obs = log.bob_choice.astype(np.int64)
        marginal_n = np.concatenate([np.bincount(a_obs, minlength=2), np.bincount(b_obs, minlength=2)])
        marginal_sum = np.concatenate(
            [
                np.bincount(a_obs, weights=log.alice_value.astype(np.int64), minlength=2),
                np.bincount(b_obs, weights=log.bob_value.astype(np.int64), minlength=2),
            ]
        )
        return cls(
            pair_n=[int(x) for x in pair_n],
            pair_sum=[int(x) for x in pair_sum],
            marginal_n=[int(x) for x in marginal_n],
            marginal_sum=[int(x) for x in marginal_sum],
        )


def accumulate(counts: PairCounts, record: TrialRecord) -> PairCounts:
    return counts.add_record(record)


@dataclass(frozen=True)
class CorrelatorEstimate:
    value: float
    stderr: float
    n: int

    @property
    def defined(self) -> bool:
        return self.n > 0


def _estimate(n: int, total: int) -> CorrelatorEstimate:
    if n == 0:
        return CorrelatorEstimate(math.nan, math.nan, 0)
    value = total / n
    # plug-in binomial spread of a +/-1 product mean
    stderr = math.sqrt(max(0.0, 1.0 - value * value) / n)
    return CorrelatorEstimate(value, stderr, n)


@dataclass(frozen=True)
class BellReport:
    """The four correlators and the Bell combination S = E(AB) + E(A'B) + E(AB') - E(A'B')."""

    correlators: tuple[CorrelatorEstimate, CorrelatorEstimate, CorrelatorEstimate, CorrelatorEstimate]
    marginals: tuple[CorrelatorEstimate, CorrelatorEstimate, CorrelatorEstimate, CorrelatorEstimate]
    s_value: float
    s_stderr: float
    p_hat: float
    violation_z: float | None
    n_trials: int
    classical_bound: float = CLASSICAL_BOUND
    exact: bool = False

    @property
    def defined(self) -> bool:
        return self.exact or all(c.defined for c in self.correlators)

    def to_dict(self) -> dict:
        def clean(x: float | None) -> float | None:
            if x is None or (isinstance(x, float) and math.isnan(x)):
                return None
            return float(x)

        doc: dict = {
            "defined": self.defined,
            "exact": self.exact,
            "n_trials": self.n_trials,
            "s_value": clean(self.s_value),
            "s_stderr": clean(self.s_stderr),
            "p_hat": clean(self.p_hat),
            "classical_bound": self.classical_bound,
            "violation_z": clean(self.violation_z),
        }
        for label, est in zip(PAIR_LABELS, self.correlators):
            doc[f"correlator_{label}"] = clean(est.value)
            doc[f"correlator_{label}_stderr"] = clean(est.stderr)
            doc[f"correlator_{label}_n"] = est.n
        for label, est in zip(OBSERVABLE_LABELS, self.marginals):
            doc[f"marginal_{label}"] = clean(est.value)
            doc[f"marginal_{label}_n"] = est.n
        return doc


def bell_report(counts: PairCounts) -> BellReport:
    """Empirical Bell report; undefined (never NaN-crashing) when a pair is empty."""
    correlators = tuple(_estimate(n, total) for n, total in zip(counts.pair_n, counts.pair_sum))
    marginals = tuple(_estimate(n, total) for n, total in zip(counts.marginal_n, counts.marginal_sum))
    if all(c.defined for c in correlators):
        s_value = sum(sign * c.value for sign, c in zip(PAIR_CHSH_SIGNS, correlators))
        s_stderr = math.sqrt(sum(c.stderr**2 for c in correlators))
        p_hat = s_value / 4.0
        violation_z = (s_value - CLASSICAL_BOUND) / s_stderr if s_stderr > 0 else None
    else:
        s_value = s_stderr = p_hat = math.nan
        violation_z = None
    return BellReport(
        correlators=correlators,
        marginals=marginals,
        s_value=s_value,
        s_stderr=s_stderr,
        p_hat=p_hat,
        violation_z=violation_z,
        n_trials=counts.n_trials,
    )


def bell_report_from_log(log: TrialLog) -> BellReport:
    return bell_report(PairCounts.from_log(log))


class Verdict(Enum):
    LEFT_BIASED = "left_biased"
    RIGHT_BIASED = "right_biased"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class HandednessReport:
    """Side-split Bell averages: does the plate side change the acceptance rate?"""

    left: BellReport
    right: BellReport
    p_hat_left: float
    p_hat_right: float
    difference: float
    difference_stderr: float
    verdict: Verdict
    sigma_threshold: float = 3.0

    def to_dict(self) -> dict:
        def clean(x: float) -> float | None:
            return None if math.isnan(x) else float(x)

        return {
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "p_hat_left": clean(self.p_hat_left),
            "p_hat_right": clean(self.p_hat_right),
            "difference": clean(self.difference),
            "difference_stderr": clean(self.difference_stderr),
            "verdict": self.verdict.value,
            "sigma_threshold": self.sigma_threshold,
        }


def handedness_from_reports(
    left: BellReport, right: BellReport, sigma_threshold: float = 3.0
) -> HandednessReport:
    if left.defined and right.defined:
        difference = left.p_hat - right.p_hat
        difference_stderr = math.hypot(left.s_stderr, right.s_stderr) / 4.0
        if abs(difference) > sigma_threshold * difference_stderr:
            verdict = Verdict.LEFT_BIASED if difference > 0 else Verdict.RIGHT_BIASED
        else:
            verdict = Verdict.INCONCLUSIVE
    else:
        difference = difference_stderr = math.nan
        verdict = Verdict.INCONCLUSIVE
    return HandednessReport(
        left=left,
        right=right,
        p_hat_left=left.p_hat,
        p_hat_right=right.p_hat,
        difference=difference,
        difference_stderr=difference_stderr,
        verdict=verdict,
        sigma_threshold=sigma_threshold,
    )


def handedness(left_counts: PairCounts, right_counts: PairCounts, sigma_threshold: float = 3.0) -> HandednessReport:
    return handedness_from_reports(bell_report(left_counts), bell_report(right_counts), sigma_threshold)


def split_by_side(log: TrialLog) -> tuple[TrialLog, TrialLog]:
    left_mask = log.side == 0
    left = TrialLog(*(col[left_mask] for col in log._columns()))
    right = TrialLog(*(col[~left_mask] for col in log._columns()))
    return left, right


def handedness_from_log(log: TrialLog, sigma_threshold: float = 3.0) -> HandednessReport:
    left, right = split_by_side(log)
    return handedness(PairCounts.from_log(left), PairCounts.from_log(right), sigma_threshold)


def accept_rates_by_side(log: TrialLog) -> dict[str, float | None]:
    rates: dict[str, float | None] = {}
    for side, code in ((PlateSide.LEFT, 0), (PlateSide.RIGHT, 1)):
        mask = log.side == code
        served = int(mask.sum())
        rates[side.value] = float(log.accepted[mask].sum() / served) if served else None
    return rates
