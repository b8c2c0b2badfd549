"""Trial generation and seeded experiment runs.

A run is a pure function of its :class:`ExperimentSpec`. The single 64-bit
seed expands into three named sub-streams (serving, bob, alice) so that
changing one policy's consumption pattern never perturbs the draws of the
others; this is what makes the locality audit and regression seeds stable.

Two engines produce identical logs: a columnar engine built on the kernels
(used by :func:`run_experiment`) and the trial-by-trial
:class:`ExperimentRun` driver, which interactive sessions use to thread
human decisions through the same mechanics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator, Sequence, overload

import numpy as np

from . import kernels, tables
from .measure import (
    ACCEPT,
    REJECT,
    AliceDecision,
    alice_measure,
    bob_measure,
    nonlocal_reject_direction,
)
from .strip import (
    B_LETTERS,
    A_LETTERS,
    Letter,
    Orientation,
    ServingConfig,
    config_from_index,
    config_index,
)


class PolicyError(ValueError):
    """A policy cannot be used the way it was asked to."""


class ScriptExhaustedError(PolicyError):
    """A scripted policy ran out of entries before the run finished."""


class Mode(Enum):
    STANDARD = "standard"
    NONLOCAL = "nonlocal"


class PlateSide(Enum):
    LEFT = "left"
    RIGHT = "right"


def _check_probability(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise PolicyError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class FixedP:
    """Accept the suggestion with a constant probability."""

    p: float

    def __post_init__(self) -> None:
        _check_probability(self.p, "p")


@dataclass(frozen=True)
class SidedP:
    """Side-dependent acceptance: the plate side picks the probability."""

    p_left: float
    p_right: float

    def __post_init__(self) -> None:
        _check_probability(self.p_left, "p_left")
        _check_probability(self.p_right, "p_right")


@dataclass(frozen=True)
class Fatigue:
    """Acceptance grows with the serving arm's accumulated rejections.

    Every rejection tires the arm that had to rotate the strip; the next
    suggestion served on that side is accepted with probability
    ``p0 + (1 - p0) * (1 - exp(-n / tau))`` where n counts that side's earlier
    rejections. Monotone toward 1; the functional form is this artifact's
    choice.
    """

    p0: float
    tau: float

    def __post_init__(self) -> None:
        _check_probability(self.p0, "p0")
        if not self.tau > 0:
            raise PolicyError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class ScriptedAlice:
    """Accept/reject flags consumed in order; exhaustion aborts the run."""

    decisions: tuple[bool, ...]


@dataclass(frozen=True)
class NonlocalOptimal:
    """Accept with probability p; reject along the signalling-optimal walk."""

    p: float

    def __post_init__(self) -> None:
        _check_probability(self.p, "p")


@dataclass(frozen=True)
class ExternalAlice:
    """Decisions arrive per trial from an outside driver (e.g. a human session)."""


@dataclass(frozen=True)
class UniformBob:
    """Free choice: B or B' with probability 1/2 each."""


@dataclass(frozen=True)
class ScriptedBob:
    """Letters consumed in order; exhaustion aborts the run."""

    letters: tuple[Letter, ...]

    def __post_init__(self) -> None:
        for letter in self.letters:
            if not letter.is_b_type:
                raise PolicyError(f"Bob's script may only contain B-type letters, got {letter.value}")


@dataclass(frozen=True)
class ExternalBob:
    """Choices arrive per trial from an outside driver."""


AlicePolicy = FixedP | SidedP | Fatigue | ScriptedAlice | NonlocalOptimal | ExternalAlice
BobPolicy = UniformBob | ScriptedBob | ExternalBob


@dataclass
class FatigueState:
    """Per-arm rejection counters, monotone within a run."""

    rejections_left: int = 0
    rejections_right: int = 0

    def count(self, side: PlateSide) -> int:
        return self.rejections_left if side is PlateSide.LEFT else self.rejections_right

    def note_rejection(self, side: PlateSide) -> None:
        if side is PlateSide.LEFT:
            self.rejections_left += 1
        else:
            self.rejections_right += 1


def accept_probability(
    policy: AlicePolicy, side: PlateSide, fatigue: FatigueState | None = None
) -> float:
    """Probability that Alice accepts the next suggestion served on ``side``."""
    if isinstance(policy, FixedP):
        return policy.p
    if isinstance(policy, NonlocalOptimal):
        return policy.p
    if isinstance(policy, SidedP):
        return policy.p_left if side is PlateSide.LEFT else policy.p_right
    if isinstance(policy, Fatigue):
        if fatigue is None:
            raise PolicyError("fatigue policy needs a FatigueState")
        n = fatigue.count(side)
        return policy.p0 + (1.0 - policy.p0) * (1.0 - math.exp(-n / policy.tau))
    raise PolicyError(f"{type(policy).__name__} does not define an acceptance probability")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything that determines a run, including its randomness."""

    n_trials: int
    seed: int
    alice: AlicePolicy
    bob: BobPolicy = UniformBob()
    mode: Mode = Mode.STANDARD

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise PolicyError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.mode is Mode.NONLOCAL and not isinstance(self.alice, (NonlocalOptimal, ExternalAlice)):
            raise PolicyError("nonlocal mode requires a NonlocalOptimal or ExternalAlice policy")
        if self.mode is Mode.STANDARD and isinstance(self.alice, NonlocalOptimal):
            raise PolicyError("NonlocalOptimal only makes sense in nonlocal mode")


class Streams:
    """Named independent RNG sub-streams expanded from one seed."""

    __slots__ = ("serving", "bob", "alice")

    def __init__(self, seed: int):
        serving_ss, bob_ss, alice_ss = np.random.SeedSequence(seed).spawn(3)
        self.serving = np.random.Generator(np.random.PCG64(serving_ss))
        self.bob = np.random.Generator(np.random.PCG64(bob_ss))
        self.alice = np.random.Generator(np.random.PCG64(alice_ss))


def draw_serving(rng: np.random.Generator) -> tuple[ServingConfig, PlateSide]:
    """One uniform draw over the 16 equiprobable servings (8 configs x 2 sides)."""
    raw = int(rng.integers(0, 16))
    side = PlateSide.LEFT if raw & 1 == 0 else PlateSide.RIGHT
    return config_from_index(raw >> 1), side


@dataclass(frozen=True)
class TrialRecord:
    """One course of the dinner: the serving and both observers' moves."""

    index: int
    config: ServingConfig
    side: PlateSide
    bob_letter: Letter
    bob_value: int
    alice_accepted: bool
    alice_letter: Letter
    alice_value: int
    alice_direction: int | None = None

    def to_wire(self) -> dict:
        return {
            "index": self.index,
            "front_cell": self.config.front_cell,
            "orientation": self.config.orientation.value,
            "side": self.side.value,
            "bob_letter": self.bob_letter.value,
            "bob_value": self.bob_value,
            "alice_accepted": self.alice_accepted,
            "alice_letter": self.alice_letter.value,
            "alice_value": self.alice_value,
            "alice_direction": self.alice_direction,
        }

    @classmethod
    def from_wire(cls, doc: dict) -> "TrialRecord":
        return cls(
            index=int(doc["index"]),
            config=ServingConfig(int(doc["front_cell"]), Orientation(doc["orientation"])),
            side=PlateSide(doc["side"]),
            bob_letter=Letter(doc["bob_letter"]),
            bob_value=int(doc["bob_value"]),
            alice_accepted=bool(doc["alice_accepted"]),
            alice_letter=Letter(doc["alice_letter"]),
            alice_value=int(doc["alice_value"]),
            alice_direction=None if doc.get("alice_direction") is None else int(doc["alice_direction"]),
        )


def finish_trial(
    index: int,
    config: ServingConfig,
    side: PlateSide,
    bob_letter: Letter,
    decision: AliceDecision,
    mode: Mode = Mode.STANDARD,
) -> TrialRecord:
    """Resolve both outcomes once every choice for the trial is in."""
    bob_result = bob_measure(config, bob_letter)
    if decision.accept:
        alice_result = alice_measure(config, ACCEPT)
    elif mode is Mode.NONLOCAL:
        if decision.direction is None:
            raise PolicyError("a nonlocal rejection must carry a walk direction")
        alice_result = alice_measure(config, decision)
    else:
        if decision.direction is not None:
            raise PolicyError("a directed rejection is a nonlocal-mode move")
        alice_result = alice_measure(config, REJECT)
    return TrialRecord(
        index=index,
        config=config,
        side=side,
        bob_letter=bob_result.letter,
        bob_value=bob_result.value,
        alice_accepted=decision.accept,
        alice_letter=alice_result.letter,
        alice_value=alice_result.value,
        alice_direction=None if decision.accept else decision.direction,
    )


_SIDES = (PlateSide.LEFT, PlateSide.RIGHT)


class TrialLog(Sequence[TrialRecord]):
    """Immutable columnar trial log that behaves as a sequence of records."""

    __slots__ = ("config_idx", "side", "bob_choice", "bob_value", "accepted", "alice_letter", "alice_value", "direction")

    def __init__(self, config_idx, side, bob_choice, bob_value, accepted, alice_letter, alice_value, direction):
        self.config_idx = np.asarray(config_idx, np.uint8)
        self.side = np.asarray(side, np.uint8)
        self.bob_choice = np.asarray(bob_choice, np.uint8)
        self.bob_value = np.asarray(bob_value, np.int8)
        self.accepted = np.asarray(accepted, np.bool_)
        self.alice_letter = np.asarray(alice_letter, np.uint8)
        self.alice_value = np.asarray(alice_value, np.int8)
        self.direction = np.asarray(direction, np.int8)  # 0 = no signalling walk
        for arr in self._columns():
            arr.setflags(write=False)

    def _columns(self) -> tuple[np.ndarray, ...]:
        return (
            self.config_idx,
            self.side,
            self.bob_choice,
            self.bob_value,
            self.accepted,
            self.alice_letter,
            self.alice_value,
            self.direction,
        )

    def __len__(self) -> int:
        return len(self.config_idx)

    @overload
    def __getitem__(self, item: int) -> TrialRecord: ...

    @overload
    def __getitem__(self, item: slice) -> "TrialLog": ...

    def __getitem__(self, item):
        if isinstance(item, slice):
            return TrialLog(*(col[item] for col in self._columns()))
        i = int(item)
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        direction = int(self.direction[i])
        return TrialRecord(
            index=i,
            config=config_from_index(int(self.config_idx[i])),
            side=_SIDES[int(self.side[i])],
            bob_letter=B_LETTERS[int(self.bob_choice[i])],
            bob_value=int(self.bob_value[i]),
            alice_accepted=bool(self.accepted[i]),
            alice_letter=A_LETTERS[int(self.alice_letter[i])],
            alice_value=int(self.alice_value[i]),
            alice_direction=direction if direction != 0 else None,
        )

    def __iter__(self) -> Iterator[TrialRecord]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrialLog):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self._columns(), other._columns()))

    @classmethod
    def from_records(cls, records: Iterable[TrialRecord]) -> "TrialLog":
        records = list(records)
        return cls(
            config_idx=[config_index(r.config) for r in records],
            side=[0 if r.side is PlateSide.LEFT else 1 for r in records],
            bob_choice=[B_LETTERS.index(r.bob_letter) for r in records],
            bob_value=[r.bob_value for r in records],
            accepted=[r.alice_accepted for r in records],
            alice_letter=[A_LETTERS.index(r.alice_letter) for r in records],
            alice_value=[r.alice_value for r in records],
            direction=[0 if r.alice_direction is None else r.alice_direction for r in records],
        )

    def write_jsonl(self, fp: IO[str]) -> None:
        for record in self:
            fp.write(json.dumps(record.to_wire(), sort_keys=True))
            fp.write("\n")

    @classmethod
    def read_jsonl(cls, fp: IO[str]) -> "TrialLog":
        return cls.from_records(TrialRecord.from_wire(json.loads(line)) for line in fp if line.strip())


class ExperimentRun:
    """Trial-by-trial driver. The columnar engine must match it draw for draw."""

    def __init__(self, spec: ExperimentSpec):
        if isinstance(spec.alice, ExternalAlice) or isinstance(spec.bob, ExternalBob):
            raise PolicyError("external policies need an interactive driver, not a batch run")
        self.spec = spec
        self.streams = Streams(spec.seed)
        self.fatigue = FatigueState()
        self._index = 0

    def _bob_letter(self) -> Letter:
        bob = self.spec.bob
        if isinstance(bob, UniformBob):
            return B_LETTERS[int(self.streams.bob.integers(0, 2))]
        if self._index >= len(bob.letters):
            raise ScriptExhaustedError(f"Bob's script ended after {len(bob.letters)} trials")
        return bob.letters[self._index]

    def _alice_decision(self, config: ServingConfig, side: PlateSide, bob_letter: Letter) -> AliceDecision:
        alice = self.spec.alice
        if isinstance(alice, ScriptedAlice):
            if self._index >= len(alice.decisions):
                raise ScriptExhaustedError(f"Alice's script ended after {len(alice.decisions)} trials")
            return ACCEPT if alice.decisions[self._index] else REJECT
        u = float(self.streams.alice.random())
        p = accept_probability(alice, side, self.fatigue)
        if u < p:
            return ACCEPT
        if self.spec.mode is Mode.NONLOCAL:
            return AliceDecision(False, nonlocal_reject_direction(config, bob_letter))
        return REJECT

    def next_trial(self) -> TrialRecord:
        if self._index >= self.spec.n_trials:
            raise IndexError("run is complete")
        config, side = draw_serving(self.streams.serving)
        bob_letter = self._bob_letter()
        decision = self._alice_decision(config, side, bob_letter)
        record = finish_trial(self._index, config, side, bob_letter, decision, self.spec.mode)
        if not record.alice_accepted:
            self.fatigue.note_rejection(side)
        self._index += 1
        return record

    def run(self) -> TrialLog:
        return TrialLog.from_records(self.next_trial() for _ in range(self.spec.n_trials))


def _draw_arrays(spec: ExperimentSpec, streams: Streams) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = spec.n_trials
    raw = streams.serving.integers(0, 16, size=n)
    config_idx = (raw >> 1).astype(np.uint8)
    side = (raw & 1).astype(np.uint8)
    if isinstance(spec.bob, UniformBob):
        bob_choice = streams.bob.integers(0, 2, size=n).astype(np.uint8)
    else:
        if len(spec.bob.letters) < n:
            raise ScriptExhaustedError(f"Bob's script ended after {len(spec.bob.letters)} trials")
        bob_choice = np.array([B_LETTERS.index(letter) for letter in spec.bob.letters[:n]], np.uint8)
    if isinstance(spec.alice, ScriptedAlice):
        u = np.empty(0)  # scripts do not consume the alice stream
    else:
        u = streams.alice.random(size=n)
    return config_idx, side, bob_choice, u


def run_experiment(spec: ExperimentSpec) -> TrialLog:
    """Run the whole experiment; the log is a pure function of its ExperimentSpec."""
    if isinstance(spec.alice, ExternalAlice) or isinstance(spec.bob, ExternalBob):
        raise PolicyError("external policies need an interactive driver, not a batch run")
    streams = Streams(spec.seed)
    config_idx, side, bob_choice, u = _draw_arrays(spec, streams)

    alice = spec.alice
    if isinstance(alice, ScriptedAlice):
        if len(alice.decisions) < spec.n_trials:
            raise ScriptExhaustedError(f"Alice's script ended after {len(alice.decisions)} trials")
        accepted = np.array(alice.decisions[: spec.n_trials], np.bool_)
        suggested = tables.SUGGESTED[config_idx]
        alice_letter = np.where(accepted, suggested, 1 - suggested).astype(np.uint8)
        alice_value = np.where(accepted, tables.ACCEPT_VALUE[config_idx], tables.REJECT_VALUE[config_idx])
        bob_value = tables.BOB_VALUE[config_idx, bob_choice]
        direction = np.zeros(spec.n_trials, np.int8)
    elif isinstance(alice, Fatigue):
        accepted, alice_letter, alice_value, bob_value, direction = kernels.simulate_fatigue(
            config_idx, side, bob_choice, u, alice.p0, alice.tau
        )
    else:
        if isinstance(alice, SidedP):
            p_left, p_right = alice.p_left, alice.p_right
        else:
            p_left = p_right = alice.p
        simulate = kernels.simulate_nonlocal if spec.mode is Mode.NONLOCAL else kernels.simulate_standard
        accepted, alice_letter, alice_value, bob_value, direction = simulate(
            config_idx, side, bob_choice, u, p_left, p_right
        )

    return TrialLog(config_idx, side, bob_choice, bob_value, accepted, alice_letter, alice_value, direction)
