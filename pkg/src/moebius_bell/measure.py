"""Measurements on a served strip.

Alice reads the front cell when she accepts the suggestion it carries;
rejecting means walking two segments clockwise on the side she can see,
which always lands on the other A-type letter. Bob reads whichever of the
two neighbouring cells carries the letter he picked, so his outcome never
depends on the orientation. A sequential walk over one strip exposes the
order dependence of A and A': measuring moves the observer, so the two
observables do not commute.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .strip import (
    N_CELLS,
    Letter,
    ServingConfig,
    Orientation,
    symbol_at,
    traverse,
)

# A rejection walk spans two segments: the other A-type cell on the locally
# visible side. Fixed by the layout, not searched.
REJECT_WALK_SEGMENTS = 2


class MeasurementResult(NamedTuple):
    letter: Letter
    value: int


@dataclass(frozen=True)
class AliceDecision:
    """Accept the suggested letter or reject it.

    ``direction`` only applies to rejections in nonlocal runs: it is the cell
    cycle direction (+1 = increasing index) of the two-segment walk,
    replacing the default clockwise walk.
    """

    accept: bool
    direction: int | None = None

    def __post_init__(self) -> None:
        if self.direction not in (None, 1, -1):
            raise ValueError("direction must be +1 or -1")
        if self.accept and self.direction is not None:
            raise ValueError("direction only applies to rejections")


ACCEPT = AliceDecision(True)
REJECT = AliceDecision(False)


def suggested_letter(config: ServingConfig) -> Letter:
    """Letter on the front cell: what the serving suggests Alice measure."""
    return symbol_at(config.front_cell).letter


def alice_measure(config: ServingConfig, decision: AliceDecision) -> MeasurementResult:
    """Alice's outcome for a single serving.

    Accepting reads the front cell. Rejecting walks two segments clockwise
    (or along an explicitly chosen direction) and reads the landing cell,
    whose letter is always the other A-type one.
    """
    if decision.accept:
        sym = symbol_at(config.front_cell)
    elif decision.direction is None:
        landing = traverse(config.front_cell, config.orientation, REJECT_WALK_SEGMENTS)
        sym = symbol_at(landing)
    else:
        landing = (config.front_cell + REJECT_WALK_SEGMENTS * decision.direction) % N_CELLS
        sym = symbol_at(landing)
    return MeasurementResult(sym.letter, sym.sign)


def bob_measure(config: ServingConfig, letter: Letter) -> MeasurementResult:
    """Bob's outcome: the sign of whichever neighbour cell carries his letter."""
    if not letter.is_b_type:
        raise ValueError(f"Bob measures B or B', not {letter.value}")
    for cell in (config.left_cell, config.right_cell):
        sym = symbol_at(cell)
        if sym.letter is letter:
            return MeasurementResult(sym.letter, sym.sign)
    raise AssertionError("unreachable: both B letters flank every A-type front cell")


class WalkState(NamedTuple):
    position: int
    orientation: Orientation


def sequential_measure(state: WalkState, letter: Letter) -> tuple[MeasurementResult, WalkState]:
    """Measure an A-type letter from a position on the strip.

    Re-measuring the letter at the current position re-reads it without
    moving; asking for the other one walks two segments clockwise first and
    returns the moved state. Threading the state through consecutive calls
    is what makes the measurement order observable.
    """
    if not letter.is_a_type:
        raise ValueError(f"the walk measures A or A', not {letter.value}")
    here = symbol_at(state.position)
    if not here.letter.is_a_type:
        raise ValueError(f"walk position {state.position} carries {here}, not an A-type cell")
    if here.letter is letter:
        return MeasurementResult(here.letter, here.sign), state
    landing = traverse(state.position, state.orientation, REJECT_WALK_SEGMENTS)
    sym = symbol_at(landing)
    return MeasurementResult(sym.letter, sym.sign), WalkState(landing, state.orientation)


def product_target(alice_letter: Letter, bob_letter: Letter) -> int:
    """CHSH-extremal product for a pair: +1 except for (A', B'), which aims at -1."""
    if not alice_letter.is_a_type or not bob_letter.is_b_type:
        raise ValueError("pair must be (A-type, B-type)")
    return -1 if (alice_letter, bob_letter) == (Letter.A_PRIME, Letter.B_PRIME) else +1


def nonlocal_reject_direction(config: ServingConfig, bob_letter: Letter) -> int:
    """Walk direction that lands a rejecting Alice on the extremal product.

    Once Bob's chosen letter is communicated, Alice (who can see the strip
    and therefore knows his outcome) picks the one walk direction whose
    landing sign multiplies with Bob's outcome to the CHSH-extremal value
    for the pair. Exactly one direction works because the two landing cells
    carry opposite signs.
    """
    if not bob_letter.is_b_type:
        raise ValueError(f"Bob's letter must be B-type, not {bob_letter.value}")
    alice_letter = suggested_letter(config).other()
    bob_value = bob_measure(config, bob_letter).value
    target = product_target(alice_letter, bob_letter)
    sign_up = symbol_at((config.front_cell + REJECT_WALK_SEGMENTS) % N_CELLS).sign
    sign_down = symbol_at((config.front_cell - REJECT_WALK_SEGMENTS) % N_CELLS).sign
    assert sign_up == -sign_down, "antipodal A-type cells must carry opposite signs"
    return +1 if sign_up * bob_value == target else -1
