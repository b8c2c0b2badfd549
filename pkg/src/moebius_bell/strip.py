"""Geometry of the four-segment Moebius strip behind the Bell-test toy model.

The strip has four segments and, being one-sided, every segment can be seen
from two faces. We flatten this to a single 8-cell cycle (the orientation
double cover): ``cell = segment + 4 * face``, and walking past segment 3
continues onto the opposite face of segment 0. Cells 0..3 carry the printed
sequence A+, B'+, A'-, B-; cells 4..7 carry the same letters with every sign
reversed, so ``antipode`` (the opposite-face copy of a cell) always flips the
sign and keeps the letter.

An observer sees three consecutive cells: a front cell, which by convention
of the serving always carries an A-type letter, and its two B-type
neighbours. Which neighbour appears on the observer's left, and which way a
"clockwise" walk moves on the cycle, both depend on whether the strip was
served normally or upside-down.

Convention (recorded, not physical): NORMAL is the serving whose clockwise
walk decreases the cell index. Only the relation between the two
orientations matters; this absolute choice is anchored so that the reference
serving (front cell 2, normal) yields A = +1 on a rejection walk.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

N_CELLS = 8
SEGMENTS = 4


class Letter(Enum):
    A = "A"
    A_PRIME = "A'"
    B = "B"
    B_PRIME = "B'"

    @property
    def is_a_type(self) -> bool:
        return self in (Letter.A, Letter.A_PRIME)

    @property
    def is_b_type(self) -> bool:
        return not self.is_a_type

    def other(self) -> "Letter":
        """The complementary letter of the same type (A <-> A', B <-> B')."""
        return _OTHER[self]


_OTHER = {
    Letter.A: Letter.A_PRIME,
    Letter.A_PRIME: Letter.A,
    Letter.B: Letter.B_PRIME,
    Letter.B_PRIME: Letter.B,
}

A_LETTERS = (Letter.A, Letter.A_PRIME)
B_LETTERS = (Letter.B, Letter.B_PRIME)


class Symbol(NamedTuple):
    letter: Letter
    sign: int

    def __str__(self) -> str:
        return f"{self.letter.value}{'+' if self.sign > 0 else '-'}"


class Orientation(Enum):
    NORMAL = "normal"
    UPSIDE_DOWN = "upside_down"

    def flipped(self) -> "Orientation":
        return Orientation.UPSIDE_DOWN if self is Orientation.NORMAL else Orientation.NORMAL


# One face reads A+ B'+ A'- B- along segments 0..3; the reverse face repeats
# the letters with opposite signs.
SYMBOLS: tuple[Symbol, ...] = (
    Symbol(Letter.A, +1),
    Symbol(Letter.B_PRIME, +1),
    Symbol(Letter.A_PRIME, -1),
    Symbol(Letter.B, -1),
    Symbol(Letter.A, -1),
    Symbol(Letter.B_PRIME, -1),
    Symbol(Letter.A_PRIME, +1),
    Symbol(Letter.B, +1),
)

A_CELLS = (0, 2, 4, 6)
B_CELLS = (1, 3, 5, 7)


def _check_cell(cell: int) -> None:
    if not isinstance(cell, int) or isinstance(cell, bool):
        raise TypeError(f"cell index must be an int, got {type(cell).__name__}")
    if not 0 <= cell < N_CELLS:
        raise ValueError(f"cell index {cell} outside 0..{N_CELLS - 1}")


def symbol_at(cell: int) -> Symbol:
    """Symbol printed on a cell of the double cover."""
    _check_cell(cell)
    return SYMBOLS[cell]


def antipode(cell: int) -> int:
    """Opposite-face copy of a cell: same letter, reversed sign."""
    _check_cell(cell)
    return (cell + 4) % N_CELLS


def clockwise_step(orientation: Orientation) -> int:
    """Per-segment step of a clockwise walk, in cell-index units."""
    return -1 if orientation is Orientation.NORMAL else +1


def traverse(start: int, orientation: Orientation, segments: int) -> int:
    """Cell reached after walking clockwise for the given number of segments."""
    _check_cell(start)
    if segments < 0:
        raise ValueError("segments must be non-negative")
    return (start + segments * clockwise_step(orientation)) % N_CELLS


@dataclass(frozen=True)
class ServingConfig:
    """One way a strip can land in front of an observer.

    ``front_cell`` is the cell the observer faces (always A-type under the
    serving rules); ``orientation`` distinguishes the two ways the same front
    symbol can be presented, which swaps the left/right neighbours and
    reverses the clockwise walk.
    """

    front_cell: int
    orientation: Orientation

    def __post_init__(self) -> None:
        _check_cell(self.front_cell)
        if not symbol_at(self.front_cell).letter.is_a_type:
            raise ValueError(
                f"front cell {self.front_cell} carries {symbol_at(self.front_cell)}, not an A-type letter"
            )

    @property
    def left_cell(self) -> int:
        # The clockwise neighbour sits on the observer's left: serving
        # (front 2, normal) shows B'+ (cell 1) on the left.
        return (self.front_cell + clockwise_step(self.orientation)) % N_CELLS

    @property
    def right_cell(self) -> int:
        return (self.front_cell - clockwise_step(self.orientation)) % N_CELLS


class LocalView(NamedTuple):
    front: Symbol
    left: Symbol
    right: Symbol


def local_view(config: ServingConfig) -> LocalView:
    """The three symbols an observer can actually see for a serving."""
    return LocalView(
        front=symbol_at(config.front_cell),
        left=symbol_at(config.left_cell),
        right=symbol_at(config.right_cell),
    )


def all_configs() -> tuple[ServingConfig, ...]:
    """All 8 servings, front cells ascending, normal before upside-down."""
    return tuple(
        ServingConfig(front, orientation)
        for front in A_CELLS
        for orientation in (Orientation.NORMAL, Orientation.UPSIDE_DOWN)
    )


N_CONFIGS = 8


def config_index(config: ServingConfig) -> int:
    """Position of a serving in the ``all_configs()`` ordering."""
    return (config.front_cell // 2) * 2 + (0 if config.orientation is Orientation.NORMAL else 1)


def config_from_index(index: int) -> ServingConfig:
    if not 0 <= index < N_CONFIGS:
        raise ValueError(f"config index {index} outside 0..{N_CONFIGS - 1}")
    orientation = Orientation.NORMAL if index % 2 == 0 else Orientation.UPSIDE_DOWN
    return ServingConfig((index // 2) * 2, orientation)
