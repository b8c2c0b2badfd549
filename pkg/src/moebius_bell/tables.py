"""Integer lookup tables for the trial kernels, derived from the strip model.

Everything here is a function of the 8 serving configurations (indexed per
``strip.all_configs()``) and, where relevant, Bob's choice (0 = B, 1 = B').
Letters are encoded as 0 = A, 1 = A' on Alice's side and 0 = B, 1 = B' on
Bob's. The tables are derived by calling the measurement routines, not
restated, so they cannot drift from the model.
"""

from __future__ import annotations

import numpy as np

from .measure import (
    ACCEPT,
    REJECT,
    AliceDecision,
    alice_measure,
    bob_measure,
    nonlocal_reject_direction,
    suggested_letter,
)
from .strip import B_LETTERS, Letter, all_configs

N_CONFIGS = 8
N_SERVINGS = 16  # 8 configs x 2 plate sides


def _build() -> dict[str, np.ndarray]:
    accept_value = np.empty(N_CONFIGS, np.int8)
    reject_value = np.empty(N_CONFIGS, np.int8)
    suggested = np.empty(N_CONFIGS, np.uint8)
    bob_value = np.empty((N_CONFIGS, 2), np.int8)
    optimal_dir = np.empty((N_CONFIGS, 2), np.int8)
    optimal_value = np.empty((N_CONFIGS, 2), np.int8)

    for i, config in enumerate(all_configs()):
        accept_value[i] = alice_measure(config, ACCEPT).value
        reject_value[i] = alice_measure(config, REJECT).value
        suggested[i] = 0 if suggested_letter(config) is Letter.A else 1
        for j, letter in enumerate(B_LETTERS):
            bob_value[i, j] = bob_measure(config, letter).value
            direction = nonlocal_reject_direction(config, letter)
            optimal_dir[i, j] = direction
            optimal_value[i, j] = alice_measure(config, AliceDecision(False, direction)).value

    for arr in (accept_value, reject_value, suggested, bob_value, optimal_dir, optimal_value):
        arr.setflags(write=False)
    return {
        "accept_value": accept_value,
        "reject_value": reject_value,
        "suggested": suggested,
        "bob_value": bob_value,
        "optimal_dir": optimal_dir,
        "optimal_value": optimal_value,
    }


_T = _build()

ACCEPT_VALUE = _T["accept_value"]  # sign read when accepting, per config
REJECT_VALUE = _T["reject_value"]  # sign after the clockwise rejection walk
SUGGESTED = _T["suggested"]  # 0 = A suggested, 1 = A'
BOB_VALUE = _T["bob_value"]  # [config, choice] -> Bob's sign
OPTIMAL_DIR = _T["optimal_dir"]  # [config, choice] -> signalling walk direction
OPTIMAL_VALUE = _T["optimal_value"]  # [config, choice] -> sign on that walk's landing cell
