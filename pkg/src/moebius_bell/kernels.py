"""Hot per-trial kernels: numba-compiled loops with a pure-numpy fallback.

The backend is fixed once at import from the MOEBIUS_BELL_NUMBA environment
variable: "0"/"off"/"numpy" forces the numpy path, "1"/"on"/"numba" requires
numba (ImportError if it is missing), anything else - the default - uses
numba when importable. All randomness is drawn outside the kernels, which
are pure functions of the draw arrays, so both backends produce bit-identical
outputs. ``benchmarks/bench_kernels.py`` times the two against each other.

Array conventions (all length n_trials):
  config_idx uint8 in 0..7, side uint8 (0 left / 1 right),
  bob_choice uint8 (0 = B, 1 = B'), u float64 in [0, 1).
Returned columns:
  accepted bool, alice_letter uint8 (0 = A, 1 = A'), alice_value int8,
  bob_value int8, direction int8 (0 where no signalling walk happened).

The fatigue kernel is a genuine recurrence (each side's acceptance threshold
depends on its earlier rejections) and has no vectorized form; under the
numpy backend it runs as the same loop, interpreted.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .tables import ACCEPT_VALUE, BOB_VALUE, OPTIMAL_DIR, OPTIMAL_VALUE, REJECT_VALUE, SUGGESTED

ENV_FLAG = "MOEBIUS_BELL_NUMBA"


def _resolve_backend() -> str:
    value = os.environ.get(ENV_FLAG, "auto").strip().lower()
    if value in ("0", "off", "numpy", "false", "no"):
        return "numpy"
    if value in ("1", "on", "numba", "true", "yes"):
        import numba  # noqa: F401  (fail loudly when forced)

        return "numba"
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


BACKEND = _resolve_backend()


# --- loop implementations (numba-compilable) ---------------------------------


def _standard_loop(config_idx, side, bob_choice, u, p_left, p_right):
    n = config_idx.shape[0]
    accepted = np.empty(n, np.bool_)
    alice_letter = np.empty(n, np.uint8)
    alice_value = np.empty(n, np.int8)
    bob_value = np.empty(n, np.int8)
    direction = np.zeros(n, np.int8)
    for i in range(n):
        c = config_idx[i]
        p = p_left if side[i] == 0 else p_right
        acc = u[i] < p
        accepted[i] = acc
        sugg = SUGGESTED[c]
        if acc:
            alice_letter[i] = sugg
            alice_value[i] = ACCEPT_VALUE[c]
        else:
            alice_letter[i] = 1 - sugg
            alice_value[i] = REJECT_VALUE[c]
        bob_value[i] = BOB_VALUE[c, bob_choice[i]]
    return accepted, alice_letter, alice_value, bob_value, direction


def _nonlocal_loop(config_idx, side, bob_choice, u, p_left, p_right):
    n = config_idx.shape[0]
    accepted = np.empty(n, np.bool_)
    alice_letter = np.empty(n, np.uint8)
    alice_value = np.empty(n, np.int8)
    bob_value = np.empty(n, np.int8)
    direction = np.zeros(n, np.int8)
    for i in range(n):
        c = config_idx[i]
        b = bob_choice[i]
        p = p_left if side[i] == 0 else p_right
        acc = u[i] < p
        accepted[i] = acc
        sugg = SUGGESTED[c]
        if acc:
            alice_letter[i] = sugg
            alice_value[i] = ACCEPT_VALUE[c]
        else:
            alice_letter[i] = 1 - sugg
            alice_value[i] = OPTIMAL_VALUE[c, b]
            direction[i] = OPTIMAL_DIR[c, b]
        bob_value[i] = BOB_VALUE[c, b]
    return accepted, alice_letter, alice_value, bob_value, direction


def _fatigue_loop(config_idx, side, bob_choice, u, p0, tau):
    n = config_idx.shape[0]
    accepted = np.empty(n, np.bool_)
    alice_letter = np.empty(n, np.uint8)
    alice_value = np.empty(n, np.int8)
    bob_value = np.empty(n, np.int8)
    direction = np.zeros(n, np.int8)
    rejections = np.zeros(2, np.int64)  # per side, counted before each trial
    for i in range(n):
        c = config_idx[i]
        s = side[i]
        p = p0 + (1.0 - p0) * (1.0 - math.exp(-rejections[s] / tau))
        acc = u[i] < p
        accepted[i] = acc
        sugg = SUGGESTED[c]
        if acc:
            alice_letter[i] = sugg
            alice_value[i] = ACCEPT_VALUE[c]
        else:
            alice_letter[i] = 1 - sugg
            alice_value[i] = REJECT_VALUE[c]
            rejections[s] += 1
        bob_value[i] = BOB_VALUE[c, bob_choice[i]]
    return accepted, alice_letter, alice_value, bob_value, direction


# --- vectorized numpy implementations ----------------------------------------


def _standard_numpy(config_idx, side, bob_choice, u, p_left, p_right):
    p = np.where(side == 0, p_left, p_right)
    accepted = u < p
    sugg = SUGGESTED[config_idx]
    alice_letter = np.where(accepted, sugg, 1 - sugg).astype(np.uint8)
    alice_value = np.where(accepted, ACCEPT_VALUE[config_idx], REJECT_VALUE[config_idx])
    bob_value = BOB_VALUE[config_idx, bob_choice]
    direction = np.zeros(len(config_idx), np.int8)
    return accepted, alice_letter, alice_value, bob_value, direction


def _nonlocal_numpy(config_idx, side, bob_choice, u, p_left, p_right):
    p = np.where(side == 0, p_left, p_right)
    accepted = u < p
    sugg = SUGGESTED[config_idx]
    alice_letter = np.where(accepted, sugg, 1 - sugg).astype(np.uint8)
    alice_value = np.where(accepted, ACCEPT_VALUE[config_idx], OPTIMAL_VALUE[config_idx, bob_choice])
    bob_value = BOB_VALUE[config_idx, bob_choice]
    direction = np.where(accepted, np.int8(0), OPTIMAL_DIR[config_idx, bob_choice])
    return accepted, alice_letter, alice_value, bob_value, direction


_fatigue_numpy = _fatigue_loop  # sequential recurrence: same loop, interpreted


if BACKEND == "numba":
    from numba import njit

    _standard_compiled = njit(cache=True)(_standard_loop)
    _nonlocal_compiled = njit(cache=True)(_nonlocal_loop)
    _fatigue_compiled = njit(cache=True)(_fatigue_loop)
    loop_impls = {
        "standard": _standard_compiled,
        "nonlocal": _nonlocal_compiled,
        "fatigue": _fatigue_compiled,
    }
else:
    loop_impls = {
        "standard": _standard_loop,
        "nonlocal": _nonlocal_loop,
        "fatigue": _fatigue_loop,
    }

numpy_impls = {
    "standard": _standard_numpy,
    "nonlocal": _nonlocal_numpy,
    "fatigue": _fatigue_numpy,
}

_active = loop_impls if BACKEND == "numba" else numpy_impls


def simulate_standard(config_idx, side, bob_choice, u, p_left, p_right):
    return _active["standard"](config_idx, side, bob_choice, u, p_left, p_right)


def simulate_nonlocal(config_idx, side, bob_choice, u, p_left, p_right):
    return _active["nonlocal"](config_idx, side, bob_choice, u, p_left, p_right)


def simulate_fatigue(config_idx, side, bob_choice, u, p0, tau):
    return _active["fatigue"](config_idx, side, bob_choice, u, p0, tau)
