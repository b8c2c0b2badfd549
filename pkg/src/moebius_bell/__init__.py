"""Bell-test simulator on a four-segment one-sided strip.

Deterministic Monte Carlo and exact enumeration of the strip experiment in
which Alice accepts or rejects a suggested observable, plus the order
dependence of repeated measurements, a signalling-enhanced mode, and an
HTTP service for playing the experiment interactively.
"""

from .exact import ExactExpectations, exact_expectations, exact_handedness
from .experiment import (
    ExperimentRun,
    ExperimentSpec,
    ExternalAlice,
    ExternalBob,
    Fatigue,
    FatigueState,
    FixedP,
    Mode,
    NonlocalOptimal,
    PlateSide,
    PolicyError,
    ScriptExhaustedError,
    ScriptedAlice,
    ScriptedBob,
    SidedP,
    Streams,
    TrialLog,
    TrialRecord,
    UniformBob,
    accept_probability,
    draw_serving,
    finish_trial,
    run_experiment,
)
from .measure import (
    ACCEPT,
    REJECT,
    AliceDecision,
    MeasurementResult,
    WalkState,
    alice_measure,
    bob_measure,
    nonlocal_reject_direction,
    sequential_measure,
    suggested_letter,
)
from .stats import (
    BellReport,
    CorrelatorEstimate,
    HandednessReport,
    PairCounts,
    Verdict,
    accumulate,
    bell_report,
    bell_report_from_log,
    handedness,
    handedness_from_log,
)
from .strip import (
    Letter,
    LocalView,
    Orientation,
    ServingConfig,
    Symbol,
    all_configs,
    antipode,
    clockwise_step,
    local_view,
    symbol_at,
    traverse,
)

__version__ = "0.1.0"
