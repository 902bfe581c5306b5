"""Stabilizer simulation of logical teleportation on the [[7,1,3]] Steane code."""

from .analysis import (
    ExperimentRecord,
    FidelityEstimate,
    GroupCounts,
    average_state_fidelity,
    jackknife_error,
    jackknife_values,
    loglog_slope,
    one_sigma_zero_failure_bound,
    process_fidelity,
    state_fidelity,
    summarize,
)
from .decoder import LookupTable, PauliFrame, build_lookup, decode, frame_update
from .executor import Executor
from .faults import fault_audit, run_with_fault, simulate_counts
from .noise import FaultLocation, FaultSpec, NoiseParams
from .pauli import PauliString
from .protocols import (
    INPUT_STATES,
    VARIANTS,
    InputState,
    ShotOutcome,
    execute,
    run_shot,
    verify_noiseless_identity,
)
from .rng import RandomSource
from .steane import code_definition, destructive_measure, verify_code
from .surgery import measure_xx_joint, measure_zz_joint
from .tableau import StabilizerState

__version__ = "0.1.0"
